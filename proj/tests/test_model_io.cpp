#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "adipredict/error.hpp"
#include "adipredict/model_io.hpp"
#include "support.hpp"

#include <fstream>

using namespace adipredict;

namespace {

TrainingData sample()
{
    return testsupport::make_data(60, 3, -2, 2, 17, [](const Eigen::VectorXd& x) {
        return std::sin(x(0)) * 100 + x(1) * x(2) + 0.1;
    });
}

TrainConfig config_for(Algorithm a)
{
    TrainConfig cfg;
    cfg.algorithm = a;
    cfg.seed = 4;
    cfg.forest.trees = 7;
    cfg.mlp.epochs = 40;
    cfg.rotation.iterations = 3;
    cfg.rotation.base = Algorithm::Mlp;
    return cfg;
}

} // namespace

TEST_CASE("every family survives a text round trip bit for bit")
{
    const auto d = sample();
    for (auto a : {Algorithm::Linear, Algorithm::Knn, Algorithm::Tree, Algorithm::Forest, Algorithm::Mlp,
                   Algorithm::Rotation}) {
        CAPTURE(to_string(a));
        const auto model = train(d, config_for(a));
        const auto text = model_to_string(model);
        const auto back = model_from_string(text);
        CHECK(back.algorithm() == a);
        CHECK(back.feature_names() == model.feature_names());
        CHECK(back.target_name() == model.target_name());
        CHECK(model_to_string(back) == text);
        Rng rng(3);
        for (int q = 0; q < 25; ++q) {
            const std::vector<double> x{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
            REQUIRE(back.predict(x) == model.predict(x));
        }
    }
}

TEST_CASE("model files")
{
    const auto dir = testsupport::scratch_dir("model_io");
    const auto model = train(sample(), config_for(Algorithm::Tree));
    save_model(model, dir / "tree.model");
    CHECK(model_to_string(load_model(dir / "tree.model")) == model_to_string(model));
    try {
        (void)load_model(dir / "missing.model");
        FAIL("expected IoError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IoError);
    }
}

TEST_CASE("damaged model text is a parse error")
{
    const auto text = model_to_string(train(sample(), config_for(Algorithm::Linear)));
    for (const std::string& bad : {std::string("not a model"), text.substr(0, text.size() / 2),
                                   std::string("adipredict-model 2\n")}) {
        try {
            (void)model_from_string(bad);
            FAIL("expected ParseError");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ParseError);
        }
    }
}
