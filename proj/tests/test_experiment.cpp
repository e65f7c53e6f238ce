#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "adipredict/error.hpp"
#include "adipredict/experiment.hpp"
#include "adipredict/synth.hpp"
#include "support.hpp"

#include <thread>

using namespace adipredict;

namespace {

Dataset synthetic(std::size_t patients, std::uint64_t seed, double noise = 100.0)
{
    SynthOptions opt;
    opt.patients = patients;
    opt.min_slices = 8;
    opt.max_slices = 12;
    opt.seed = seed;
    opt.model.noise_sd = noise;
    return make_instances(generate_synthetic(opt), Task::MediastinalFromEpicardial);
}

ExperimentSpec spec_of(std::vector<std::string> names)
{
    ExperimentSpec spec;
    for (const auto& n : names) {
        spec.algorithms.push_back(parse_algorithm(n));
    }
    spec.budget_s = 120;
    return spec;
}

const RankingRow& row_named(const RankingReport& r, const std::string& name)
{
    for (const auto& row : r.rows) {
        if (row.algorithm == name) {
            return row;
        }
    }
    FAIL("no row " << name);
    return r.rows.front();
}

} // namespace

TEST_CASE("algorithm names parse into configs")
{
    const auto knn = parse_algorithm("knn:k=3");
    CHECK(knn.name == "knn:k=3");
    CHECK(knn.config.algorithm == Algorithm::Knn);
    CHECK(knn.config.knn.k == 3);
    const auto rot = parse_algorithm("rotation-forest:iterations=4:trees=20");
    CHECK(rot.config.algorithm == Algorithm::Rotation);
    CHECK(rot.config.rotation.base == Algorithm::Forest);
    CHECK(rot.config.rotation.iterations == 4);
    CHECK(rot.config.forest.trees == 20);
    CHECK_THROWS_AS(parse_algorithm("svm"), Error);
    CHECK_THROWS_AS(parse_algorithm("knn:q=1"), Error);
    CHECK_THROWS_AS(parse_algorithm("knn:k=abc"), Error);
    for (const auto& name : default_algorithms()) {
        CHECK_NOTHROW(parse_algorithm(name));
    }
}

TEST_CASE("pooled predictions cover every instance once")
{
    const auto ds = synthetic(12, 3);
    auto spec = spec_of({"linear"});
    std::vector<double> seen(ds.size(), 0);
    spec.algorithms[0].fit = [&](const TrainingData& d, std::uint64_t, const Deadline&) -> PredictFn {
        const double mean = d.y.mean();
        return [mean](std::span<const double>) { return mean; };
    };
    const auto report = run_cv(ds, spec);
    REQUIRE(report.rows.size() == 1);
    REQUIRE(report.rows[0].eval.has_value());
    CHECK(report.rows[0].eval->n == ds.size());
    CHECK(report.instances == ds.size());
}

TEST_CASE("linear on an affine target ranks first with rho near one")
{
    const auto ds = synthetic(15, 4, 10.0);
    const auto report = run_cv(ds, spec_of({"knn", "linear", "tree"}));
    REQUIRE(report.rows.size() == 3);
    CHECK(report.rows[0].algorithm == "linear");
    CHECK(*report.rows[0].eval->rho > 0.999);
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        CHECK(*report.rows[i - 1].eval->rho >= *report.rows[i].eval->rho);
    }
}

TEST_CASE("cross-validation is deterministic and independent of the job count")
{
    const auto ds = synthetic(10, 5);
    auto spec = spec_of({"linear", "knn", "forest:trees=10", "mlp:epochs=30", "rotation-tree:iterations=3"});
    const auto a = render_report_csv(run_cv(ds, spec));
    const auto b = render_report_csv(run_cv(ds, spec));
    spec.jobs = 4;
    const auto c = render_report_csv(run_cv(ds, spec));
    CHECK(a == b);
    CHECK(a == c);
}

TEST_CASE("the master seed does not matter for least squares on a noise-free target")
{
    const auto ds = synthetic(10, 6, 0.0);
    for (std::uint64_t seed : {1ULL, 2ULL, 99ULL}) {
        auto spec = spec_of({"linear"});
        spec.seed = seed;
        const auto r = run_cv(ds, spec);
        CHECK(*r.rows[0].eval->rho == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("grouped cross-validation follows the patient fold plan")
{
    const auto ds = synthetic(10, 8);
    ExperimentSpec spec;
    spec.algorithms.push_back(AlgorithmEntry{"mean", TrainConfig{}, {}});
    spec.group_by_patient = true;
    spec.folds = 5;
    spec.seed = 17;
    spec.algorithms[0].fit = [](const TrainingData& d, std::uint64_t, const Deadline&) -> PredictFn {
        const double mean = d.y.mean();
        return [mean](std::span<const double>) { return mean; };
    };
    const auto report = run_cv(ds, spec);
    CHECK(report.group_by_patient);

    std::vector<std::string> ids;
    for (const auto& inst : ds.instances()) {
        ids.push_back(inst.patient_id);
    }
    const auto plan = split_folds_grouped(ids, 5, 17);
    PredictionSet expected(ds.size());
    for (std::size_t f = 0; f < 5; ++f) {
        double sum = 0;
        const auto train = plan.train_indices(f);
        for (auto i : train) {
            sum += ds.instances()[i].target;
        }
        for (auto i : plan.test_indices(f)) {
            expected[i] = {sum / double(train.size()), ds.instances()[i].target};
        }
    }
    CHECK(report.rows[0].eval->mae == doctest::Approx(evaluate(expected).mae).epsilon(1e-12));
    CHECK(*report.rows[0].eval->rho == doctest::Approx(*evaluate(expected).rho).epsilon(1e-12));
}

TEST_CASE("an algorithm over budget is reported as timed out without stopping the others")
{
    const auto ds = synthetic(6, 9);
    auto spec = spec_of({"linear", "knn"});
    AlgorithmEntry slow;
    slow.name = "sleeper";
    slow.fit = [](const TrainingData&, std::uint64_t, const Deadline& deadline) -> PredictFn {
        std::this_thread::sleep_for(std::chrono::seconds(2));
        deadline.check();
        return [](std::span<const double>) { return 0.0; };
    };
    spec.algorithms.push_back(slow);
    spec.budget_s = 1.0;
    spec.jobs = 3;
    const auto report = run_cv(ds, spec);
    CHECK(row_named(report, "sleeper").status == RowStatus::TimedOut);
    CHECK(row_named(report, "linear").status == RowStatus::Ok);
    CHECK(row_named(report, "knn").status == RowStatus::Ok);
    CHECK(report.rows.back().algorithm == "sleeper");
}

TEST_CASE("a failing algorithm gets a Failed row")
{
    const auto ds = synthetic(6, 10);
    auto spec = spec_of({"linear", "knn:k=500"});
    const auto report = run_cv(ds, spec);
    CHECK(row_named(report, "knn:k=500").status == RowStatus::Failed);
    CHECK_FALSE(row_named(report, "knn:k=500").message.empty());
    CHECK(row_named(report, "linear").status == RowStatus::Ok);
}

TEST_CASE("rows sort by rho, undefined last, ties by lower RRSE")
{
    auto mk = [](std::string name, std::optional<double> rho, double rrse) {
        RankingRow r;
        r.algorithm = std::move(name);
        EvalReport e;
        e.rho = rho;
        e.rrse_pct = rrse;
        r.eval = e;
        return r;
    };
    std::vector<RankingRow> rows{mk("a", 0.5, 10), mk("b", std::nullopt, 1), mk("c", 0.9, 30), mk("d", 0.9, 20)};
    sort_rows(rows);
    CHECK(rows[0].algorithm == "d");
    CHECK(rows[1].algorithm == "c");
    CHECK(rows[2].algorithm == "a");
    CHECK(rows[3].algorithm == "b");
}

TEST_CASE("report CSV round trip")
{
    const auto ds = synthetic(6, 11);
    auto spec = spec_of({"linear", "knn:k=500"});
    spec.seed = 31;
    const auto report = run_cv(ds, spec);
    const auto text = render_report_csv(report);
    const auto back = parse_report_csv(text);
    CHECK(back.seed == 31);
    CHECK(back.instances == ds.size());
    CHECK(back.task == Task::MediastinalFromEpicardial);
    REQUIRE(back.rows.size() == 2);
    CHECK(*back.rows[0].eval->rho == *report.rows[0].eval->rho);
    CHECK(back.rows[1].status == RowStatus::Failed);
    CHECK(render_report_csv(back) == text);
    CHECK(text.find("train_ms") != std::string::npos);
}

TEST_CASE("display table has four decimals and NA for missing values")
{
    const auto ds = synthetic(6, 12);
    const auto report = run_cv(ds, spec_of({"linear", "knn:k=500"}));
    const auto csv = render_table(report, TableFormat::Csv);
    CHECK(csv.rfind("algorithm,rho,mae,rmse,rae_pct,rrse_pct,status", 0) == 0);
    CHECK(csv.find(",NA,") != std::string::npos);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", *report.rows[0].eval->rho);
    CHECK(csv.find(buf) != std::string::npos);
}

TEST_CASE("experiment spec validation")
{
    ExperimentSpec spec;
    CHECK_THROWS_AS(spec.validate(), Error); // no algorithms
    spec = spec_of({"linear"});
    spec.folds = 1;
    CHECK_THROWS_AS(spec.validate(), Error);
    spec.folds = 10;
    spec.budget_s = 0;
    CHECK_THROWS_AS(spec.validate(), Error);
}
