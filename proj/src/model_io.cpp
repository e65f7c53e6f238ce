#include "adipredict/model_io.hpp"

#include "adipredict/error.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace adipredict {

namespace {

std::string real(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void model(const RegressionModel& m)
    {
        out_ << "model " << to_string(m.algorithm()) << '\n';
        out_ << "target " << (m.target_name().empty() ? "-" : m.target_name()) << '\n';
        out_ << "features " << m.feature_names().size();
        for (const auto& f : m.feature_names()) {
            out_ << ' ' << f;
        }
        out_ << '\n';
        std::visit([&](const auto& impl) { body(impl); }, m.impl());
        out_ << "end\n";
    }

private:
    void vec(const char* key, const Eigen::VectorXd& v)
    {
        out_ << key << ' ' << v.size();
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            out_ << ' ' << real(v(i));
        }
        out_ << '\n';
    }

    void mat(const char* key, const Eigen::MatrixXd& m)
    {
        out_ << key << ' ' << m.rows() << ' ' << m.cols();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                out_ << ' ' << real(m(i, j));
            }
        }
        out_ << '\n';
    }

    void body(const LinearModel& m)
    {
        out_ << "bias " << real(m.bias) << '\n';
        vec("weights", Eigen::Map<const Eigen::VectorXd>(m.weights.data(), Eigen::Index(m.weights.size())));
    }

    void body(const KnnModel& m)
    {
        out_ << "k " << m.k << '\n';
        mat("x", m.x);
        vec("y", m.y);
        vec("lower", m.lower);
        vec("range", m.range);
    }

    void tree(const TreeModel& t)
    {
        out_ << "nodes " << t.nodes.size() << '\n';
        for (const auto& n : t.nodes) {
            out_ << "node " << n.feature << ' ' << real(n.threshold) << ' ' << n.left << ' ' << n.right << ' '
                 << real(n.value) << '\n';
        }
    }

    void body(const TreeModel& m) { tree(m); }

    void body(const ForestModel& m)
    {
        out_ << "trees " << m.trees.size() << '\n';
        for (std::size_t i = 0; i < m.trees.size(); ++i) {
            out_ << "seed " << m.seeds[i] << '\n';
            tree(m.trees[i]);
        }
    }

    void body(const MlpModel& m)
    {
        out_ << "epochs " << m.epochs << '\n';
        out_ << "final_loss " << real(m.final_loss) << '\n';
        vec("input_mean", m.input_mean);
        vec("input_scale", m.input_scale);
        out_ << "target_mean " << real(m.target_mean) << '\n';
        out_ << "target_scale " << real(m.target_scale) << '\n';
        mat("hidden_weights", m.net.hidden_weights);
        vec("hidden_bias", m.net.hidden_bias);
        vec("output_weights", m.net.output_weights);
        out_ << "output_bias " << real(m.net.output_bias) << '\n';
    }

    void body(const RotationModel& m)
    {
        out_ << "members " << m.members.size() << '\n';
        for (const auto& member : m.members) {
            out_ << "identity_blocks " << member.identity_blocks << '\n';
            vec("input_scale", member.input_scale);
            mat("rotation", member.rotation);
            model(*member.base);
        }
    }

    std::ostream& out_;
};

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    RegressionModel model()
    {
        expect("model");
        const auto tag = word();
        expect("target");
        auto target = word();
        if (target == "-") {
            target.clear();
        }
        expect("features");
        std::vector<std::string> features(count());
        for (auto& f : features) {
            f = word();
        }

        RegressionModel::Variant impl = [&]() -> RegressionModel::Variant {
            if (tag == "linear") return linear(features, target);
            if (tag == "knn") return knn();
            if (tag == "tree") return tree();
            if (tag == "forest") return forest();
            if (tag == "mlp") return mlp();
            if (tag == "rotation") return rotation();
            fail("unknown algorithm tag '" + tag + "'");
        }();
        expect("end");
        return {std::move(features), std::move(target), std::move(impl)};
    }

    [[noreturn]] void fail(const std::string& why)
    {
        throw Error(ErrorCode::ParseError, "model file: " + why);
    }

    std::string word()
    {
        std::string w;
        if (!(in_ >> w)) {
            fail("unexpected end of input");
        }
        return w;
    }

    void expect(const char* key)
    {
        const auto w = word();
        if (w != key) {
            fail(std::string("expected '") + key + "', found '" + w + "'");
        }
    }

    std::uint64_t unsigned_number()
    {
        const auto w = word();
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
        if (ec != std::errc{} || ptr != w.data() + w.size()) {
            fail("expected an unsigned integer, found '" + w + "'");
        }
        return v;
    }

    std::size_t count() { return std::size_t(unsigned_number()); }

    int integer()
    {
        const auto w = word();
        int v = 0;
        auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
        if (ec != std::errc{} || ptr != w.data() + w.size()) {
            fail("expected an integer, found '" + w + "'");
        }
        return v;
    }

    double real()
    {
        const auto w = word();
        // strtod handles inf/nan spellings produced by %g.
        char* end = nullptr;
        const double v = std::strtod(w.c_str(), &end);
        if (end != w.c_str() + w.size()) {
            fail("expected a number, found '" + w + "'");
        }
        return v;
    }

    double keyed_real(const char* key)
    {
        expect(key);
        return real();
    }

    Eigen::VectorXd vec(const char* key)
    {
        expect(key);
        Eigen::VectorXd v(static_cast<Eigen::Index>(count()));
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            v(i) = real();
        }
        return v;
    }

    Eigen::MatrixXd mat(const char* key)
    {
        expect(key);
        const auto rows = Eigen::Index(count());
        const auto cols = Eigen::Index(count());
        Eigen::MatrixXd m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i) {
            for (Eigen::Index j = 0; j < cols; ++j) {
                m(i, j) = real();
            }
        }
        return m;
    }

    LinearModel linear(const std::vector<std::string>& features, const std::string& target)
    {
        LinearModel m;
        m.feature_names = features;
        m.target_name = target;
        m.bias = keyed_real("bias");
        const auto w = vec("weights");
        m.weights.assign(w.data(), w.data() + w.size());
        return m;
    }

    KnnModel knn()
    {
        KnnModel m;
        expect("k");
        m.k = count();
        m.x = mat("x");
        m.y = vec("y");
        m.lower = vec("lower");
        m.range = vec("range");
        return m;
    }

    TreeModel tree()
    {
        TreeModel t;
        expect("nodes");
        t.nodes.resize(count());
        for (auto& n : t.nodes) {
            expect("node");
            n.feature = integer();
            n.threshold = real();
            n.left = integer();
            n.right = integer();
            n.value = real();
        }
        const auto size = int(t.nodes.size());
        for (const auto& n : t.nodes) {
            if (n.feature >= 0 && (n.left <= 0 || n.left >= size || n.right <= 0 || n.right >= size)) {
                fail("tree node has out-of-range children");
            }
        }
        if (t.nodes.empty()) {
            fail("tree has no nodes");
        }
        return t;
    }

    ForestModel forest()
    {
        ForestModel m;
        expect("trees");
        const auto n = count();
        for (std::size_t i = 0; i < n; ++i) {
            expect("seed");
            m.seeds.push_back(unsigned_number());
            m.trees.push_back(tree());
        }
        return m;
    }

    MlpModel mlp()
    {
        MlpModel m;
        expect("epochs");
        m.epochs = count();
        m.final_loss = keyed_real("final_loss");
        m.input_mean = vec("input_mean");
        m.input_scale = vec("input_scale");
        m.target_mean = keyed_real("target_mean");
        m.target_scale = keyed_real("target_scale");
        m.net.hidden_weights = mat("hidden_weights");
        m.net.hidden_bias = vec("hidden_bias");
        m.net.output_weights = vec("output_weights");
        m.net.output_bias = keyed_real("output_bias");
        return m;
    }

    RotationModel rotation()
    {
        RotationModel m;
        expect("members");
        const auto n = count();
        for (std::size_t i = 0; i < n; ++i) {
            RotationMember member;
            expect("identity_blocks");
            member.identity_blocks = count();
            member.input_scale = vec("input_scale");
            member.rotation = mat("rotation");
            member.base = std::make_shared<const RegressionModel>(model());
            m.members.push_back(std::move(member));
        }
        return m;
    }

private:
    std::istream& in_;
};

} // namespace

void write_model(std::ostream& out, const RegressionModel& model)
{
    out << "adipredict-model " << model_format_version << '\n';
    Writer(out).model(model);
}

RegressionModel read_model(std::istream& in)
{
    Reader reader(in);
    reader.expect("adipredict-model");
    const int version = reader.integer();
    if (version != model_format_version) {
        reader.fail("unsupported format version " + std::to_string(version));
    }
    return reader.model();
}

std::string model_to_string(const RegressionModel& model)
{
    std::ostringstream out;
    write_model(out, model);
    return out.str();
}

RegressionModel model_from_string(const std::string& text)
{
    std::istringstream in(text);
    return read_model(in);
}

void save_model(const RegressionModel& model, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write " + path.string());
    }
    write_model(out, model);
}

RegressionModel load_model(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    }
    return read_model(in);
}

} // namespace adipredict
