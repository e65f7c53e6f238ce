#include "adipredict/regressors.hpp"

#include "adipredict/error.hpp"

#include <algorithm>
#include <numeric>

namespace adipredict {

std::string_view to_string(Algorithm algorithm) noexcept
{
    switch (algorithm) {
    case Algorithm::Linear: return "linear";
    case Algorithm::Knn: return "knn";
    case Algorithm::Tree: return "tree";
    case Algorithm::Forest: return "forest";
    case Algorithm::Mlp: return "mlp";
    case Algorithm::Rotation: return "rotation";
    }
    return "?";
}

void Deadline::check() const
{
    if (expired()) {
        throw Error(ErrorCode::BudgetExceeded, "time budget exhausted");
    }
}

TrainingData to_training_data(const Dataset& dataset)
{
    std::vector<std::size_t> all(dataset.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return to_training_data(dataset, all);
}

TrainingData to_training_data(const Dataset& dataset, std::span<const std::size_t> indices)
{
    TrainingData data;
    data.feature_names = dataset.feature_names();
    data.target_name = dataset.target_name();
    const auto p = static_cast<Eigen::Index>(dataset.feature_count());
    data.x.resize(static_cast<Eigen::Index>(indices.size()), p);
    data.y.resize(static_cast<Eigen::Index>(indices.size()));
    for (std::size_t r = 0; r < indices.size(); ++r) {
        const auto& inst = dataset.instances().at(indices[r]);
        for (Eigen::Index c = 0; c < p; ++c) {
            data.x(Eigen::Index(r), c) = inst.features[std::size_t(c)];
        }
        data.y(Eigen::Index(r)) = inst.target;
    }
    return data;
}

void TrainConfig::validate() const
{
    auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
    auto check_family = [&](Algorithm a) {
        switch (a) {
        case Algorithm::Linear:
            if (!(ridge >= 0.0)) bad("ridge must be >= 0");
            break;
        case Algorithm::Knn:
            if (knn.k < 1) throw Error(ErrorCode::InvalidK, "k must be >= 1");
            break;
        case Algorithm::Forest:
            if (forest.trees < 1) bad("forest needs at least one tree");
            if (!(forest.bag_fraction > 0.0 && forest.bag_fraction <= 1.0)) bad("bag fraction must be in (0, 1]");
            [[fallthrough]];
        case Algorithm::Tree:
            if (tree.min_leaf < 1) bad("min leaf size must be >= 1");
            break;
        case Algorithm::Mlp:
            if (mlp.hidden < 1) bad("hidden width must be >= 1");
            if (mlp.epochs < 1) bad("epochs must be >= 1");
            if (!(mlp.learning_rate > 0.0)) bad("learning rate must be > 0");
            break;
        case Algorithm::Rotation:
            bad("rotation cannot be its own base learner");
        }
    };
    if (algorithm == Algorithm::Rotation) {
        if (rotation.iterations < 1) bad("rotation needs at least one iteration");
        if (rotation.subset_size < 1) bad("rotation subset size must be >= 1");
        if (!(rotation.sample_fraction > 0.0 && rotation.sample_fraction <= 1.0)) {
            bad("rotation sample fraction must be in (0, 1]");
        }
        check_family(rotation.base);
    } else {
        check_family(algorithm);
    }
}

double LinearModel::predict(std::span<const double> x) const
{
    if (x.size() != weights.size()) {
        throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(weights.size()) + " features, got " +
                                                      std::to_string(x.size()));
    }
    double acc = bias;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        acc += weights[j] * x[j];
    }
    return acc;
}

namespace {

double predict_knn(const KnnModel& m, std::span<const double> x)
{
    const auto n = m.x.rows();
    std::vector<std::pair<double, Eigen::Index>> dist(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        double d = 0.0;
        for (Eigen::Index j = 0; j < m.x.cols(); ++j) {
            if (m.range(j) == 0.0) {
                continue;
            }
            const double diff = (x[std::size_t(j)] - m.x(i, j)) / m.range(j);
            d += diff * diff;
        }
        dist[std::size_t(i)] = {d, i};
    }
    // Pairs compare by distance, then by training index.
    std::partial_sort(dist.begin(), dist.begin() + std::ptrdiff_t(m.k), dist.end());
    double acc = 0.0;
    for (std::size_t i = 0; i < m.k; ++i) {
        acc += m.y(dist[i].second);
    }
    return acc / double(m.k);
}

double predict_forest(const ForestModel& m, std::span<const double> x)
{
    double acc = 0.0;
    for (const auto& t : m.trees) {
        acc += t.predict(x);
    }
    return acc / double(m.trees.size());
}

double predict_mlp(const MlpModel& m, std::span<const double> x)
{
    std::vector<double> z(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        z[j] = (x[j] - m.input_mean(Eigen::Index(j))) / m.input_scale(Eigen::Index(j));
    }
    return m.target_mean + m.target_scale * mlp::forward(m.net, z);
}

double predict_rotation(const RotationModel& m, std::span<const double> x)
{
    const Eigen::Map<const Eigen::VectorXd> raw(x.data(), Eigen::Index(x.size()));
    double acc = 0.0;
    for (const auto& member : m.members) {
        const Eigen::VectorXd rotated = member.rotation.transpose() * raw.cwiseProduct(member.input_scale);
        acc += member.base->predict(std::span<const double>(rotated.data(), std::size_t(rotated.size())));
    }
    return acc / double(m.members.size());
}

} // namespace

double RegressionModel::predict(std::span<const double> x) const
{
    if (x.size() != feature_names_.size()) {
        throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(feature_names_.size()) +
                                                      " features, got " + std::to_string(x.size()));
    }
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LinearModel> || std::is_same_v<T, TreeModel>) {
                return m.predict(x);
            } else if constexpr (std::is_same_v<T, KnnModel>) {
                return predict_knn(m, x);
            } else if constexpr (std::is_same_v<T, ForestModel>) {
                return predict_forest(m, x);
            } else if constexpr (std::is_same_v<T, MlpModel>) {
                return predict_mlp(m, x);
            } else {
                return predict_rotation(m, x);
            }
        },
        impl_);
}

double predict(const RegressionModel& model, std::span<const double> x)
{
    return model.predict(x);
}

RegressionModel train(const TrainingData& data, const TrainConfig& cfg, const Deadline& deadline)
{
    cfg.validate();
    if (data.size() == 0) {
        throw Error(ErrorCode::EmptyDataset, "no training rows");
    }
    switch (cfg.algorithm) {
    case Algorithm::Linear:
        return {data.feature_names, data.target_name, train_linear(data, cfg.ridge)};
    case Algorithm::Knn:
        return train_knn(data, cfg.knn);
    case Algorithm::Tree:
        return train_tree(data, cfg.tree);
    case Algorithm::Forest:
        return train_forest(data, cfg.forest, cfg.tree, cfg.seed, deadline);
    case Algorithm::Mlp:
        return train_mlp(data, cfg.mlp, cfg.seed, deadline);
    case Algorithm::Rotation:
        return train_rotation(data, cfg, deadline);
    }
    throw Error(ErrorCode::InvalidConfig, "unknown algorithm");
}

RegressionModel train_knn(const TrainingData& data, const KnnParams& params)
{
    if (params.k < 1 || params.k > data.size()) {
        throw Error(ErrorCode::InvalidK, "k=" + std::to_string(params.k) + " must lie in 1.." +
                                             std::to_string(data.size()));
    }
    KnnModel m;
    m.k = params.k;
    m.x = data.x;
    m.y = data.y;
    m.lower = data.x.colwise().minCoeff().transpose();
    m.range = data.x.colwise().maxCoeff().transpose() - m.lower;
    return {data.feature_names, data.target_name, std::move(m)};
}

} // namespace adipredict
