#pragma once

#include "adipredict/dataset.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace adipredict {

/// Dense design matrix (one row per instance) and target vector.
struct TrainingData {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    std::vector<std::string> feature_names;
    std::string target_name;

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(x.rows()); }
    [[nodiscard]] std::size_t feature_count() const noexcept { return static_cast<std::size_t>(x.cols()); }
};

TrainingData to_training_data(const Dataset& dataset);
TrainingData to_training_data(const Dataset& dataset, std::span<const std::size_t> indices);

/// Cooperative wall-clock limit. Training loops poll it between units of
/// work (epochs, trees, ensemble members) and stop with BudgetExceeded.
class Deadline {
public:
    using Clock = std::chrono::steady_clock;

    static Deadline never() { return Deadline(Clock::time_point::max()); }
    static Deadline after(std::chrono::duration<double> budget)
    {
        return Deadline(Clock::now() + std::chrono::duration_cast<Clock::duration>(budget));
    }

    [[nodiscard]] bool expired() const { return end_ != Clock::time_point::max() && Clock::now() >= end_; }
    void check() const;

private:
    explicit Deadline(Clock::time_point end) : end_(end) {}
    Clock::time_point end_;
};

enum class Algorithm { Linear, Knn, Tree, Forest, Mlp, Rotation };

std::string_view to_string(Algorithm algorithm) noexcept;

struct KnnParams {
    std::size_t k = 5;
};

struct TreeParams {
    std::size_t min_leaf = 1;
    std::size_t max_depth = 0; // 0 = unlimited
};

struct ForestParams {
    std::size_t trees = 100;
    bool bootstrap = true;
    double bag_fraction = 1.0;      // bootstrap sample size relative to n
    std::size_t features_per_split = 0; // 0 = ceil(sqrt(features))
};

struct MlpParams {
    std::size_t hidden = 16;
    std::size_t epochs = 500;
    double learning_rate = 0.01;
};

struct RotationParams {
    std::size_t iterations = 10;
    std::size_t subset_size = 2;       // features per disjoint subset
    double sample_fraction = 0.75;     // PCA sample, drawn without replacement
    Algorithm base = Algorithm::Mlp;
    bool identity = false;             // skip projection entirely (diagnostics)
};

/// Hyperparameters for every family; only the block(s) relevant to
/// `algorithm` are read. Rotation reads `rotation` plus its base's block.
struct TrainConfig {
    Algorithm algorithm = Algorithm::Linear;
    std::uint64_t seed = 1;
    double ridge = 1e-8;
    KnnParams knn;
    TreeParams tree;
    ForestParams forest;
    MlpParams mlp;
    RotationParams rotation;

    /// Throws InvalidConfig (or InvalidK) on out-of-range hyperparameters.
    void validate() const;
};

struct LinearModel {
    std::vector<std::string> feature_names;
    std::vector<double> weights;
    double bias = 0.0;
    std::string target_name;

    [[nodiscard]] double predict(std::span<const double> x) const;
};

struct KnnModel {
    std::size_t k = 1;
    Eigen::MatrixXd x; // training inputs, raw units
    Eigen::VectorXd y;
    Eigen::VectorXd lower; // per-feature min over the training rows
    Eigen::VectorXd range; // max - min, 0 for constant features
};

struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0; // mean target of the node's rows
};

struct TreeModel {
    std::vector<TreeNode> nodes; // nodes[0] is the root

    [[nodiscard]] double predict(std::span<const double> x) const;
    [[nodiscard]] std::size_t depth() const;
    [[nodiscard]] std::size_t leaf_count() const;
};

struct ForestModel {
    std::vector<TreeModel> trees;
    std::vector<std::uint64_t> seeds;
};

struct MlpNetwork {
    Eigen::MatrixXd hidden_weights; // hidden x inputs
    Eigen::VectorXd hidden_bias;
    Eigen::VectorXd output_weights;
    double output_bias = 0.0;
};

struct MlpModel {
    MlpNetwork net;
    Eigen::VectorXd input_mean;
    Eigen::VectorXd input_scale; // 1 for constant inputs
    double target_mean = 0.0;
    double target_scale = 0.0;   // 0 for a constant target: prediction is the mean
    std::size_t epochs = 0;
    double final_loss = 0.0;
};

class RegressionModel;

struct RotationMember {
    Eigen::VectorXd input_scale;  // per-feature 1/std applied before rotation
    Eigen::MatrixXd rotation;     // orthonormal, block diagonal in subset order
    std::size_t identity_blocks = 0; // subsets that fell back to identity
    std::shared_ptr<const RegressionModel> base;
};

struct RotationModel {
    std::vector<RotationMember> members;
};

/// A trained predictor. Immutable; predict is deterministic and thread safe.
class RegressionModel {
public:
    using Variant = std::variant<LinearModel, KnnModel, TreeModel, ForestModel, MlpModel, RotationModel>;

    RegressionModel(std::vector<std::string> feature_names, std::string target_name, Variant impl)
        : feature_names_(std::move(feature_names)), target_name_(std::move(target_name)), impl_(std::move(impl))
    {
    }

    [[nodiscard]] Algorithm algorithm() const noexcept { return static_cast<Algorithm>(impl_.index()); }
    [[nodiscard]] const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
    [[nodiscard]] const std::string& target_name() const noexcept { return target_name_; }
    [[nodiscard]] const Variant& impl() const noexcept { return impl_; }

    template <typename T>
    [[nodiscard]] const T& as() const
    {
        return std::get<T>(impl_);
    }

    /// Throws DimensionMismatch if x has the wrong length. Negative values
    /// are returned as-is.
    [[nodiscard]] double predict(std::span<const double> x) const;

private:
    std::vector<std::string> feature_names_;
    std::string target_name_;
    Variant impl_;
};

double predict(const RegressionModel& model, std::span<const double> x);

/// Dispatches on cfg.algorithm.
RegressionModel train(const TrainingData& data, const TrainConfig& cfg, const Deadline& deadline = Deadline::never());

/// Least squares on a bias-augmented design; see linear.cpp for the solve.
LinearModel train_linear(const TrainingData& data, double ridge = 1e-8);

RegressionModel train_knn(const TrainingData& data, const KnnParams& params);

/// Greedy variance-reduction tree. `rows` selects (possibly repeated)
/// training rows; `features_per_split` < feature count draws a random
/// feature subset at every node from `seed`.
TreeModel grow_tree(const TrainingData& data, std::span<const std::size_t> rows, const TreeParams& params,
                    std::size_t features_per_split, std::uint64_t seed);

RegressionModel train_tree(const TrainingData& data, const TreeParams& params);
RegressionModel train_forest(const TrainingData& data, const ForestParams& forest, const TreeParams& tree,
                             std::uint64_t seed, const Deadline& deadline = Deadline::never());
RegressionModel train_mlp(const TrainingData& data, const MlpParams& params, std::uint64_t seed,
                          const Deadline& deadline = Deadline::never());
RegressionModel train_rotation(const TrainingData& data, const TrainConfig& cfg,
                               const Deadline& deadline = Deadline::never());

namespace mlp {

/// Forward pass of the raw network (inputs and output in z-score units).
double forward(const MlpNetwork& net, std::span<const double> z);

/// Loss 0.5 * mean((net(x_i) - y_i)^2) over the rows of x, in network units.
double loss(const MlpNetwork& net, const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/// Analytic gradient of `loss`, same shapes as the network.
MlpNetwork gradient(const MlpNetwork& net, const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/// Flat views for optimisers and gradient checks (hidden weights row-major,
/// then hidden bias, output weights, output bias).
Eigen::VectorXd flatten(const MlpNetwork& net);
MlpNetwork unflatten(const Eigen::VectorXd& flat, std::size_t inputs, std::size_t hidden);

} // namespace mlp

} // namespace adipredict
