#include "adipredict/error.hpp"
#include "adipredict/random.hpp"
#include "adipredict/regressors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace adipredict {

double TreeModel::predict(std::span<const double> x) const
{
    std::size_t at = 0;
    while (nodes[at].feature >= 0) {
        const auto& node = nodes[at];
        at = std::size_t(x[std::size_t(node.feature)] <= node.threshold ? node.left : node.right);
    }
    return nodes[at].value;
}

std::size_t TreeModel::depth() const
{
    std::vector<std::size_t> depth(nodes.size(), 0);
    std::size_t deepest = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        deepest = std::max(deepest, depth[i]);
        if (nodes[i].feature >= 0) {
            depth[std::size_t(nodes[i].left)] = depth[i] + 1;
            depth[std::size_t(nodes[i].right)] = depth[i] + 1;
        }
    }
    return deepest;
}

std::size_t TreeModel::leaf_count() const
{
    return std::size_t(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.feature < 0; }));
}

namespace {

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(const TrainingData& data, const TreeParams& params, std::size_t features_per_split, std::uint64_t seed)
        : data_(data), params_(params), mtry_(std::min(features_per_split, data.feature_count())), rng_(seed)
    {
    }

    TreeModel build(std::vector<std::size_t> rows)
    {
        TreeModel tree;
        grow(tree, std::move(rows), 0);
        return tree;
    }

private:
    int grow(TreeModel& tree, std::vector<std::size_t> rows, std::size_t depth)
    {
        const int id = int(tree.nodes.size());
        tree.nodes.emplace_back();

        double mean = 0.0;
        for (auto r : rows) {
            mean += data_.y(Eigen::Index(r));
        }
        mean /= double(rows.size());
        double sse = 0.0;
        for (auto r : rows) {
            const double d = data_.y(Eigen::Index(r)) - mean;
            sse += d * d;
        }
        tree.nodes[std::size_t(id)].value = mean;

        const bool depth_left = params_.max_depth == 0 || depth < params_.max_depth;
        if (!depth_left || rows.size() < 2 * params_.min_leaf || sse <= 0.0) {
            return id;
        }
        const Split split = best_split(rows, mean, sse);
        if (split.feature < 0) {
            return id;
        }

        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        for (auto r : rows) {
            (data_.x(Eigen::Index(r), split.feature) <= split.threshold ? left : right).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        const int l = grow(tree, std::move(left), depth + 1);
        const int r = grow(tree, std::move(right), depth + 1);
        auto& node = tree.nodes[std::size_t(id)];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = l;
        node.right = r;
        return id;
    }

    std::vector<std::size_t> candidate_features()
    {
        const std::size_t p = data_.feature_count();
        if (mtry_ >= p) {
            std::vector<std::size_t> all(p);
            std::iota(all.begin(), all.end(), std::size_t{0});
            return all;
        }
        auto chosen = rng_.sample_without_replacement(p, mtry_);
        std::sort(chosen.begin(), chosen.end());
        return chosen;
    }

    // Scans every boundary between distinct sorted values; the first best
    // (feature order, then threshold order) wins ties.
    Split best_split(const std::vector<std::size_t>& rows, double mean, double sse)
    {
        Split best;
        const std::size_t n = rows.size();
        std::vector<std::pair<double, double>> sorted(n); // (feature value, centred target)
        const double min_gain = 1e-12 * sse;

        for (auto f : candidate_features()) {
            for (std::size_t i = 0; i < n; ++i) {
                const auto r = Eigen::Index(rows[i]);
                sorted[i] = {data_.x(r, Eigen::Index(f)), data_.y(r) - mean};
            }
            std::sort(sorted.begin(), sorted.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });

            double total = 0.0;
            for (const auto& s : sorted) {
                total += s.second;
            }
            double left_sum = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                left_sum += sorted[i].second;
                const std::size_t nl = i + 1;
                const std::size_t nr = n - nl;
                if (sorted[i].first == sorted[i + 1].first || nl < params_.min_leaf || nr < params_.min_leaf) {
                    continue;
                }
                // SSE reduction of splitting a centred sample: sl^2/nl + sr^2/nr.
                const double right_sum = total - left_sum;
                const double gain = left_sum * left_sum / double(nl) + right_sum * right_sum / double(nr);
                if (gain > best.gain && gain > min_gain) {
                    double threshold = 0.5 * (sorted[i].first + sorted[i + 1].first);
                    if (!(threshold < sorted[i + 1].first)) {
                        threshold = sorted[i].first;
                    }
                    best = {int(f), threshold, gain};
                }
            }
        }
        return best;
    }

    const TrainingData& data_;
    TreeParams params_;
    std::size_t mtry_;
    Rng rng_;
};

} // namespace

TreeModel grow_tree(const TrainingData& data, std::span<const std::size_t> rows, const TreeParams& params,
                    std::size_t features_per_split, std::uint64_t seed)
{
    if (rows.empty()) {
        throw Error(ErrorCode::EmptyDataset, "cannot grow a tree on zero rows");
    }
    TreeBuilder builder(data, params, features_per_split, seed);
    return builder.build({rows.begin(), rows.end()});
}

RegressionModel train_tree(const TrainingData& data, const TreeParams& params)
{
    std::vector<std::size_t> rows(data.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return {data.feature_names, data.target_name, grow_tree(data, rows, params, data.feature_count(), 0)};
}

RegressionModel train_forest(const TrainingData& data, const ForestParams& forest, const TreeParams& tree,
                             std::uint64_t seed, const Deadline& deadline)
{
    const std::size_t n = data.size();
    const std::size_t p = data.feature_count();
    const std::size_t mtry = forest.features_per_split == 0
                                 ? std::size_t(std::ceil(std::sqrt(double(p))))
                                 : std::min(forest.features_per_split, p);
    const auto sample_size = std::max<std::size_t>(1, std::size_t(std::llround(forest.bag_fraction * double(n))));

    ForestModel model;
    model.trees.reserve(forest.trees);
    for (std::size_t t = 0; t < forest.trees; ++t) {
        deadline.check();
        const std::uint64_t tree_seed = derive_seed(seed, t);
        Rng rng(tree_seed);
        std::vector<std::size_t> rows;
        if (forest.bootstrap) {
            rows.resize(sample_size);
            for (auto& r : rows) {
                r = rng.index(n);
            }
        } else if (sample_size < n) {
            rows = rng.sample_without_replacement(n, sample_size);
        } else {
            rows.resize(n);
            std::iota(rows.begin(), rows.end(), std::size_t{0});
        }
        model.trees.push_back(grow_tree(data, rows, tree, mtry, derive_seed(tree_seed, 1)));
        model.seeds.push_back(tree_seed);
    }
    return {data.feature_names, data.target_name, std::move(model)};
}

} // namespace adipredict
