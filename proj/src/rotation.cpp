#include "adipredict/error.hpp"
#include "adipredict/random.hpp"
#include "adipredict/regressors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace adipredict {

namespace {

// Principal axes of the sampled, standardized columns `subset`, written into
// `rotation` at (subset[a], subset[b]). Returns false when the subset has no
// variance in the sample; the block is then left as identity.
bool fill_block(const Eigen::MatrixXd& scaled, std::span<const std::size_t> sample,
                std::span<const std::size_t> subset, Eigen::MatrixXd& rotation)
{
    const auto m = Eigen::Index(sample.size());
    const auto s = Eigen::Index(subset.size());
    Eigen::MatrixXd block(m, s);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < s; ++j) {
            block(i, j) = scaled(Eigen::Index(sample[std::size_t(i)]), Eigen::Index(subset[std::size_t(j)]));
        }
    }
    block.rowwise() -= block.colwise().mean();
    const Eigen::MatrixXd cov = block.transpose() * block / double(std::max<Eigen::Index>(m - 1, 1));

    auto identity = [&] {
        for (auto f : subset) {
            rotation(Eigen::Index(f), Eigen::Index(f)) = 1.0;
        }
    };
    if (!(cov.trace() > 0.0)) {
        identity();
        return false;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) {
        identity();
        return false;
    }
    // Eigen sorts ascending; components go out by decreasing variance, each
    // signed so its largest-magnitude entry is positive.
    const Eigen::MatrixXd& vectors = eig.eigenvectors();
    for (Eigen::Index c = 0; c < s; ++c) {
        Eigen::VectorXd v = vectors.col(s - 1 - c);
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0.0) {
            v = -v;
        }
        for (Eigen::Index a = 0; a < s; ++a) {
            rotation(Eigen::Index(subset[std::size_t(a)]), Eigen::Index(subset[std::size_t(c)])) = v(a);
        }
    }
    return true;
}

} // namespace

RegressionModel train_rotation(const TrainingData& data, const TrainConfig& cfg, const Deadline& deadline)
{
    const auto& params = cfg.rotation;
    const std::size_t n = data.size();
    const std::size_t p = data.feature_count();
    if (params.subset_size < 1 || params.subset_size > p) {
        throw Error(ErrorCode::InvalidConfig, "rotation subset size must lie in 1.." + std::to_string(p));
    }

    Eigen::VectorXd inv_std = Eigen::VectorXd::Ones(Eigen::Index(p));
    if (!params.identity) {
        const Eigen::MatrixXd centred = data.x.rowwise() - data.x.colwise().mean();
        for (Eigen::Index j = 0; j < Eigen::Index(p); ++j) {
            const double sd = std::sqrt(centred.col(j).squaredNorm() / double(n));
            inv_std(j) = sd > 0.0 ? 1.0 / sd : 1.0;
        }
    }
    const Eigen::MatrixXd scaled = data.x * inv_std.asDiagonal();

    TrainConfig base_cfg = cfg;
    base_cfg.algorithm = params.base;

    TrainingData rotated;
    rotated.y = data.y;
    rotated.target_name = data.target_name;
    for (std::size_t j = 0; j < p; ++j) {
        rotated.feature_names.push_back("component_" + std::to_string(j));
    }

    const auto sample_size =
        std::clamp<std::size_t>(std::size_t(std::floor(params.sample_fraction * double(n))), std::min<std::size_t>(2, n), n);

    RotationModel model;
    for (std::size_t it = 0; it < params.iterations; ++it) {
        deadline.check();
        const std::uint64_t member_seed = derive_seed(cfg.seed, it);
        Rng rng(member_seed);

        RotationMember member;
        member.input_scale = inv_std;
        member.rotation = Eigen::MatrixXd::Zero(Eigen::Index(p), Eigen::Index(p));
        if (params.identity) {
            member.rotation.setIdentity();
        } else {
            std::vector<std::size_t> order(p);
            std::iota(order.begin(), order.end(), std::size_t{0});
            rng.shuffle(std::span<std::size_t>(order));
            const auto sample = rng.sample_without_replacement(n, sample_size);
            for (std::size_t start = 0; start < p; start += params.subset_size) {
                const auto len = std::min(params.subset_size, p - start);
                std::span<const std::size_t> subset(order.data() + start, len);
                if (!fill_block(scaled, sample, subset, member.rotation)) {
                    ++member.identity_blocks;
                }
            }
        }

        rotated.x = scaled * member.rotation;
        base_cfg.seed = derive_seed(member_seed, 2);
        member.base = std::make_shared<const RegressionModel>(train(rotated, base_cfg, deadline));
        model.members.push_back(std::move(member));
    }
    return {data.feature_names, data.target_name, std::move(model)};
}

} // namespace adipredict
