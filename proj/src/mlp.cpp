#include "adipredict/error.hpp"
#include "adipredict/random.hpp"
#include "adipredict/regressors.hpp"

#include <cmath>

namespace adipredict {

namespace mlp {

namespace {

Eigen::MatrixXd hidden_activations(const MlpNetwork& net, const Eigen::MatrixXd& x)
{
    Eigen::MatrixXd pre = x * net.hidden_weights.transpose();
    pre.rowwise() += net.hidden_bias.transpose();
    return (1.0 + (-pre.array()).exp()).inverse().matrix();
}

} // namespace

double forward(const MlpNetwork& net, std::span<const double> z)
{
    const Eigen::Map<const Eigen::VectorXd> input(z.data(), Eigen::Index(z.size()));
    const Eigen::VectorXd pre = net.hidden_weights * input + net.hidden_bias;
    const Eigen::VectorXd h = (1.0 + (-pre.array()).exp()).inverse().matrix();
    return net.output_weights.dot(h) + net.output_bias;
}

double loss(const MlpNetwork& net, const Eigen::MatrixXd& x, const Eigen::VectorXd& y)
{
    const Eigen::MatrixXd h = hidden_activations(net, x);
    const Eigen::VectorXd residual = (h * net.output_weights).array() + net.output_bias - y.array();
    return 0.5 * residual.squaredNorm() / double(x.rows());
}

MlpNetwork gradient(const MlpNetwork& net, const Eigen::MatrixXd& x, const Eigen::VectorXd& y)
{
    const Eigen::MatrixXd h = hidden_activations(net, x);
    const Eigen::VectorXd r =
        ((h * net.output_weights).array() + net.output_bias - y.array()).matrix() / double(x.rows());

    MlpNetwork g;
    g.output_weights = h.transpose() * r;
    g.output_bias = r.sum();
    // dL/d(pre-activation) = r * w_out * h * (1 - h)
    const Eigen::MatrixXd delta =
        ((r * net.output_weights.transpose()).array() * h.array() * (1.0 - h.array())).matrix();
    g.hidden_weights = delta.transpose() * x;
    g.hidden_bias = delta.colwise().sum().transpose();
    return g;
}

Eigen::VectorXd flatten(const MlpNetwork& net)
{
    const auto hidden = net.hidden_weights.rows();
    const auto inputs = net.hidden_weights.cols();
    Eigen::VectorXd flat(hidden * inputs + 2 * hidden + 1);
    Eigen::Index at = 0;
    for (Eigen::Index i = 0; i < hidden; ++i) {
        for (Eigen::Index j = 0; j < inputs; ++j) {
            flat(at++) = net.hidden_weights(i, j);
        }
    }
    flat.segment(at, hidden) = net.hidden_bias;
    at += hidden;
    flat.segment(at, hidden) = net.output_weights;
    at += hidden;
    flat(at) = net.output_bias;
    return flat;
}

MlpNetwork unflatten(const Eigen::VectorXd& flat, std::size_t inputs, std::size_t hidden)
{
    const auto h = Eigen::Index(hidden);
    const auto p = Eigen::Index(inputs);
    if (flat.size() != h * p + 2 * h + 1) {
        throw Error(ErrorCode::DimensionMismatch, "flat parameter vector has the wrong length");
    }
    MlpNetwork net;
    net.hidden_weights.resize(h, p);
    Eigen::Index at = 0;
    for (Eigen::Index i = 0; i < h; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) {
            net.hidden_weights(i, j) = flat(at++);
        }
    }
    net.hidden_bias = flat.segment(at, h);
    at += h;
    net.output_weights = flat.segment(at, h);
    at += h;
    net.output_bias = flat(at);
    return net;
}

} // namespace mlp

// Full-batch training on z-scored inputs and target. Each epoch takes one
// step along the full-batch gradient, scaled per parameter by Adam's bias-
// corrected moment estimates (beta1 0.9, beta2 0.999).
RegressionModel train_mlp(const TrainingData& data, const MlpParams& params, std::uint64_t seed,
                          const Deadline& deadline)
{
    const auto n = data.x.rows();
    const auto p = data.x.cols();
    const auto hidden = Eigen::Index(params.hidden);

    MlpModel model;
    model.input_mean = data.x.colwise().mean().transpose();
    Eigen::MatrixXd z = data.x.rowwise() - model.input_mean.transpose();
    model.input_scale = (z.colwise().squaredNorm() / double(n)).cwiseSqrt().transpose();
    for (Eigen::Index j = 0; j < p; ++j) {
        if (model.input_scale(j) == 0.0) {
            model.input_scale(j) = 1.0;
        }
        z.col(j) /= model.input_scale(j);
    }
    model.target_mean = data.y.mean();
    const Eigen::VectorXd y_centred = data.y.array() - model.target_mean;
    model.target_scale = std::sqrt(y_centred.squaredNorm() / double(n));
    const Eigen::VectorXd target =
        model.target_scale > 0.0 ? Eigen::VectorXd(y_centred / model.target_scale) : Eigen::VectorXd::Zero(n);

    Rng rng(seed);
    auto& net = model.net;
    const double in_limit = 1.0 / std::sqrt(double(std::max<Eigen::Index>(p, 1)));
    const double out_limit = 1.0 / std::sqrt(double(hidden));
    net.hidden_weights.resize(hidden, p);
    for (Eigen::Index i = 0; i < hidden; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) {
            net.hidden_weights(i, j) = rng.uniform(-in_limit, in_limit);
        }
    }
    net.hidden_bias.resize(hidden);
    for (Eigen::Index i = 0; i < hidden; ++i) {
        net.hidden_bias(i) = rng.uniform(-in_limit, in_limit);
    }
    net.output_weights.resize(hidden);
    for (Eigen::Index i = 0; i < hidden; ++i) {
        net.output_weights(i) = rng.uniform(-out_limit, out_limit);
    }
    net.output_bias = 0.0;

    constexpr double beta1 = 0.9;
    constexpr double beta2 = 0.999;
    constexpr double eps = 1e-8;
    Eigen::VectorXd theta = mlp::flatten(net);
    Eigen::VectorXd m1 = Eigen::VectorXd::Zero(theta.size());
    Eigen::VectorXd m2 = Eigen::VectorXd::Zero(theta.size());
    double decay1 = 1.0;
    double decay2 = 1.0;

    for (std::size_t epoch = 1; epoch <= params.epochs; ++epoch) {
        deadline.check();
        const auto current = mlp::unflatten(theta, std::size_t(p), params.hidden);
        const Eigen::VectorXd g = mlp::flatten(mlp::gradient(current, z, target));
        if (!g.allFinite()) {
            throw Error(ErrorCode::TrainingDiverged, "non-finite gradient at epoch " + std::to_string(epoch));
        }
        m1 = beta1 * m1 + (1.0 - beta1) * g;
        m2 = beta2 * m2 + (1.0 - beta2) * g.cwiseAbs2();
        decay1 *= beta1;
        decay2 *= beta2;
        const Eigen::ArrayXd step = (m1.array() / (1.0 - decay1)) / ((m2.array() / (1.0 - decay2)).sqrt() + eps);
        theta -= params.learning_rate * step.matrix();
    }

    net = mlp::unflatten(theta, std::size_t(p), params.hidden);
    model.epochs = params.epochs;
    model.final_loss = mlp::loss(net, z, target);
    if (!std::isfinite(model.final_loss) || !theta.allFinite()) {
        throw Error(ErrorCode::TrainingDiverged, "training loss is not finite");
    }
    return {data.feature_names, data.target_name, std::move(model)};
}

} // namespace adipredict
