#include "adipredict/error.hpp"
#include "adipredict/regressors.hpp"

#include <cmath>

namespace adipredict {

// Columns are centred and scaled to unit variance before forming the normal
// equations, so the ridge term acts on comparable magnitudes (raw pixel
// counts span five orders of magnitude) and never touches the intercept.
// Centring makes the residuals sum to zero exactly; the intercept is
// recovered from the means afterwards.
LinearModel train_linear(const TrainingData& data, double ridge)
{
    const auto n = data.x.rows();
    const auto p = data.x.cols();
    if (n <= p + 1) {
        throw Error(ErrorCode::SingularDesign, "need more than " + std::to_string(p + 1) + " rows, got " +
                                                   std::to_string(n));
    }

    const Eigen::RowVectorXd mean = data.x.colwise().mean();
    Eigen::MatrixXd centred = data.x.rowwise() - mean;
    Eigen::VectorXd scale = (centred.colwise().squaredNorm() / double(n)).cwiseSqrt().transpose();
    for (Eigen::Index j = 0; j < p; ++j) {
        // A constant column carries no information beyond the intercept.
        if (scale(j) == 0.0) {
            centred.col(j).setZero();
            scale(j) = 1.0;
        } else {
            centred.col(j) /= scale(j);
        }
    }

    const double y_mean = data.y.mean();
    const Eigen::VectorXd y_centred = data.y.array() - y_mean;

    Eigen::MatrixXd gram = centred.transpose() * centred;
    gram.diagonal().array() += ridge;
    const Eigen::VectorXd rhs = centred.transpose() * y_centred;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > 1e-16)) {
        throw Error(ErrorCode::SingularDesign, "normal equations are singular even with the ridge term");
    }
    const Eigen::VectorXd beta = ldlt.solve(rhs);
    if (!beta.allFinite()) {
        throw Error(ErrorCode::SingularDesign, "least-squares solve produced non-finite weights");
    }

    LinearModel model;
    model.feature_names = data.feature_names;
    model.target_name = data.target_name;
    model.weights.resize(std::size_t(p));
    double bias = y_mean;
    for (Eigen::Index j = 0; j < p; ++j) {
        const double w = beta(j) / scale(j);
        model.weights[std::size_t(j)] = w;
        bias -= w * mean(j);
    }
    model.bias = bias;
    return model;
}

} // namespace adipredict
