#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace adipredict {

struct PredictionPair {
    double predicted = 0.0;
    double actual = 0.0;
};

using PredictionSet = std::vector<PredictionPair>;

enum class EvalStatus {
    Ok,
    RhoUndefined,    // predictions or actuals have zero variance
    DenominatorZero, // all actuals equal: RAE/RRSE (and rho) undefined
};

std::string_view to_string(EvalStatus status) noexcept;

/// Pooled regression scores. RAE and RRSE are percentages of the error made
/// by always predicting the mean actual value.
struct EvalReport {
    std::optional<double> rho;
    double mae = 0.0;
    double rmse = 0.0;
    std::optional<double> rae_pct;
    std::optional<double> rrse_pct;
    std::size_t n = 0;
    EvalStatus status = EvalStatus::Ok;
};

/// Throws TooFewPairs when fewer than two pairs are given.
EvalReport evaluate(std::span<const PredictionPair> pairs);

/// predicted - actual per pair.
std::vector<double> error_column(std::span<const PredictionPair> pairs);

} // namespace adipredict
