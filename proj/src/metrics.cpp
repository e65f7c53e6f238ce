#include "adipredict/metrics.hpp"

#include "adipredict/error.hpp"

#include <algorithm>
#include <cmath>

namespace adipredict {

std::string_view to_string(EvalStatus status) noexcept
{
    switch (status) {
    case EvalStatus::Ok: return "Ok";
    case EvalStatus::RhoUndefined: return "RhoUndefined";
    case EvalStatus::DenominatorZero: return "DenominatorZero";
    }
    return "?";
}

EvalReport evaluate(std::span<const PredictionPair> pairs)
{
    const std::size_t n = pairs.size();
    if (n < 2) {
        throw Error(ErrorCode::TooFewPairs, "need at least two prediction pairs, got " + std::to_string(n));
    }

    double sum_a = 0.0;
    double sum_b = 0.0;
    for (const auto& p : pairs) {
        sum_a += p.predicted;
        sum_b += p.actual;
    }
    const double mean_a = sum_a / double(n);
    const double mean_b = sum_b / double(n);

    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    double abs_err = 0.0;
    double sq_err = 0.0;
    double abs_dev = 0.0;
    for (const auto& p : pairs) {
        const double da = p.predicted - mean_a;
        const double db = p.actual - mean_b;
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
        const double e = p.predicted - p.actual;
        abs_err += std::abs(e);
        sq_err += e * e;
        abs_dev += std::abs(mean_b - p.actual);
    }

    // Constancy is decided on the raw values: a computed mean can differ from
    // the common value by an ulp, leaving spurious non-zero deviations.
    auto constant = [&](auto member) {
        const double first = pairs.front().*member;
        return std::all_of(pairs.begin(), pairs.end(), [&](const PredictionPair& p) { return p.*member == first; });
    };
    const bool actual_constant = constant(&PredictionPair::actual);
    const bool predicted_constant = constant(&PredictionPair::predicted);

    EvalReport r;
    r.n = n;
    r.mae = abs_err / double(n);
    r.rmse = std::sqrt(sq_err / double(n));
    if (actual_constant) {
        r.status = EvalStatus::DenominatorZero;
        return r;
    }
    r.rae_pct = 100.0 * abs_err / abs_dev;
    r.rrse_pct = 100.0 * std::sqrt(sq_err / syy);
    if (predicted_constant) {
        r.status = EvalStatus::RhoUndefined;
        return r;
    }
    r.rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    return r;
}

std::vector<double> error_column(std::span<const PredictionPair> pairs)
{
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) {
        out.push_back(p.predicted - p.actual);
    }
    return out;
}

} // namespace adipredict
