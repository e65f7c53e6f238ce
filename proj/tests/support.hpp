#pragma once

// Helpers shared by the unit and acceptance tests. The statistics here are
// written out longhand so they can act as oracles for src/metrics.cpp.

#include "adipredict/dataset.hpp"
#include "adipredict/metrics.hpp"
#include "adipredict/random.hpp"
#include "adipredict/regressors.hpp"

#include <cmath>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace testsupport {

inline double naive_pearson(const std::vector<double>& a, const std::vector<double>& b)
{
    const double n = double(a.size());
    double sa = 0, sb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sa += a[i];
        sb += b[i];
    }
    const double ma = sa / n;
    const double mb = sb / n;
    double cov = 0, va = 0, vb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cov += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    return cov / std::sqrt(va * vb);
}

inline double pooled_rho(const adipredict::PredictionSet& pairs)
{
    std::vector<double> p, a;
    for (const auto& pr : pairs) {
        p.push_back(pr.predicted);
        a.push_back(pr.actual);
    }
    return naive_pearson(p, a);
}

struct OracleMetrics {
    double rho, mae, rmse, rae_pct, rrse_pct;
};

/// Textbook definitions evaluated in long double.
inline OracleMetrics oracle_metrics(const adipredict::PredictionSet& pairs)
{
    using ld = long double;
    const ld n = ld(pairs.size());
    ld mp = 0, ma = 0;
    for (const auto& p : pairs) {
        mp += p.predicted;
        ma += p.actual;
    }
    mp /= n;
    ma /= n;
    ld cov = 0, vp = 0, va = 0, abs_e = 0, sq_e = 0, abs_d = 0;
    for (const auto& p : pairs) {
        cov += (p.predicted - mp) * (p.actual - ma);
        vp += (p.predicted - mp) * (p.predicted - mp);
        va += (p.actual - ma) * (p.actual - ma);
        abs_e += std::fabs(ld(p.predicted) - p.actual);
        sq_e += (ld(p.predicted) - p.actual) * (ld(p.predicted) - p.actual);
        abs_d += std::fabs(ld(p.actual) - ma);
    }
    return {double(cov / std::sqrt(vp * va)), double(abs_e / n), double(std::sqrt(sq_e / n)),
            double(100 * abs_e / abs_d), double(100 * std::sqrt(sq_e / va))};
}

inline bool rel_close(double got, double want, double tol)
{
    return std::fabs(got - want) <= tol * std::max(std::fabs(want), 1e-300);
}

/// Random prediction set of size n: actuals with a random scale and offset,
/// predictions correlated with them to a random degree.
inline adipredict::PredictionSet random_pairs(adipredict::Rng& rng, std::size_t n)
{
    const double scale = std::pow(10.0, rng.uniform(-2, 5));
    const double offset = rng.uniform(-1, 1) * scale * 3;
    const double noise = rng.uniform(0.01, 2.0);
    adipredict::PredictionSet pairs(n);
    for (auto& p : pairs) {
        p.actual = offset + scale * rng.normal();
        p.predicted = p.actual + noise * scale * rng.normal();
    }
    return pairs;
}

/// n rows of `p` features drawn from U(lo, hi) with target f(row).
inline adipredict::TrainingData make_data(std::size_t n, std::size_t p, double lo, double hi, std::uint64_t seed,
                                          const std::function<double(const Eigen::VectorXd&)>& f)
{
    adipredict::Rng rng(seed);
    adipredict::TrainingData d;
    d.x.resize(Eigen::Index(n), Eigen::Index(p));
    d.y.resize(Eigen::Index(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            d.x(Eigen::Index(i), Eigen::Index(j)) = rng.uniform(lo, hi);
        }
        d.y(Eigen::Index(i)) = f(d.x.row(Eigen::Index(i)).transpose());
    }
    for (std::size_t j = 0; j < p; ++j) {
        d.feature_names.push_back("x" + std::to_string(j + 1));
    }
    d.target_name = "y";
    return d;
}

inline adipredict::TrainingData subset(const adipredict::TrainingData& d, const std::vector<std::size_t>& rows)
{
    adipredict::TrainingData s;
    s.x.resize(Eigen::Index(rows.size()), d.x.cols());
    s.y.resize(Eigen::Index(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        s.x.row(Eigen::Index(i)) = d.x.row(Eigen::Index(rows[i]));
        s.y(Eigen::Index(i)) = d.y(Eigen::Index(rows[i]));
    }
    s.feature_names = d.feature_names;
    s.target_name = d.target_name;
    return s;
}

/// k-fold CV on raw training data; held-out predictions pooled in row order.
inline adipredict::PredictionSet pooled_cv(const adipredict::TrainingData& d, adipredict::TrainConfig cfg,
                                           std::size_t k, std::uint64_t seed)
{
    const auto plan = adipredict::split_folds(d.size(), k, seed);
    adipredict::PredictionSet pairs(d.size());
    for (std::size_t fold = 0; fold < k; ++fold) {
        cfg.seed = adipredict::derive_seed(seed, fold);
        const auto model = adipredict::train(subset(d, plan.train_indices(fold)), cfg);
        for (auto i : plan.test_indices(fold)) {
            std::vector<double> x(d.feature_count());
            for (std::size_t j = 0; j < d.feature_count(); ++j) {
                x[j] = d.x(Eigen::Index(i), Eigen::Index(j));
            }
            pairs[i] = {model.predict(x), d.y(Eigen::Index(i))};
        }
    }
    return pairs;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("adipredict_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace testsupport
