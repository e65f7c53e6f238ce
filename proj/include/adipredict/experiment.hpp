#pragma once

#include "adipredict/dataset.hpp"
#include "adipredict/metrics.hpp"
#include "adipredict/regressors.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace adipredict {

using PredictFn = std::function<double(std::span<const double>)>;
using FitFn = std::function<PredictFn(const TrainingData&, std::uint64_t seed, const Deadline&)>;

/// One algorithm of a benchmark. When `fit` is set it replaces training from
/// `config` (used for custom learners and test doubles).
struct AlgorithmEntry {
    std::string name;
    TrainConfig config;
    FitFn fit;
};

/// Parses `family[:key=value]...`, e.g. "knn:k=3" or "rotation-mlp:iterations=5:hidden=8".
/// Families: linear, knn, tree, forest, mlp, rotation-mlp, rotation-forest,
/// rotation-tree, rotation-linear, rotation-knn. Throws UnknownName for an
/// unknown family or key and InvalidConfig for a bad value.
AlgorithmEntry parse_algorithm(std::string_view text);
std::vector<std::string> algorithm_families();

/// The algorithms run when none are named.
std::vector<std::string> default_algorithms();

struct ExperimentSpec {
    Task task = Task::MediastinalFromEpicardial;
    std::vector<AlgorithmEntry> algorithms;
    std::size_t folds = 10;
    std::uint64_t seed = 1;
    double budget_s = 600.0; // per algorithm, training plus held-out prediction
    bool group_by_patient = false;
    std::size_t jobs = 1; // algorithms evaluated concurrently

    void validate() const;
};

enum class RowStatus { Ok, TimedOut, Failed };

std::string_view to_string(RowStatus status) noexcept;

struct RankingRow {
    std::string algorithm;
    RowStatus status = RowStatus::Ok;
    std::optional<EvalReport> eval; // present only for Ok rows
    double train_ms = 0.0;
    double eval_ms = 0.0;
    std::string message; // failure detail
};

struct RankingReport {
    std::vector<RankingRow> rows; // sorted by rho descending, undefined last
    Task task = Task::MediastinalFromEpicardial;
    std::size_t instances = 0;
    std::size_t folds = 0;
    std::uint64_t seed = 0;
    double budget_s = 0.0;
    bool group_by_patient = false;
    std::string build_tag;
};

/// Seed handed to `algorithm` when training on all folds but `fold`.
std::uint64_t fold_seed(std::uint64_t master_seed, std::string_view algorithm, std::size_t fold);

/// k-fold cross-validation of every algorithm; held-out predictions from all
/// folds are pooled and scored once. A timed-out or failing algorithm gets a
/// status row and never stops the others. Throws EmptyDataset.
RankingReport run_cv(const Dataset& dataset, const ExperimentSpec& spec);

/// Orders rows by rho descending (undefined last), ties by lower RRSE.
void sort_rows(std::vector<RankingRow>& rows);

enum class TableFormat { Csv, Text };

/// Display table: algorithm, rho, mae, rmse, rae_pct, rrse_pct, status at
/// four decimals.
std::string render_table(const RankingReport& report, TableFormat format);

/// Full-precision report: '#' header lines echo the run parameters, then
/// algorithm, rho, mae, rmse, rae_pct, rrse_pct, status, train_ms, eval_ms.
/// Timing columns hold "NA" unless `with_timings`, keeping reruns byte-identical.
std::string render_report_csv(const RankingReport& report, bool with_timings = false);
RankingReport parse_report_csv(std::string_view text);

/// `git describe` of the source tree at configure time.
std::string_view build_tag() noexcept;

} // namespace adipredict
