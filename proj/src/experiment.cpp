#include "adipredict/experiment.hpp"

#include "adipredict/error.hpp"
#include "adipredict/random.hpp"

#include "csv.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>
#include <thread>

#ifndef ADIPREDICT_BUILD_TAG
#define ADIPREDICT_BUILD_TAG "unknown"
#endif

namespace adipredict {

namespace {

const std::vector<std::pair<std::string_view, Algorithm>> rotation_bases{
    {"rotation-mlp", Algorithm::Mlp},       {"rotation-forest", Algorithm::Forest},
    {"rotation-tree", Algorithm::Tree},     {"rotation-linear", Algorithm::Linear},
    {"rotation-knn", Algorithm::Knn},
};

std::size_t parse_size(std::string_view key, std::string_view value)
{
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size() || value.empty()) {
        throw Error(ErrorCode::InvalidConfig, std::string(key) + " expects a non-negative integer, got '" +
                                                  std::string(value) + "'");
    }
    return v;
}

double parse_real(std::string_view key, std::string_view value)
{
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size() || value.empty()) {
        throw Error(ErrorCode::InvalidConfig, std::string(key) + " expects a number, got '" + std::string(value) +
                                                  "'");
    }
    return v;
}

void apply_option(TrainConfig& cfg, std::string_view key, std::string_view value)
{
    if (key == "k") cfg.knn.k = parse_size(key, value);
    else if (key == "min_leaf") cfg.tree.min_leaf = parse_size(key, value);
    else if (key == "max_depth") cfg.tree.max_depth = parse_size(key, value);
    else if (key == "trees") cfg.forest.trees = parse_size(key, value);
    else if (key == "bootstrap") cfg.forest.bootstrap = parse_size(key, value) != 0;
    else if (key == "bag") cfg.forest.bag_fraction = parse_real(key, value);
    else if (key == "mtry") cfg.forest.features_per_split = parse_size(key, value);
    else if (key == "hidden") cfg.mlp.hidden = parse_size(key, value);
    else if (key == "epochs") cfg.mlp.epochs = parse_size(key, value);
    else if (key == "lr") cfg.mlp.learning_rate = parse_real(key, value);
    else if (key == "iterations") cfg.rotation.iterations = parse_size(key, value);
    else if (key == "subset") cfg.rotation.subset_size = parse_size(key, value);
    else if (key == "sample") cfg.rotation.sample_fraction = parse_real(key, value);
    else if (key == "ridge") cfg.ridge = parse_real(key, value);
    else throw Error(ErrorCode::UnknownName, "unknown algorithm option '" + std::string(key) + "'");
}

double elapsed_ms(std::chrono::steady_clock::time_point since)
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

PredictFn fit_from_config(const TrainingData& data, const TrainConfig& cfg, std::uint64_t seed,
                          const Deadline& deadline)
{
    TrainConfig seeded = cfg;
    seeded.seed = seed;
    auto model = std::make_shared<const RegressionModel>(train(data, seeded, deadline));
    return [model](std::span<const double> x) { return model->predict(x); };
}

RankingRow evaluate_algorithm(const Dataset& dataset, const FoldPlan& plan, const AlgorithmEntry& entry,
                              const ExperimentSpec& spec)
{
    using Clock = std::chrono::steady_clock;
    RankingRow row;
    row.algorithm = entry.name;
    const auto deadline = Deadline::after(std::chrono::duration<double>(spec.budget_s));

    PredictionSet pairs(dataset.size());
    try {
        for (std::size_t fold = 0; fold < plan.k; ++fold) {
            const auto train_idx = plan.train_indices(fold);
            const auto test_idx = plan.test_indices(fold);
            const auto training = to_training_data(dataset, train_idx);
            const auto seed = fold_seed(spec.seed, entry.name, fold);

            auto t0 = Clock::now();
            PredictFn predictor = entry.fit ? entry.fit(training, seed, deadline)
                                            : fit_from_config(training, entry.config, seed, deadline);
            row.train_ms += elapsed_ms(t0);
            deadline.check();

            t0 = Clock::now();
            for (auto i : test_idx) {
                const auto& inst = dataset.instances()[i];
                pairs[i] = {predictor(inst.features), inst.target};
            }
            row.eval_ms += elapsed_ms(t0);
            deadline.check();
        }
        const auto t0 = Clock::now();
        row.eval = evaluate(pairs);
        row.eval_ms += elapsed_ms(t0);
    } catch (const Error& e) {
        row.eval.reset();
        row.status = e.code() == ErrorCode::BudgetExceeded ? RowStatus::TimedOut : RowStatus::Failed;
        row.message = e.what();
    } catch (const std::exception& e) {
        row.eval.reset();
        row.status = RowStatus::Failed;
        row.message = e.what();
    }
    return row;
}

std::string fixed4(const std::optional<double>& v)
{
    if (!v || std::isnan(*v)) {
        return "NA";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", *v);
    return buf;
}

std::string row_status(const RankingRow& row)
{
    if (row.status == RowStatus::Ok && row.eval) {
        return std::string(to_string(row.eval->status));
    }
    return std::string(to_string(row.status));
}

} // namespace

std::vector<std::string> algorithm_families()
{
    std::vector<std::string> out{"linear", "knn", "tree", "forest", "mlp"};
    for (const auto& [name, base] : rotation_bases) {
        out.emplace_back(name);
    }
    return out;
}

std::vector<std::string> default_algorithms()
{
    return {"linear", "knn", "tree", "forest", "mlp", "rotation-mlp", "rotation-forest"};
}

AlgorithmEntry parse_algorithm(std::string_view text)
{
    AlgorithmEntry entry;
    entry.name = std::string(text);

    const auto colon = text.find(':');
    const auto family = text.substr(0, colon);
    auto& cfg = entry.config;
    if (family == "linear") cfg.algorithm = Algorithm::Linear;
    else if (family == "knn") cfg.algorithm = Algorithm::Knn;
    else if (family == "tree") cfg.algorithm = Algorithm::Tree;
    else if (family == "forest") cfg.algorithm = Algorithm::Forest;
    else if (family == "mlp") cfg.algorithm = Algorithm::Mlp;
    else {
        auto it = std::find_if(rotation_bases.begin(), rotation_bases.end(),
                               [&](const auto& rb) { return rb.first == family; });
        if (it == rotation_bases.end()) {
            throw Error(ErrorCode::UnknownName, "unknown algorithm '" + std::string(family) + "'");
        }
        cfg.algorithm = Algorithm::Rotation;
        cfg.rotation.base = it->second;
    }

    auto rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
    while (!rest.empty()) {
        const auto next = rest.find(':');
        const auto option = rest.substr(0, next);
        rest = next == std::string_view::npos ? std::string_view{} : rest.substr(next + 1);
        const auto eq = option.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorCode::InvalidConfig, "algorithm option '" + std::string(option) + "' needs key=value");
        }
        apply_option(cfg, option.substr(0, eq), option.substr(eq + 1));
    }
    cfg.validate();
    return entry;
}

void ExperimentSpec::validate() const
{
    if (folds < 2) {
        throw Error(ErrorCode::InvalidFoldCount, "need at least two folds");
    }
    if (!(budget_s > 0.0)) {
        throw Error(ErrorCode::InvalidConfig, "time budget must be > 0");
    }
    if (algorithms.empty()) {
        throw Error(ErrorCode::InvalidConfig, "no algorithms to run");
    }
}

std::string_view to_string(RowStatus status) noexcept
{
    switch (status) {
    case RowStatus::Ok: return "Ok";
    case RowStatus::TimedOut: return "TimedOut";
    case RowStatus::Failed: return "Failed";
    }
    return "?";
}

std::uint64_t fold_seed(std::uint64_t master_seed, std::string_view algorithm, std::size_t fold)
{
    return derive_seed(master_seed ^ fnv1a(algorithm), fold);
}

void sort_rows(std::vector<RankingRow>& rows)
{
    auto rho = [](const RankingRow& r) -> std::optional<double> { return r.eval ? r.eval->rho : std::nullopt; };
    auto rrse = [](const RankingRow& r) -> std::optional<double> { return r.eval ? r.eval->rrse_pct : std::nullopt; };
    std::stable_sort(rows.begin(), rows.end(), [&](const RankingRow& a, const RankingRow& b) {
        const auto ra = rho(a);
        const auto rb = rho(b);
        if (ra.has_value() != rb.has_value()) {
            return ra.has_value();
        }
        if (ra && *ra != *rb) {
            return *ra > *rb;
        }
        const auto ea = rrse(a);
        const auto eb = rrse(b);
        if (ea.has_value() != eb.has_value()) {
            return ea.has_value();
        }
        return ea && *ea < *eb;
    });
}

RankingReport run_cv(const Dataset& dataset, const ExperimentSpec& spec)
{
    spec.validate();
    if (dataset.size() == 0) {
        throw Error(ErrorCode::EmptyDataset, "dataset has no instances");
    }
    const Dataset retargeted = dataset.task() == spec.task ? dataset : Dataset(spec.task, dataset.rows());

    FoldPlan plan;
    if (spec.group_by_patient) {
        std::vector<std::string> ids;
        for (const auto& inst : retargeted.instances()) {
            ids.push_back(inst.patient_id);
        }
        plan = split_folds_grouped(ids, spec.folds, spec.seed);
    } else {
        plan = split_folds(retargeted.size(), spec.folds, spec.seed);
    }

    RankingReport report;
    report.task = spec.task;
    report.instances = retargeted.size();
    report.folds = spec.folds;
    report.seed = spec.seed;
    report.budget_s = spec.budget_s;
    report.group_by_patient = spec.group_by_patient;
    report.build_tag = std::string(build_tag());
    report.rows.resize(spec.algorithms.size());

    // Rows land in their own slots; randomness comes from per-row seeds, so
    // the result does not depend on the number of workers.
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < spec.algorithms.size(); i = next++) {
            report.rows[i] = evaluate_algorithm(retargeted, plan, spec.algorithms[i], spec);
        }
    };
    const auto workers = std::clamp<std::size_t>(spec.jobs, 1, spec.algorithms.size());
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
    }

    sort_rows(report.rows);
    return report;
}

std::string render_table(const RankingReport& report, TableFormat format)
{
    static const std::vector<std::string> header{"algorithm", "rho", "mae", "rmse", "rae_pct", "rrse_pct", "status"};
    std::vector<std::vector<std::string>> cells;
    for (const auto& row : report.rows) {
        std::vector<std::string> line{row.algorithm};
        if (row.eval) {
            const auto& e = *row.eval;
            line.push_back(fixed4(e.rho));
            line.push_back(fixed4(e.mae));
            line.push_back(fixed4(e.rmse));
            line.push_back(fixed4(e.rae_pct));
            line.push_back(fixed4(e.rrse_pct));
        } else {
            line.insert(line.end(), 5, "NA");
        }
        line.push_back(row_status(row));
        cells.push_back(std::move(line));
    }

    std::ostringstream out;
    if (format == TableFormat::Csv) {
        for (std::size_t c = 0; c < header.size(); ++c) {
            out << (c ? "," : "") << header[c];
        }
        out << '\n';
        for (const auto& line : cells) {
            for (std::size_t c = 0; c < line.size(); ++c) {
                out << (c ? "," : "") << line[c];
            }
            out << '\n';
        }
        return out.str();
    }

    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
        width[c] = header[c].size();
        for (const auto& line : cells) {
            width[c] = std::max(width[c], line[c].size());
        }
    }
    auto emit = [&](const std::vector<std::string>& line) {
        for (std::size_t c = 0; c < line.size(); ++c) {
            const bool numeric = c >= 1 && c <= 5;
            if (c) {
                out << "  ";
            }
            if (numeric) {
                out << std::setw(int(width[c])) << std::right << line[c];
            } else if (c + 1 == line.size()) {
                out << line[c];
            } else {
                out << std::setw(int(width[c])) << std::left << line[c];
            }
        }
        out << '\n';
    };
    emit(header);
    for (const auto& line : cells) {
        emit(line);
    }
    return out.str();
}

std::string render_report_csv(const RankingReport& report, bool with_timings)
{
    std::ostringstream out;
    out << "# task: " << to_string(report.task) << '\n';
    out << "# instances: " << report.instances << '\n';
    out << "# folds: " << report.folds << '\n';
    out << "# seed: " << report.seed << '\n';
    out << "# budget_s: " << csv::format_exact(report.budget_s) << '\n';
    out << "# group_by_patient: " << (report.group_by_patient ? 1 : 0) << '\n';
    out << "# build: " << report.build_tag << '\n';
    out << "algorithm,rho,mae,rmse,rae_pct,rrse_pct,status,train_ms,eval_ms\n";
    auto opt = [](const std::optional<double>& v) { return v ? csv::format_exact(*v) : std::string("NA"); };
    for (const auto& row : report.rows) {
        out << row.algorithm << ',';
        if (row.eval) {
            const auto& e = *row.eval;
            out << opt(e.rho) << ',' << csv::format_exact(e.mae) << ',' << csv::format_exact(e.rmse) << ','
                << opt(e.rae_pct) << ',' << opt(e.rrse_pct) << ',';
        } else {
            out << "NA,NA,NA,NA,NA,";
        }
        out << row_status(row) << ',';
        if (with_timings) {
            out << csv::format_exact(row.train_ms) << ',' << csv::format_exact(row.eval_ms);
        } else {
            out << "NA,NA";
        }
        out << '\n';
    }
    return out.str();
}

RankingReport parse_report_csv(std::string_view text)
{
    RankingReport report;
    // Header comments first; csv::parse skips them.
    std::istringstream lines{std::string(text)};
    std::string line;
    while (std::getline(lines, line)) {
        if (!line.starts_with("# ")) {
            continue;
        }
        const auto colon = line.find(": ");
        if (colon == std::string::npos) {
            continue;
        }
        const auto key = line.substr(2, colon - 2);
        const auto value = line.substr(colon + 2);
        if (key == "task") {
            if (auto t = parse_task(value)) {
                report.task = *t;
            }
        } else if (key == "instances") {
            report.instances = std::stoull(value);
        } else if (key == "folds") {
            report.folds = std::stoull(value);
        } else if (key == "seed") {
            report.seed = std::stoull(value);
        } else if (key == "budget_s") {
            report.budget_s = std::stod(value);
        } else if (key == "group_by_patient") {
            report.group_by_patient = value == "1";
        } else if (key == "build") {
            report.build_tag = value;
        }
    }

    const auto rows = csv::parse(text);
    if (rows.empty()) {
        throw Error(ErrorCode::ParseError, "report has no header row");
    }
    csv::expect_header(rows.front(), {"algorithm", "rho", "mae", "rmse", "rae_pct", "rrse_pct", "status", "train_ms",
                                      "eval_ms"});
    auto opt = [](double v) { return std::isnan(v) ? std::nullopt : std::optional<double>(v); };
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.fields.size() != 9) {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(r.line) + ": expected 9 fields");
        }
        RankingRow row;
        row.algorithm = r.fields[0];
        const auto& status = r.fields[6];
        if (status == "TimedOut") {
            row.status = RowStatus::TimedOut;
        } else if (status == "Failed") {
            row.status = RowStatus::Failed;
        } else {
            EvalReport e;
            e.rho = opt(csv::to_double(r, 1, "rho"));
            e.mae = csv::to_double(r, 2, "mae");
            e.rmse = csv::to_double(r, 3, "rmse");
            e.rae_pct = opt(csv::to_double(r, 4, "rae_pct"));
            e.rrse_pct = opt(csv::to_double(r, 5, "rrse_pct"));
            e.n = report.instances;
            if (status == "Ok") e.status = EvalStatus::Ok;
            else if (status == "RhoUndefined") e.status = EvalStatus::RhoUndefined;
            else if (status == "DenominatorZero") e.status = EvalStatus::DenominatorZero;
            else throw Error(ErrorCode::ParseError, "line " + std::to_string(r.line) + ": unknown status '" + status + "'");
            row.eval = e;
        }
        const double train_ms = csv::to_double(r, 7, "train_ms");
        const double eval_ms = csv::to_double(r, 8, "eval_ms");
        row.train_ms = std::isnan(train_ms) ? 0.0 : train_ms;
        row.eval_ms = std::isnan(eval_ms) ? 0.0 : eval_ms;
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::string_view build_tag() noexcept
{
    return ADIPREDICT_BUILD_TAG;
}

} // namespace adipredict
