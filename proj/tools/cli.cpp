#include "cli.hpp"

#include "adipredict/dataset.hpp"
#include "adipredict/error.hpp"
#include "adipredict/experiment.hpp"
#include "adipredict/fatmask.hpp"
#include "adipredict/fixed_models.hpp"
#include "adipredict/model_io.hpp"
#include "adipredict/synth.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace fs = std::filesystem;

namespace adipredict::cli {

namespace {

struct Config {
    // extract
    std::string images_dir;
    std::vector<std::string> metadata_files;
    double target_spacing_mm = 1.0;
    // synth
    std::size_t patients = 20;
    int min_slices = 40;
    int max_slices = 60;
    std::string synth_target = "green";
    std::string terms;
    double noise_sd = 100.0;
    // experiment
    std::string dataset;
    std::string task = "mediastinal-from-epicardial";
    std::vector<std::string> algorithms;
    std::size_t folds = 10;
    std::uint64_t seed = 1;
    double budget_s = 600.0;
    bool group_by_patient = false;
    std::size_t jobs = 1;
    bool timings = false;
    std::string out_dir;
    std::string name;
    std::string save_models;
    // predict / volume
    std::string model;
    std::string spacing = "1,1,1";
    bool clamp_nonnegative = false;
    std::string fat_class;
    std::optional<double> count;
    // shared
    std::string out;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw Error(ErrorCode::IoError, "cannot write " + path.string());
    }
    f << text;
}

void require_file(const std::string& path, const char* what)
{
    if (!fs::is_regular_file(path)) {
        throw UsageError(std::string(what) + " '" + path + "' does not exist");
    }
}

void require_parent(const std::string& path)
{
    const auto parent = fs::path(path).parent_path();
    if (!parent.empty() && !fs::is_directory(parent)) {
        throw UsageError("output directory '" + parent.string() + "' does not exist");
    }
}

VoxelSpacing parse_spacing(const std::string& text)
{
    VoxelSpacing s;
    char extra = 0;
    if (std::sscanf(text.c_str(), "%lf,%lf,%lf%c", &s.dx, &s.dy, &s.dz, &extra) != 3) {
        throw UsageError("spacing must be dx,dy,dz in millimeters, got '" + text + "'");
    }
    s.validate();
    return s;
}

std::uint64_t effective_seed(std::uint64_t flag_seed)
{
    if (const char* env = std::getenv("ADIPREDICT_SEED"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const auto v = std::strtoull(env, &end, 10);
        if (*end != '\0') {
            throw UsageError(std::string("ADIPREDICT_SEED is not an unsigned integer: '") + env + "'");
        }
        return v;
    }
    return flag_seed;
}

std::string file_stem_for(const std::string& algorithm)
{
    std::string s = algorithm;
    for (auto& c : s) {
        if (c == ':' || c == '=' || c == '/' || c == ',') {
            c = '_';
        }
    }
    return s;
}

int cmd_extract(const Config& cfg, std::ostream& out)
{
    if (!fs::is_directory(cfg.images_dir)) {
        throw UsageError("image directory '" + cfg.images_dir + "' does not exist");
    }
    for (const auto& m : cfg.metadata_files) {
        require_file(m, "metadata file");
    }
    require_parent(cfg.out);

    IngestOptions options;
    options.target_spacing_mm = cfg.target_spacing_mm;
    options.metadata_files.assign(cfg.metadata_files.begin(), cfg.metadata_files.end());
    const auto rows = ingest_directory(cfg.images_dir, options);
    save_counts_csv(rows, cfg.out);

    std::map<std::string, std::size_t> per_patient;
    for (const auto& r : rows) {
        ++per_patient[r.patient_id];
    }
    for (const auto& [patient, n] : per_patient) {
        out << patient << ": " << n << " slices\n";
    }
    out << "wrote " << rows.size() << " rows to " << cfg.out << '\n';
    return ExitOk;
}

int cmd_synth(const Config& cfg, std::ostream& out)
{
    require_parent(cfg.out);
    SynthOptions options;
    options.patients = cfg.patients;
    options.min_slices = cfg.min_slices;
    options.max_slices = cfg.max_slices;
    options.seed = effective_seed(cfg.seed);
    options.model.target = cfg.synth_target;
    options.model.noise_sd = cfg.noise_sd;
    if (!cfg.terms.empty()) {
        parse_affine_terms(cfg.terms, options.model);
    } else if (cfg.synth_target == "red") {
        for (auto& [name, w] : options.model.weights) {
            if (name == "red") {
                name = "green";
            }
        }
    }
    const auto rows = generate_synthetic(options);
    save_counts_csv(rows, cfg.out);
    out << "wrote " << rows.size() << " synthetic rows (" << cfg.patients << " patients) to " << cfg.out << '\n';
    return ExitOk;
}

Task require_task(const std::string& name)
{
    auto task = parse_task(name);
    if (!task) {
        throw UsageError("unknown task '" + name +
                         "'; valid: mediastinal-from-epicardial, epicardial-from-mediastinal, "
                         "mediastinal-unprocessed, epicardial-unprocessed");
    }
    return *task;
}

int cmd_experiment(const Config& cfg, std::ostream& out, std::ostream& err)
{
    require_file(cfg.dataset, "dataset");
    const Task task = require_task(cfg.task);

    ExperimentSpec spec;
    spec.task = task;
    spec.folds = cfg.folds;
    spec.seed = effective_seed(cfg.seed);
    spec.budget_s = cfg.budget_s;
    spec.group_by_patient = cfg.group_by_patient;
    spec.jobs = cfg.jobs;
    const auto names = cfg.algorithms.empty() ? default_algorithms() : cfg.algorithms;
    for (const auto& name : names) {
        try {
            spec.algorithms.push_back(parse_algorithm(name));
        } catch (const Error& e) {
            std::string valid;
            for (const auto& f : algorithm_families()) {
                valid += (valid.empty() ? "" : ", ") + f;
            }
            throw UsageError(std::string(e.what()) + "; valid algorithms: " + valid);
        }
    }
    spec.validate();

    fs::create_directories(cfg.out_dir);
    if (!cfg.save_models.empty()) {
        fs::create_directories(cfg.save_models);
    }

    const Dataset dataset = load_csv(cfg.dataset, task);
    const auto report = run_cv(dataset, spec);

    const std::string name = cfg.name.empty() ? std::string(to_string(task)) : cfg.name;
    const auto table = render_table(report, TableFormat::Text);
    std::ostringstream header;
    header << "# task: " << to_string(task) << ", instances: " << report.instances << ", folds: " << spec.folds
           << ", seed: " << spec.seed << ", budget_s: " << spec.budget_s
           << (spec.group_by_patient ? ", grouped by patient" : "") << ", build: " << report.build_tag << '\n';
    write_text(fs::path(cfg.out_dir) / (name + ".table.txt"), header.str() + table);
    write_text(fs::path(cfg.out_dir) / (name + ".report.csv"), render_report_csv(report, cfg.timings));
    out << header.str() << table;
    for (const auto& row : report.rows) {
        if (row.status != RowStatus::Ok) {
            err << row.algorithm << ": " << to_string(row.status) << ": " << row.message << '\n';
        }
    }

    if (!cfg.save_models.empty()) {
        const auto data = to_training_data(dataset);
        for (const auto& entry : spec.algorithms) {
            TrainConfig c = entry.config;
            c.seed = fold_seed(spec.seed, entry.name, spec.folds);
            const auto model = train(data, c, Deadline::after(std::chrono::duration<double>(spec.budget_s)));
            const auto path = fs::path(cfg.save_models) / (file_stem_for(entry.name) + ".model");
            save_model(model, path);
            out << "saved " << path.string() << '\n';
        }
    }
    return ExitOk;
}

int cmd_predict(const Config& cfg, std::ostream& out, std::ostream& err)
{
    require_file(cfg.dataset, "dataset");
    require_parent(cfg.out);
    const VoxelSpacing spacing = parse_spacing(cfg.spacing);

    std::vector<std::string> features;
    std::string target;
    std::function<double(std::span<const double>)> predictor;
    if (auto fixed = parse_fixed_equation(cfg.model); fixed && cfg.model.starts_with("fixed:")) {
        const auto& m = fixed_model(*fixed);
        features = m.feature_names;
        target = m.target_name;
        predictor = [&m](std::span<const double> x) { return m.predict(x); };
    } else {
        require_file(cfg.model, "model file");
        auto model = std::make_shared<const RegressionModel>(load_model(cfg.model));
        features = model->feature_names();
        target = model->target_name();
        predictor = [model](std::span<const double> x) { return model->predict(x); };
    }

    const auto rows = load_counts_csv(cfg.dataset);
    SliceCounts probe;
    for (const auto& f : features) {
        try {
            feature_value(probe, f);
        } catch (const Error&) {
            throw UsageError("model feature '" + f + "' is not a dataset column");
        }
    }
    bool has_actual = true;
    try {
        feature_value(probe, target);
    } catch (const Error&) {
        has_actual = false;
    }

    const double voxel = counts_to_volume(1.0, spacing);
    double total_volume = 0.0;
    std::size_t negatives = 0;
    std::ostringstream csv;
    csv << "patient_id,slice_index,raw_prediction,prediction" << (has_actual ? ",actual" : "") << '\n';
    std::vector<double> x(features.size());
    for (const auto& r : rows) {
        for (std::size_t j = 0; j < features.size(); ++j) {
            x[j] = feature_value(r, features[j]);
        }
        const double raw = predictor(x);
        const double value = cfg.clamp_nonnegative ? std::max(0.0, raw) : raw;
        negatives += value < 0.0 ? 1 : 0;
        total_volume += value * voxel;
        char buf[96];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g", raw, value);
        csv << r.patient_id << ',' << r.slice_index << ',' << buf;
        if (has_actual) {
            std::snprintf(buf, sizeof buf, ",%.17g", feature_value(r, target));
            csv << buf;
        }
        csv << '\n';
    }
    char total[64];
    std::snprintf(total, sizeof total, "%.17g", total_volume);
    csv << "# total_volume_mm3: " << total << '\n';
    write_text(cfg.out, csv.str());

    if (negatives > 0) {
        err << "warning: " << negatives << " negative predictions kept (use --clamp-nonnegative to clip)\n";
    }
    out << "predicted " << rows.size() << " slices with " << cfg.model << '\n';
    out << "total_volume_mm3 " << total << '\n';
    return ExitOk;
}

int cmd_volume(const Config& cfg, std::ostream& out)
{
    const VoxelSpacing spacing = parse_spacing(cfg.spacing);
    if (cfg.count) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", counts_to_volume(*cfg.count, spacing));
        out << buf << '\n';
        return ExitOk;
    }
    if (cfg.dataset.empty()) {
        throw UsageError("volume needs --count or --dataset");
    }
    require_file(cfg.dataset, "dataset");
    const auto rows = load_counts_csv(cfg.dataset);
    std::map<std::string, double> per_patient;
    double total = 0.0;
    for (const auto& r : rows) {
        const double v = counts_to_volume(feature_value(r, cfg.fat_class), spacing);
        per_patient[r.patient_id] += v;
        total += v;
    }
    out << "patient_id,volume_mm3\n";
    char buf[64];
    for (const auto& [patient, v] : per_patient) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << patient << ',' << buf << '\n';
    }
    std::snprintf(buf, sizeof buf, "%.17g", total);
    out << "total," << buf << '\n';
    return ExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Config cfg;
    CLI::App app{"Cardiac fat quantity extraction, regression benchmarks and fixed-model prediction"};
    app.name(args.empty() ? "adipredict" : fs::path(args[0]).filename().string());
    app.require_subcommand(1);

    auto* extract = app.add_subcommand("extract", "Count mask classes in <images>/<patient>/<slice>.png");
    extract->add_option("--images", cfg.images_dir, "Root directory of patient folders")->required();
    extract->add_option("--metadata", cfg.metadata_files,
                        "Metadata CSV(s): patient_id,images_qnt,dx_mm,dy_mm,dz_mm "
                        "(<patient>/metadata.csv is also read)");
    extract->add_option("--target-spacing", cfg.target_spacing_mm, "In-plane spacing to standardize to (mm)")
        ->capture_default_str();
    extract->add_option("--out", cfg.out, "Dataset CSV to write")->required();

    auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset from an affine model plus noise");
    synth->add_option("--out", cfg.out, "Dataset CSV to write")->required();
    synth->add_option("--patients", cfg.patients)->capture_default_str();
    synth->add_option("--min-slices", cfg.min_slices)->capture_default_str();
    synth->add_option("--max-slices", cfg.max_slices)->capture_default_str();
    synth->add_option("--target", cfg.synth_target, "Column produced by the model")
        ->check(CLI::IsMember({"green", "red"}))
        ->capture_default_str();
    synth->add_option("--terms", cfg.terms, "Model terms, e.g. bias=20000,red=0.8,black=-0.02");
    synth->add_option("--noise-sd", cfg.noise_sd, "Gaussian noise standard deviation")->capture_default_str();
    synth->add_option("--seed", cfg.seed, "Random seed (ADIPREDICT_SEED overrides)")->capture_default_str();

    auto* experiment = app.add_subcommand("experiment", "Cross-validate regression algorithms on a dataset");
    experiment->add_option("--dataset", cfg.dataset, "Dataset CSV")->required();
    experiment->add_option("--task", cfg.task)->capture_default_str();
    experiment->add_option("--algorithms", cfg.algorithms, "Comma-separated, e.g. linear,knn:k=3")->delimiter(',');
    experiment->add_option("--folds", cfg.folds)->capture_default_str();
    experiment->add_option("--seed", cfg.seed, "Master seed (ADIPREDICT_SEED overrides)")->capture_default_str();
    experiment->add_option("--budget-s", cfg.budget_s, "Per-algorithm time budget in seconds")->capture_default_str();
    experiment->add_flag("--group-by-patient", cfg.group_by_patient, "Keep each patient's slices in one fold");
    experiment->add_option("--jobs", cfg.jobs, "Algorithms evaluated concurrently")->capture_default_str();
    experiment->add_flag("--timings", cfg.timings, "Record wall-clock times in the report CSV");
    experiment->add_option("--out-dir", cfg.out_dir, "Directory for <name>.table.txt and <name>.report.csv")
        ->required();
    experiment->add_option("--name", cfg.name, "Report base name (default: the task)");
    experiment->add_option("--save-models", cfg.save_models, "Also fit each algorithm on all rows and save it here");

    auto* predict = app.add_subcommand("predict", "Apply fixed:eq8|fixed:eq9|fixed:eq10 or a saved model");
    predict->add_option("--model", cfg.model, "fixed:eqN or a model file")->required();
    predict->add_option("--dataset", cfg.dataset, "Dataset CSV")->required();
    predict->add_option("--spacing", cfg.spacing, "Voxel spacing dx,dy,dz (mm) of the counts")->capture_default_str();
    predict->add_flag("--clamp-nonnegative", cfg.clamp_nonnegative, "Clip negative predictions to 0");
    predict->add_option("--out", cfg.out, "Per-slice prediction CSV")->required();

    auto* volume = app.add_subcommand("volume", "Convert pixel counts to cubic millimeters");
    auto* count_opt = volume->add_option("--count", cfg.count, "A single pixel count");
    auto* dataset_opt = volume->add_option("--dataset", cfg.dataset, "Dataset CSV (per-patient volumes)");
    count_opt->excludes(dataset_opt);
    volume->add_option("--class", cfg.fat_class, "Column to convert")
        ->check(CLI::IsMember({"red", "green", "blue", "grey", "black", "grey_total"}))
        ->default_val("red");
    volume->add_option("--spacing", cfg.spacing, "Voxel spacing dx,dy,dz (mm)")->capture_default_str();

    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ExitOk : ExitUsage;
    }

    try {
        if (*extract) return cmd_extract(cfg, out);
        if (*synth) return cmd_synth(cfg, out);
        if (*experiment) return cmd_experiment(cfg, out, err);
        if (*predict) return cmd_predict(cfg, out, err);
        if (*volume) return cmd_volume(cfg, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return ExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return ExitUsage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return ExitInternal;
    }
    return ExitUsage;
}

} // namespace adipredict::cli
