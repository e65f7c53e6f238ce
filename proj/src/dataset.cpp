#include "adipredict/dataset.hpp"

#include "adipredict/error.hpp"
#include "adipredict/random.hpp"

#include "csv.hpp"

#include <array>
#include <fstream>
#include <map>
#include <sstream>

namespace adipredict {

namespace {

constexpr std::array<std::pair<Task, std::string_view>, 4> task_names{{
    {Task::MediastinalFromEpicardial, "mediastinal-from-epicardial"},
    {Task::EpicardialFromMediastinal, "epicardial-from-mediastinal"},
    {Task::MediastinalUnprocessed, "mediastinal-unprocessed"},
    {Task::EpicardialUnprocessed, "epicardial-unprocessed"},
}};

const std::vector<std::string_view> counts_header{"patient_id", "slice_index", "images_qnt", "red",
                                                  "green",      "blue",        "grey",       "black"};

} // namespace

std::string_view to_string(Task task) noexcept
{
    for (const auto& [t, name] : task_names) {
        if (t == task) {
            return name;
        }
    }
    return "?";
}

std::optional<Task> parse_task(std::string_view name) noexcept
{
    for (const auto& [t, n] : task_names) {
        if (n == name) {
            return t;
        }
    }
    return std::nullopt;
}

std::vector<std::string> task_feature_names(Task task)
{
    switch (task) {
    case Task::MediastinalFromEpicardial:
        return {"red", "blue", "grey", "black", "slice_index", "images_qnt"};
    case Task::EpicardialFromMediastinal:
        return {"green", "blue", "grey", "black", "slice_index", "images_qnt"};
    case Task::MediastinalUnprocessed:
    case Task::EpicardialUnprocessed:
        return {"grey_total", "black", "slice_index", "images_qnt"};
    }
    return {};
}

std::string task_target_name(Task task)
{
    switch (task) {
    case Task::MediastinalFromEpicardial:
    case Task::MediastinalUnprocessed:
        return "green";
    case Task::EpicardialFromMediastinal:
    case Task::EpicardialUnprocessed:
        return "red";
    }
    return {};
}

double feature_value(const SliceCounts& c, std::string_view name)
{
    if (name == "red") return c.red;
    if (name == "green") return c.green;
    if (name == "blue") return c.blue;
    if (name == "grey") return c.grey;
    if (name == "black") return c.black;
    if (name == "grey_total") return c.grey + c.red + c.green + c.blue;
    if (name == "slice_index") return c.slice_index;
    if (name == "images_qnt") return c.images_qnt;
    throw Error(ErrorCode::UnknownName, "unknown slice quantity '" + std::string(name) + "'");
}

Dataset::Dataset(Task task, std::vector<SliceCounts> rows)
    : task_(task), rows_(std::move(rows)), feature_names_(task_feature_names(task)), target_name_(task_target_name(task))
{
    if (rows_.empty()) {
        throw Error(ErrorCode::EmptyDataset, "no slices to build a dataset from");
    }

    std::map<std::string, int, std::less<>> scan_length;
    for (const auto& row : rows_) {
        auto [it, inserted] = scan_length.emplace(row.patient_id, row.images_qnt);
        if (!inserted && it->second != row.images_qnt) {
            throw Error(ErrorCode::InconsistentScan,
                        "patient '" + row.patient_id + "' has images_qnt " + std::to_string(it->second) + " and " +
                            std::to_string(row.images_qnt));
        }
        if (row.slice_index < 1 || row.slice_index > row.images_qnt) {
            throw Error(ErrorCode::InconsistentScan, "patient '" + row.patient_id + "' slice " +
                                                         std::to_string(row.slice_index) + " outside 1.." +
                                                         std::to_string(row.images_qnt));
        }
    }

    instances_.reserve(rows_.size());
    for (const auto& row : rows_) {
        SliceInstance inst;
        inst.features.reserve(feature_names_.size());
        for (const auto& name : feature_names_) {
            inst.features.push_back(feature_value(row, name));
        }
        inst.target = feature_value(row, target_name_);
        inst.patient_id = row.patient_id;
        inst.slice_index = row.slice_index;
        instances_.push_back(std::move(inst));
    }
}

Dataset make_instances(std::vector<SliceCounts> counts, Task task)
{
    return Dataset(task, std::move(counts));
}

std::string format_counts_csv(std::span<const SliceCounts> rows)
{
    std::ostringstream out;
    for (std::size_t i = 0; i < counts_header.size(); ++i) {
        out << (i ? "," : "") << counts_header[i];
    }
    out << '\n';
    for (const auto& r : rows) {
        out << r.patient_id << ',' << r.slice_index << ',' << r.images_qnt << ',' << csv::format_exact(r.red) << ','
            << csv::format_exact(r.green) << ',' << csv::format_exact(r.blue) << ',' << csv::format_exact(r.grey)
            << ',' << csv::format_exact(r.black) << '\n';
    }
    return out.str();
}

void save_counts_csv(std::span<const SliceCounts> rows, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write " + path.string());
    }
    out << format_counts_csv(rows);
}

std::vector<SliceCounts> parse_counts_csv(std::string_view text)
{
    const auto rows = csv::parse(text);
    if (rows.empty()) {
        throw Error(ErrorCode::ParseError, "dataset has no header row");
    }
    csv::expect_header(rows.front(), counts_header);

    std::vector<SliceCounts> out;
    out.reserve(rows.size() - 1);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.fields.size() != counts_header.size()) {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(row.line) + ": expected " +
                                                   std::to_string(counts_header.size()) + " fields, got " +
                                                   std::to_string(row.fields.size()));
        }
        SliceCounts c;
        c.patient_id = row.fields[0];
        c.slice_index = csv::to_int(row, 1, "slice_index");
        c.images_qnt = csv::to_int(row, 2, "images_qnt");
        c.red = csv::to_double(row, 3, "red");
        c.green = csv::to_double(row, 4, "green");
        c.blue = csv::to_double(row, 5, "blue");
        c.grey = csv::to_double(row, 6, "grey");
        c.black = csv::to_double(row, 7, "black");
        for (std::size_t col = 3; col < 8; ++col) {
            if (!(c.count(static_cast<FatClass>(col - 3)) >= 0.0)) {
                throw Error(ErrorCode::ParseError, "line " + std::to_string(row.line) + ", column " +
                                                       std::to_string(col + 1) + ": counts must be >= 0");
            }
        }
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<SliceCounts> load_counts_csv(const std::filesystem::path& path)
{
    try {
        return parse_counts_csv(csv::read_file(path.string()));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ParseError) {
            throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
        }
        throw;
    }
}

void save_csv(const Dataset& dataset, const std::filesystem::path& path)
{
    save_counts_csv(dataset.rows(), path);
}

Dataset load_csv(const std::filesystem::path& path, Task task)
{
    return Dataset(task, load_counts_csv(path));
}

std::vector<std::size_t> FoldPlan::fold_sizes() const
{
    std::vector<std::size_t> sizes(k, 0);
    for (auto f : assignments) {
        ++sizes[f];
    }
    return sizes;
}

std::vector<std::size_t> FoldPlan::test_indices(std::size_t fold) const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i] == fold) {
            out.push_back(i);
        }
    }
    return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i] != fold) {
            out.push_back(i);
        }
    }
    return out;
}

namespace {

std::vector<std::size_t> lcg_permutation(std::size_t n, std::uint64_t seed)
{
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order[i] = i;
    }
    Lcg64 lcg(seed);
    for (std::size_t i = n; i > 1; --i) {
        std::swap(order[i - 1], order[lcg.below(static_cast<std::uint32_t>(i))]);
    }
    return order;
}

} // namespace

FoldPlan split_folds(std::size_t n, std::size_t k, std::uint64_t seed)
{
    if (k < 2 || k > n) {
        throw Error(ErrorCode::InvalidFoldCount,
                    "need 2 <= k <= n, got k=" + std::to_string(k) + ", n=" + std::to_string(n));
    }
    FoldPlan plan{k, std::vector<std::size_t>(n)};
    const auto order = lcg_permutation(n, seed);
    for (std::size_t pos = 0; pos < n; ++pos) {
        plan.assignments[order[pos]] = pos % k;
    }
    return plan;
}

FoldPlan split_folds_grouped(std::span<const std::string> patient_ids, std::size_t k, std::uint64_t seed)
{
    std::vector<std::string> groups;
    std::map<std::string, std::size_t, std::less<>> group_of;
    for (const auto& id : patient_ids) {
        if (group_of.emplace(id, groups.size()).second) {
            groups.push_back(id);
        }
    }
    if (k < 2 || k > groups.size()) {
        throw Error(ErrorCode::InvalidFoldCount, "need 2 <= k <= patients, got k=" + std::to_string(k) +
                                                     ", patients=" + std::to_string(groups.size()));
    }
    const auto order = lcg_permutation(groups.size(), seed);
    std::vector<std::size_t> fold_of_group(groups.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        fold_of_group[order[pos]] = pos % k;
    }
    FoldPlan plan{k, std::vector<std::size_t>(patient_ids.size())};
    for (std::size_t i = 0; i < patient_ids.size(); ++i) {
        plan.assignments[i] = fold_of_group[group_of.find(patient_ids[i])->second];
    }
    return plan;
}

} // namespace adipredict
