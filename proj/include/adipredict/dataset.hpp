#pragma once

#include "adipredict/fatmask.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace adipredict {

/// Which fat is predicted and from which inputs.
enum class Task {
    MediastinalFromEpicardial, // target green; red, blue, grey, black, slice_index, images_qnt
    EpicardialFromMediastinal, // target red; green, blue, grey, black, slice_index, images_qnt
    MediastinalUnprocessed,    // target green; grey_total, black, slice_index, images_qnt
    EpicardialUnprocessed,     // target red; grey_total, black, slice_index, images_qnt
};

/// Kebab-case name used on the command line, e.g. "mediastinal-from-epicardial".
std::string_view to_string(Task task) noexcept;
std::optional<Task> parse_task(std::string_view name) noexcept;

std::vector<std::string> task_feature_names(Task task);
std::string task_target_name(Task task);

/// Resolves a named quantity of a slice: red, green, blue, grey, black,
/// grey_total, slice_index or images_qnt. Throws UnknownName otherwise.
double feature_value(const SliceCounts& counts, std::string_view name);

struct SliceInstance {
    std::vector<double> features;
    double target = 0.0;
    std::string patient_id;
    int slice_index = 0;

    friend bool operator==(const SliceInstance&, const SliceInstance&) = default;
};

/// Immutable set of training rows for one task. Keeps the source count rows
/// so the dataset can be persisted and re-targeted.
class Dataset {
public:
    Dataset(Task task, std::vector<SliceCounts> rows);

    [[nodiscard]] Task task() const noexcept { return task_; }
    [[nodiscard]] std::size_t size() const noexcept { return instances_.size(); }
    [[nodiscard]] std::size_t feature_count() const noexcept { return feature_names_.size(); }
    [[nodiscard]] const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
    [[nodiscard]] const std::string& target_name() const noexcept { return target_name_; }
    [[nodiscard]] const std::vector<SliceInstance>& instances() const noexcept { return instances_; }
    [[nodiscard]] const std::vector<SliceCounts>& rows() const noexcept { return rows_; }

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    Task task_;
    std::vector<SliceCounts> rows_;
    std::vector<std::string> feature_names_;
    std::string target_name_;
    std::vector<SliceInstance> instances_;
};

/// Builds the task's instances. Throws EmptyDataset for no rows and
/// InconsistentScan when a patient's images_qnt disagrees between slices or
/// a slice index falls outside 1..images_qnt.
Dataset make_instances(std::vector<SliceCounts> counts, Task task);

// Dataset CSV: patient_id, slice_index, images_qnt, red, green, blue, grey, black.
// Spacing is not persisted; loaded rows carry unit spacing.
void save_counts_csv(std::span<const SliceCounts> rows, const std::filesystem::path& path);
std::string format_counts_csv(std::span<const SliceCounts> rows);
std::vector<SliceCounts> load_counts_csv(const std::filesystem::path& path);
std::vector<SliceCounts> parse_counts_csv(std::string_view text);

void save_csv(const Dataset& dataset, const std::filesystem::path& path);
Dataset load_csv(const std::filesystem::path& path, Task task);

struct FoldPlan {
    std::size_t k = 0;
    std::vector<std::size_t> assignments; // fold id per instance

    [[nodiscard]] std::vector<std::size_t> fold_sizes() const;
    [[nodiscard]] std::vector<std::size_t> test_indices(std::size_t fold) const;
    [[nodiscard]] std::vector<std::size_t> train_indices(std::size_t fold) const;
};

/// Shuffles 0..n-1 with Fisher-Yates driven by Lcg64(seed) (for i = n-1 down
/// to 1, swap i with below(i + 1)) and deals the shuffled order round-robin
/// into k folds. Throws InvalidFoldCount unless 2 <= k <= n.
FoldPlan split_folds(std::size_t n, std::size_t k, std::uint64_t seed);

/// Patient-grouped variant: shuffles the distinct patient ids (in first-seen
/// order) and deals whole patients round-robin. Needs k <= distinct patients.
FoldPlan split_folds_grouped(std::span<const std::string> patient_ids, std::size_t k, std::uint64_t seed);

} // namespace adipredict
