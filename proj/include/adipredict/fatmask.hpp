#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace adipredict {

/// Mask classes in tie-break order.
enum class FatClass : std::uint8_t {
    Epicardial,  // red
    Mediastinal, // green
    Pericardium, // blue
    OtherFat,    // grey
    Background,  // black
};

inline constexpr std::size_t fat_class_count = 5;

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

static_assert(sizeof(Rgb) == 3, "Rgb must be tightly packed for raster I/O");

/// Canonical mask color of each class, indexed by FatClass.
inline constexpr std::array<Rgb, fat_class_count> canonical_colors{{
    {255, 0, 0},
    {0, 255, 0},
    {0, 0, 255},
    {128, 128, 128},
    {0, 0, 0},
}};

/// Nearest canonical color by Euclidean RGB distance; first class wins ties.
FatClass classify_pixel(Rgb pixel) noexcept;

const char* to_string(FatClass cls) noexcept;

/// Physical voxel size in millimeters.
struct VoxelSpacing {
    double dx = 1.0;
    double dy = 1.0;
    double dz = 1.0;

    /// Throws InvalidSpacing unless every component is finite and positive.
    void validate() const;

    friend bool operator==(const VoxelSpacing&, const VoxelSpacing&) = default;
};

/// Row-major 8-bit RGB raster.
struct RgbImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<Rgb> pixels;

    [[nodiscard]] bool empty() const noexcept { return width == 0 || height == 0; }
    [[nodiscard]] const Rgb& at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }
};

struct SliceMeta {
    std::string patient_id;
    int slice_index = 1;
    int images_qnt = 1;
    VoxelSpacing spacing;
};

/// Per-slice tallies of the five mask classes. Counts are integral straight
/// out of count_slice and real-valued after standardize_counts.
struct SliceCounts {
    std::string patient_id;
    int slice_index = 1;
    int images_qnt = 1;
    double red = 0.0;
    double green = 0.0;
    double blue = 0.0;
    double grey = 0.0;
    double black = 0.0;
    VoxelSpacing spacing;

    [[nodiscard]] double total() const noexcept { return red + green + blue + grey + black; }
    [[nodiscard]] double count(FatClass cls) const noexcept;

    friend bool operator==(const SliceCounts&, const SliceCounts&) = default;
};

SliceCounts count_slice(const RgbImage& image, const SliceMeta& meta);

/// Rescales counts to equivalent pixel counts at `target_mm` in-plane spacing.
SliceCounts standardize_counts(const SliceCounts& counts, double target_mm);

/// count * dx * dy * dz, in cubic millimeters.
double counts_to_volume(double count, const VoxelSpacing& spacing);

// PNG I/O (8-bit RGB/RGBA, alpha dropped; grey and palette images expanded).
RgbImage read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const RgbImage& image);

/// One row of the per-patient sidecar metadata CSV
/// (patient_id, images_qnt, dx_mm, dy_mm, dz_mm).
struct PatientMeta {
    std::string patient_id;
    int images_qnt = 0;
    VoxelSpacing spacing;
};

std::vector<PatientMeta> read_patient_metadata(const std::filesystem::path& path);

struct IngestOptions {
    double target_spacing_mm = 1.0;
    /// Extra metadata files; `<root>/<patient>/metadata.csv` is always consulted.
    std::vector<std::filesystem::path> metadata_files;
};

/// Walks `<root>/<patient_id>/<slice_index>.png`, counts and standardizes
/// every slice. Rows come back ordered by patient id, then slice index.
std::vector<SliceCounts> ingest_directory(const std::filesystem::path& root, const IngestOptions& options);

} // namespace adipredict
