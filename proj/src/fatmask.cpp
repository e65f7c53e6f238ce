#include "adipredict/fatmask.hpp"

#include "adipredict/error.hpp"

#include <cmath>
#include <limits>

namespace adipredict {

FatClass classify_pixel(Rgb pixel) noexcept
{
    std::size_t best = 0;
    int best_distance = std::numeric_limits<int>::max();
    for (std::size_t i = 0; i < canonical_colors.size(); ++i) {
        const auto& c = canonical_colors[i];
        const int dr = int(pixel.r) - int(c.r);
        const int dg = int(pixel.g) - int(c.g);
        const int db = int(pixel.b) - int(c.b);
        // Squared distance is exact in int and preserves the ordering.
        const int d = dr * dr + dg * dg + db * db;
        if (d < best_distance) {
            best_distance = d;
            best = i;
        }
    }
    return static_cast<FatClass>(best);
}

const char* to_string(FatClass cls) noexcept
{
    switch (cls) {
    case FatClass::Epicardial: return "epicardial";
    case FatClass::Mediastinal: return "mediastinal";
    case FatClass::Pericardium: return "pericardium";
    case FatClass::OtherFat: return "other";
    case FatClass::Background: return "background";
    }
    return "?";
}

void VoxelSpacing::validate() const
{
    for (double v : {dx, dy, dz}) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw Error(ErrorCode::InvalidSpacing, "voxel spacing components must be finite and > 0");
        }
    }
}

double SliceCounts::count(FatClass cls) const noexcept
{
    switch (cls) {
    case FatClass::Epicardial: return red;
    case FatClass::Mediastinal: return green;
    case FatClass::Pericardium: return blue;
    case FatClass::OtherFat: return grey;
    case FatClass::Background: return black;
    }
    return 0.0;
}

SliceCounts count_slice(const RgbImage& image, const SliceMeta& meta)
{
    if (image.empty() || image.pixels.size() != image.width * image.height) {
        throw Error(ErrorCode::InvalidImage, "image is empty or its pixel buffer does not match its size");
    }
    std::array<std::size_t, fat_class_count> tally{};
    for (const auto& px : image.pixels) {
        ++tally[static_cast<std::size_t>(classify_pixel(px))];
    }

    SliceCounts counts;
    counts.patient_id = meta.patient_id;
    counts.slice_index = meta.slice_index;
    counts.images_qnt = meta.images_qnt;
    counts.red = static_cast<double>(tally[0]);
    counts.green = static_cast<double>(tally[1]);
    counts.blue = static_cast<double>(tally[2]);
    counts.grey = static_cast<double>(tally[3]);
    counts.black = static_cast<double>(tally[4]);
    counts.spacing = meta.spacing;
    return counts;
}

SliceCounts standardize_counts(const SliceCounts& counts, double target_mm)
{
    if (!(target_mm > 0.0) || !std::isfinite(target_mm)) {
        throw Error(ErrorCode::InvalidSpacing, "target spacing must be finite and > 0");
    }
    counts.spacing.validate();

    const double scale = (counts.spacing.dx * counts.spacing.dy) / (target_mm * target_mm);
    SliceCounts out = counts;
    out.red *= scale;
    out.green *= scale;
    out.blue *= scale;
    out.grey *= scale;
    out.black *= scale;
    out.spacing = {target_mm, target_mm, counts.spacing.dz};
    return out;
}

double counts_to_volume(double count, const VoxelSpacing& spacing)
{
    if (!(count >= 0.0)) {
        throw Error(ErrorCode::InvalidCount, "pixel count must be non-negative");
    }
    spacing.validate();
    return count * spacing.dx * spacing.dy * spacing.dz;
}

} // namespace adipredict
