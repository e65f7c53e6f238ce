#include "adipredict/error.hpp"
#include "adipredict/fatmask.hpp"

#include "csv.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>

namespace fs = std::filesystem;

namespace adipredict {

RgbImage read_png(const fs::path& path)
{
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    if (png_image_begin_read_from_file(&png, path.string().c_str()) == 0) {
        std::string why = png.message;
        png_image_free(&png);
        throw Error(ErrorCode::InvalidImage, path.string() + ": " + why);
    }
    // The simplified API expands grey, palette and 16-bit inputs. Reading as
    // RGBA and dropping the fourth byte ignores alpha without compositing.
    png.format = PNG_FORMAT_RGBA;

    std::vector<png_byte> rgba(PNG_IMAGE_SIZE(png));
    if (png_image_finish_read(&png, nullptr, rgba.data(), 0, nullptr) == 0) {
        std::string why = png.message;
        png_image_free(&png);
        throw Error(ErrorCode::InvalidImage, path.string() + ": " + why);
    }

    RgbImage image;
    image.width = png.width;
    image.height = png.height;
    image.pixels.resize(image.width * image.height);
    for (std::size_t i = 0; i < image.pixels.size(); ++i) {
        image.pixels[i] = {rgba[4 * i], rgba[4 * i + 1], rgba[4 * i + 2]};
    }
    if (image.empty()) {
        throw Error(ErrorCode::InvalidImage, path.string() + ": empty image");
    }
    return image;
}

void write_png(const fs::path& path, const RgbImage& image)
{
    if (image.empty() || image.pixels.size() != image.width * image.height) {
        throw Error(ErrorCode::InvalidImage, "refusing to write an empty image");
    }
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(image.width);
    png.height = static_cast<png_uint_32>(image.height);
    png.format = PNG_FORMAT_RGB;
    if (png_image_write_to_file(&png, path.string().c_str(), 0, image.pixels.data(), 0, nullptr) == 0) {
        std::string why = png.message;
        png_image_free(&png);
        throw Error(ErrorCode::IoError, path.string() + ": " + why);
    }
}

std::vector<PatientMeta> read_patient_metadata(const fs::path& path)
{
    const auto rows = csv::parse(csv::read_file(path.string()));
    if (rows.empty()) {
        throw Error(ErrorCode::ParseError, path.string() + ": missing header");
    }
    csv::expect_header(rows.front(), {"patient_id", "images_qnt", "dx_mm", "dy_mm", "dz_mm"});

    std::vector<PatientMeta> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.fields.size() != 5) {
            throw Error(ErrorCode::ParseError,
                        path.string() + ": line " + std::to_string(row.line) + " has " +
                            std::to_string(row.fields.size()) + " fields, expected 5");
        }
        PatientMeta meta;
        meta.patient_id = row.fields[0];
        meta.images_qnt = csv::to_int(row, 1, "images_qnt");
        meta.spacing = {csv::to_double(row, 2, "dx_mm"), csv::to_double(row, 3, "dy_mm"),
                        csv::to_double(row, 4, "dz_mm")};
        meta.spacing.validate();
        if (meta.images_qnt < 1) {
            throw Error(ErrorCode::InconsistentScan, path.string() + ": images_qnt must be >= 1");
        }
        out.push_back(std::move(meta));
    }
    return out;
}

namespace {

bool all_digits(const std::string& s)
{
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
}

} // namespace

std::vector<SliceCounts> ingest_directory(const fs::path& root, const IngestOptions& options)
{
    if (!fs::is_directory(root)) {
        throw Error(ErrorCode::IoError, root.string() + " is not a directory");
    }

    std::map<std::string, PatientMeta> metadata;
    auto absorb = [&](const fs::path& file) {
        for (auto& m : read_patient_metadata(file)) {
            metadata[m.patient_id] = m;
        }
    };
    for (const auto& file : options.metadata_files) {
        absorb(file);
    }

    std::vector<fs::path> patient_dirs;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_directory()) {
            patient_dirs.push_back(entry.path());
        }
    }
    std::sort(patient_dirs.begin(), patient_dirs.end());

    std::vector<SliceCounts> rows;
    for (const auto& dir : patient_dirs) {
        const std::string patient = dir.filename().string();
        if (fs::exists(dir / "metadata.csv")) {
            absorb(dir / "metadata.csv");
        }
        auto meta_it = metadata.find(patient);
        if (meta_it == metadata.end()) {
            throw Error(ErrorCode::IoError, "no metadata row for patient '" + patient + "'");
        }
        const auto& meta = meta_it->second;

        std::vector<std::pair<int, fs::path>> slices;
        for (const auto& entry : fs::directory_iterator(dir)) {
            const auto& p = entry.path();
            if (!entry.is_regular_file() || p.extension() != ".png") {
                continue;
            }
            const auto stem = p.stem().string();
            if (!all_digits(stem)) {
                throw Error(ErrorCode::InvalidImage, p.string() + ": file name is not a slice index");
            }
            slices.emplace_back(std::stoi(stem), p);
        }
        std::sort(slices.begin(), slices.end());

        for (const auto& [index, path] : slices) {
            if (index < 1 || index > meta.images_qnt) {
                throw Error(ErrorCode::InconsistentScan,
                            path.string() + ": slice index outside 1.." + std::to_string(meta.images_qnt));
            }
            const auto image = read_png(path);
            const auto counts = count_slice(image, {patient, index, meta.images_qnt, meta.spacing});
            rows.push_back(standardize_counts(counts, options.target_spacing_mm));
        }
    }
    return rows;
}

} // namespace adipredict
