#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "adipredict/error.hpp"
#include "adipredict/fatmask.hpp"
#include "adipredict/random.hpp"
#include "support.hpp"

#include <fstream>

using namespace adipredict;

namespace {

// Nearest canonical colour by Euclidean distance, earliest class on ties.
FatClass nearest_oracle(Rgb p)
{
    double best = 1e300;
    std::size_t arg = 0;
    for (std::size_t c = 0; c < canonical_colors.size(); ++c) {
        const double dr = double(p.r) - canonical_colors[c].r;
        const double dg = double(p.g) - canonical_colors[c].g;
        const double db = double(p.b) - canonical_colors[c].b;
        const double d = std::sqrt(dr * dr + dg * dg + db * db);
        if (d < best) {
            best = d;
            arg = c;
        }
    }
    return FatClass(arg);
}

RgbImage random_image(std::size_t w, std::size_t h, std::uint64_t seed)
{
    Rng rng(seed);
    RgbImage img{w, h, std::vector<Rgb>(w * h)};
    for (auto& px : img.pixels) {
        if (rng.uniform() < 0.5) {
            px = canonical_colors[rng.index(canonical_colors.size())];
        } else {
            px = {std::uint8_t(rng.index(256)), std::uint8_t(rng.index(256)), std::uint8_t(rng.index(256))};
        }
    }
    return img;
}

SliceCounts sample_counts()
{
    SliceCounts c;
    c.patient_id = "P1";
    c.slice_index = 3;
    c.images_qnt = 40;
    c.red = 1200;
    c.green = 3400;
    c.blue = 560;
    c.grey = 7800;
    c.black = 249140;
    c.spacing = {0.7, 0.7, 3.0};
    return c;
}

} // namespace

TEST_CASE("canonical colours classify to their own class")
{
    for (std::size_t c = 0; c < canonical_colors.size(); ++c) {
        CHECK(classify_pixel(canonical_colors[c]) == FatClass(c));
    }
}

TEST_CASE("near-grey pixel goes to other fat")
{
    CHECK(classify_pixel({120, 120, 120}) == FatClass::OtherFat);
    CHECK(classify_pixel({250, 10, 5}) == FatClass::Epicardial);
    CHECK(classify_pixel({10, 10, 10}) == FatClass::Background);
}

TEST_CASE("classification agrees with a brute-force nearest-colour search")
{
    for (int r = 0; r < 256; r += 15) {
        for (int g = 0; g < 256; g += 15) {
            for (int b = 0; b < 256; b += 15) {
                const Rgb p{std::uint8_t(r), std::uint8_t(g), std::uint8_t(b)};
                REQUIRE(classify_pixel(p) == nearest_oracle(p));
            }
        }
    }
    // Equidistant from black and grey (64 vs 64): black is listed later, grey wins.
    CHECK(classify_pixel({64, 64, 64}) == nearest_oracle({64, 64, 64}));
}

TEST_CASE("slice counts conserve the pixel total")
{
    const auto img = random_image(37, 23, 11);
    SliceMeta meta{"P7", 2, 10, {0.5, 0.5, 2.0}};
    const auto c = count_slice(img, meta);
    CHECK(c.total() == 37.0 * 23.0);

    std::array<double, fat_class_count> oracle{};
    for (const auto& px : img.pixels) {
        oracle[std::size_t(nearest_oracle(px))] += 1;
    }
    for (std::size_t k = 0; k < fat_class_count; ++k) {
        CHECK(c.count(FatClass(k)) == oracle[k]);
    }
    CHECK(c.patient_id == "P7");
    CHECK(c.slice_index == 2);
    CHECK(c.spacing == meta.spacing);
}

TEST_CASE("empty image is rejected")
{
    CHECK_THROWS_AS(count_slice(RgbImage{}, SliceMeta{}), Error);
    RgbImage bad{3, 3, std::vector<Rgb>(4)};
    CHECK_THROWS_AS(count_slice(bad, SliceMeta{}), Error);
}

TEST_CASE("standardization rescales by in-plane pixel area")
{
    const auto c = sample_counts();
    const auto s = standardize_counts(c, 1.0);
    const double f = 0.7 * 0.7;
    CHECK(s.red == doctest::Approx(1200 * f).epsilon(1e-12));
    CHECK(s.black == doctest::Approx(249140 * f).epsilon(1e-12));
    CHECK(s.spacing == VoxelSpacing{1.0, 1.0, 3.0});
    CHECK(s.slice_index == c.slice_index);

    // physical area is preserved
    CHECK(counts_to_volume(s.green, s.spacing) == doctest::Approx(counts_to_volume(c.green, c.spacing)));
}

TEST_CASE("standardization composes and is linear")
{
    const auto c = sample_counts();
    const auto direct = standardize_counts(c, 0.5);
    const auto twostep = standardize_counts(standardize_counts(c, 1.3), 0.5);
    for (std::size_t k = 0; k < fat_class_count; ++k) {
        CHECK(twostep.count(FatClass(k)) == doctest::Approx(direct.count(FatClass(k))).epsilon(1e-12));
    }

    auto doubled = c;
    doubled.red *= 2;
    doubled.grey *= 2;
    const auto sd = standardize_counts(doubled, 1.0);
    const auto s1 = standardize_counts(c, 1.0);
    CHECK(sd.red == doctest::Approx(2 * s1.red).epsilon(1e-12));
    CHECK(sd.grey == doctest::Approx(2 * s1.grey).epsilon(1e-12));
}

TEST_CASE("spacing validation")
{
    CHECK_THROWS_AS(standardize_counts(sample_counts(), 0.0), Error);
    auto c = sample_counts();
    c.spacing.dy = -1;
    try {
        (void)standardize_counts(c, 1.0);
        FAIL("expected InvalidSpacing");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidSpacing);
    }
    CHECK_THROWS_AS(counts_to_volume(5, {1, 1, std::nan("")}), Error);
}

TEST_CASE("count to volume")
{
    CHECK(counts_to_volume(1000, {0.5, 0.5, 2.5}) == 625.0);
    CHECK(counts_to_volume(0, {0.5, 0.5, 2.5}) == 0.0);
    try {
        (void)counts_to_volume(-1, {1, 1, 1});
        FAIL("expected InvalidCount");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidCount);
    }
}

TEST_CASE("png round trip keeps pixels exactly")
{
    const auto dir = testsupport::scratch_dir("png");
    const auto img = random_image(19, 7, 5);
    write_png(dir / "a.png", img);
    const auto back = read_png(dir / "a.png");
    CHECK(back.width == 19);
    CHECK(back.height == 7);
    CHECK(back.pixels == img.pixels);
}

TEST_CASE("corrupt png names the file")
{
    const auto dir = testsupport::scratch_dir("badpng");
    std::ofstream(dir / "1.png") << "not a png at all";
    try {
        (void)read_png(dir / "1.png");
        FAIL("expected InvalidImage");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidImage);
        CHECK(std::string(e.what()).find("1.png") != std::string::npos);
    }
}

TEST_CASE("directory ingest counts and standardizes every slice")
{
    const auto dir = testsupport::scratch_dir("ingest");
    std::filesystem::create_directories(dir / "A");
    std::filesystem::create_directories(dir / "B");
    RgbImage img{4, 2, std::vector<Rgb>(8, canonical_colors[4])};
    img.pixels[0] = canonical_colors[0];
    img.pixels[1] = canonical_colors[1];
    img.pixels[2] = {130, 125, 128};
    write_png(dir / "A" / "1.png", img);
    write_png(dir / "A" / "2.png", img);
    write_png(dir / "B" / "1.png", img);
    {
        std::ofstream m(dir / "meta.csv");
        m << "patient_id,images_qnt,dx_mm,dy_mm,dz_mm\nA,2,0.5,0.5,3\nB,5,2,2,3\n";
    }
    IngestOptions opt;
    opt.metadata_files = {dir / "meta.csv"};
    const auto rows = ingest_directory(dir, opt);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].patient_id == "A");
    CHECK(rows[0].slice_index == 1);
    CHECK(rows[1].slice_index == 2);
    CHECK(rows[0].red == doctest::Approx(0.25));
    CHECK(rows[0].grey == doctest::Approx(0.25));
    CHECK(rows[0].black == doctest::Approx(5 * 0.25));
    CHECK(rows[2].patient_id == "B");
    CHECK(rows[2].images_qnt == 5);
    CHECK(rows[2].green == doctest::Approx(4.0));
}

TEST_CASE("ingest without metadata names the patient")
{
    const auto dir = testsupport::scratch_dir("nometa");
    std::filesystem::create_directories(dir / "P42");
    write_png(dir / "P42" / "1.png", RgbImage{1, 1, {canonical_colors[0]}});
    try {
        (void)ingest_directory(dir, IngestOptions{});
        FAIL("expected IoError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IoError);
        CHECK(std::string(e.what()).find("P42") != std::string::npos);
    }
}

TEST_CASE("slice index beyond images_qnt is inconsistent")
{
    const auto dir = testsupport::scratch_dir("badindex");
    std::filesystem::create_directories(dir / "P1");
    write_png(dir / "P1" / "9.png", RgbImage{1, 1, {canonical_colors[0]}});
    std::ofstream(dir / "P1" / "metadata.csv") << "patient_id,images_qnt,dx_mm,dy_mm,dz_mm\nP1,3,1,1,1\n";
    try {
        (void)ingest_directory(dir, IngestOptions{});
        FAIL("expected InconsistentScan");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InconsistentScan);
    }
}
