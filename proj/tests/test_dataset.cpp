#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "adipredict/dataset.hpp"
#include "adipredict/error.hpp"
#include "adipredict/synth.hpp"
#include "support.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>

using namespace adipredict;

namespace {

SliceCounts row(std::string id, int slice, int qnt, double red, double green, double blue, double grey, double black)
{
    SliceCounts c;
    c.patient_id = std::move(id);
    c.slice_index = slice;
    c.images_qnt = qnt;
    c.red = red;
    c.green = green;
    c.blue = blue;
    c.grey = grey;
    c.black = black;
    return c;
}

ErrorCode code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no adipredict::Error thrown");
    return ErrorCode::IoError;
}

// Independent restatement of the fold rule: LCG-driven Fisher-Yates, then
// position modulo k.
std::vector<std::size_t> fold_oracle(std::size_t n, std::size_t k, std::uint64_t seed)
{
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::uint64_t state = seed;
    for (std::size_t i = n - 1; i >= 1; --i) {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        const auto j = std::size_t((state >> 32) % (i + 1));
        std::swap(perm[i], perm[j]);
    }
    std::vector<std::size_t> fold(n);
    for (std::size_t pos = 0; pos < n; ++pos) {
        fold[perm[pos]] = pos % k;
    }
    return fold;
}

} // namespace

TEST_CASE("task feature layouts")
{
    CHECK(task_feature_names(Task::MediastinalFromEpicardial) ==
          std::vector<std::string>{"red", "blue", "grey", "black", "slice_index", "images_qnt"});
    CHECK(task_target_name(Task::MediastinalFromEpicardial) == "green");
    CHECK(task_feature_names(Task::EpicardialFromMediastinal).front() == "green");
    CHECK(task_target_name(Task::EpicardialFromMediastinal) == "red");
    CHECK(task_feature_names(Task::MediastinalUnprocessed) ==
          std::vector<std::string>{"grey_total", "black", "slice_index", "images_qnt"});
    CHECK(task_target_name(Task::EpicardialUnprocessed) == "red");
    for (auto t : {Task::MediastinalFromEpicardial, Task::EpicardialFromMediastinal, Task::MediastinalUnprocessed,
                   Task::EpicardialUnprocessed}) {
        CHECK(parse_task(to_string(t)) == t);
    }
    CHECK_FALSE(parse_task("mediastinal").has_value());
}

TEST_CASE("make_instances builds feature vectors in layout order")
{
    const auto ds = make_instances({row("P1", 2, 40, 10, 20, 30, 40, 50)}, Task::MediastinalFromEpicardial);
    REQUIRE(ds.size() == 1);
    const auto& inst = ds.instances()[0];
    CHECK(inst.features == std::vector<double>{10, 30, 40, 50, 2, 40});
    CHECK(inst.target == 20);
    CHECK(inst.patient_id == "P1");

    const auto epi = make_instances({row("P1", 2, 40, 10, 20, 30, 40, 50)}, Task::EpicardialFromMediastinal);
    CHECK(epi.instances()[0].features == std::vector<double>{20, 30, 40, 50, 2, 40});
    CHECK(epi.instances()[0].target == 10);

    // unprocessed: every fat class merged into one grey total
    const auto raw = make_instances({row("P1", 2, 40, 10, 20, 30, 40, 50)}, Task::MediastinalUnprocessed);
    CHECK(raw.instances()[0].features == std::vector<double>{100, 50, 2, 40});
    CHECK(raw.instances()[0].target == 20);
}

TEST_CASE("dataset validation")
{
    CHECK(code_of([] { make_instances({}, Task::MediastinalFromEpicardial); }) == ErrorCode::EmptyDataset);
    CHECK(code_of([] {
              make_instances({row("P1", 1, 40, 0, 0, 0, 0, 0), row("P1", 2, 41, 0, 0, 0, 0, 0)},
                             Task::MediastinalFromEpicardial);
          }) == ErrorCode::InconsistentScan);
    CHECK(code_of([] { make_instances({row("P1", 41, 40, 0, 0, 0, 0, 0)}, Task::MediastinalFromEpicardial); }) ==
          ErrorCode::InconsistentScan);
    CHECK(code_of([] { (void)feature_value(SliceCounts{}, "purple"); }) == ErrorCode::UnknownName);
}

TEST_CASE("878 instances in 10 folds: eight of 88, two of 87")
{
    const auto plan = split_folds(878, 10, 1);
    auto sizes = plan.fold_sizes();
    CHECK(std::count(sizes.begin(), sizes.end(), 88u) == 8);
    CHECK(std::count(sizes.begin(), sizes.end(), 87u) == 2);
    CHECK(std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}) == 878);
}

TEST_CASE("fold assignment matches the LCG oracle and partitions the rows")
{
    for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, 0xdeadbeefULL}) {
        for (std::size_t n : {2u, 10u, 11u, 97u, 878u}) {
            const std::size_t k = std::min<std::size_t>(10, n);
            const auto plan = split_folds(n, k, seed);
            REQUIRE(plan.assignments == fold_oracle(n, k, seed));
            std::vector<int> seen(n, 0);
            for (std::size_t f = 0; f < k; ++f) {
                const auto test = plan.test_indices(f);
                const auto train = plan.train_indices(f);
                CHECK(test.size() + train.size() == n);
                for (auto i : test) {
                    ++seen[i];
                }
            }
            CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
        }
    }
    CHECK(split_folds(100, 5, 9).assignments == split_folds(100, 5, 9).assignments);
    CHECK(split_folds(100, 5, 9).assignments != split_folds(100, 5, 10).assignments);
}

TEST_CASE("fold count bounds")
{
    CHECK(code_of([] { (void)split_folds(10, 1, 0); }) == ErrorCode::InvalidFoldCount);
    CHECK(code_of([] { (void)split_folds(10, 11, 0); }) == ErrorCode::InvalidFoldCount);
    CHECK_NOTHROW((void)split_folds(10, 10, 0));
}

TEST_CASE("grouped folds keep each patient together")
{
    std::vector<std::string> ids;
    for (int p = 0; p < 13; ++p) {
        for (int s = 0; s < 3 + p % 4; ++s) {
            ids.push_back("P" + std::to_string(p));
        }
    }
    const auto plan = split_folds_grouped(ids, 5, 3);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        for (std::size_t j = 0; j < ids.size(); ++j) {
            if (ids[i] == ids[j]) {
                REQUIRE(plan.assignments[i] == plan.assignments[j]);
            }
        }
    }
    std::set<std::size_t> used(plan.assignments.begin(), plan.assignments.end());
    CHECK(used.size() == 5);
    CHECK(code_of([&] { (void)split_folds_grouped(ids, 14, 3); }) == ErrorCode::InvalidFoldCount);
}

TEST_CASE("counts CSV round trip is exact")
{
    SynthOptions opt;
    opt.patients = 3;
    opt.min_slices = 4;
    opt.max_slices = 6;
    auto rows = generate_synthetic(opt);
    rows[0].red = 0.1 + 0.2; // not representable in short decimal
    const auto text = format_counts_csv(rows);
    const auto back = parse_counts_csv(text);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].patient_id == rows[i].patient_id);
        CHECK(back[i].red == rows[i].red);
        CHECK(back[i].green == rows[i].green);
        CHECK(back[i].black == rows[i].black);
        CHECK(back[i].slice_index == rows[i].slice_index);
    }
    CHECK(format_counts_csv(back) == text);

    const auto dir = testsupport::scratch_dir("dataset_csv");
    const auto ds = make_instances(rows, Task::EpicardialFromMediastinal);
    save_csv(ds, dir / "d.csv");
    CHECK(load_csv(dir / "d.csv", Task::EpicardialFromMediastinal).instances() == ds.instances());
}

TEST_CASE("malformed dataset CSV reports the line")
{
    const std::string header = "patient_id,slice_index,images_qnt,red,green,blue,grey,black\n";
    try {
        (void)parse_counts_csv(header + "P1,1,10,1,2,3,4,5\nP1,2,10,1,oops,3,4,5\n");
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK(code_of([&] { (void)parse_counts_csv(header + "P1,1,10,1,2\n"); }) == ErrorCode::ParseError);
    CHECK(code_of([&] { (void)parse_counts_csv(header + "P1,1,10,-1,2,3,4,5\n"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { (void)parse_counts_csv("id,red\nP1,3\n"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { (void)load_counts_csv("/nonexistent/d.csv"); }) == ErrorCode::IoError);
}
