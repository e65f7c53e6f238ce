#pragma once

#include "adipredict/fatmask.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace adipredict {

/// target = bias + sum(weight * quantity) + N(0, noise_sd^2), clamped at 0.
struct AffineTarget {
    std::string target = "green"; // "green" or "red"
    double bias = 20000.0;
    std::vector<std::pair<std::string, double>> weights{
        {"red", 0.8}, {"blue", 2.0}, {"grey", 0.1}, {"black", -0.02}, {"slice_index", 20.0}, {"images_qnt", 50.0},
    };
    double noise_sd = 100.0;
};

/// Parses "bias=...,red=...,..." into `model.bias` / `model.weights`,
/// replacing the default weights. Throws UnknownName / InvalidConfig.
void parse_affine_terms(std::string_view text, AffineTarget& model);

struct SynthOptions {
    std::size_t patients = 20;
    int min_slices = 40;
    int max_slices = 60;
    std::uint64_t seed = 1;
    AffineTarget model;
};

/// Synthetic per-slice counts at unit spacing. Fat quantities follow a
/// smooth profile along the scan; the target column is then overwritten by
/// the affine model. Deterministic in `seed`.
std::vector<SliceCounts> generate_synthetic(const SynthOptions& options);

} // namespace adipredict
