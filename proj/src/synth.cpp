#include "adipredict/synth.hpp"

#include "adipredict/dataset.hpp"
#include "adipredict/error.hpp"
#include "adipredict/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

namespace adipredict {

void parse_affine_terms(std::string_view text, AffineTarget& model)
{
    model.weights.clear();
    while (!text.empty()) {
        const auto comma = text.find(',');
        const auto term = text.substr(0, comma);
        text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
        const auto eq = term.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorCode::InvalidConfig, "model term '" + std::string(term) + "' needs name=value");
        }
        const auto name = term.substr(0, eq);
        const auto value_text = term.substr(eq + 1);
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(value_text.data(), value_text.data() + value_text.size(), value);
        if (ec != std::errc{} || ptr != value_text.data() + value_text.size()) {
            throw Error(ErrorCode::InvalidConfig, "model term '" + std::string(term) + "' has a bad value");
        }
        if (name == "bias") {
            model.bias = value;
            continue;
        }
        if (name == model.target || name == "grey_total") {
            throw Error(ErrorCode::InvalidConfig, "the target cannot depend on '" + std::string(name) + "'");
        }
        SliceCounts probe;
        feature_value(probe, name); // throws UnknownName
        model.weights.emplace_back(std::string(name), value);
    }
}

std::vector<SliceCounts> generate_synthetic(const SynthOptions& options)
{
    const auto& model = options.model;
    if (model.target != "green" && model.target != "red") {
        throw Error(ErrorCode::InvalidConfig, "synthetic target must be green or red");
    }
    if (options.patients == 0 || options.min_slices < 1 || options.max_slices < options.min_slices) {
        throw Error(ErrorCode::InvalidConfig, "need at least one patient and 1 <= min_slices <= max_slices");
    }
    if (!(model.noise_sd >= 0.0)) {
        throw Error(ErrorCode::InvalidConfig, "noise standard deviation must be >= 0");
    }

    for (const auto& [name, w] : model.weights) {
        if (name == model.target || name == "grey_total") {
            throw Error(ErrorCode::InvalidConfig, "the target cannot depend on '" + name + "'");
        }
    }

    Rng rng(options.seed);
    std::vector<SliceCounts> rows;
    for (std::size_t p = 0; p < options.patients; ++p) {
        char id[16];
        std::snprintf(id, sizeof id, "P%03zu", p + 1);
        const int span = options.max_slices - options.min_slices + 1;
        const int qnt = options.min_slices + int(rng.index(std::size_t(span)));
        // Per-patient fat burden scales every slice of the scan.
        const double burden = rng.uniform(0.6, 1.4);
        for (int s = 1; s <= qnt; ++s) {
            const double profile = std::sin(std::numbers::pi * double(s) / double(qnt + 1));
            SliceCounts c;
            c.patient_id = id;
            c.slice_index = s;
            c.images_qnt = qnt;
            c.red = std::round(burden * profile * rng.uniform(4000.0, 12000.0));
            c.green = std::round(burden * profile * rng.uniform(6000.0, 20000.0));
            c.blue = std::round(profile * rng.uniform(200.0, 1500.0));
            c.grey = std::round(rng.uniform(5000.0, 40000.0));
            c.black = std::round(rng.uniform(180000.0, 250000.0));

            double target = model.bias;
            for (const auto& [name, w] : model.weights) {
                target += w * feature_value(c, name);
            }
            target += model.noise_sd * rng.normal();
            (model.target == "green" ? c.green : c.red) = std::max(0.0, target);
            rows.push_back(std::move(c));
        }
    }
    return rows;
}

} // namespace adipredict
