#include "adipredict/fixed_models.hpp"

#include "adipredict/dataset.hpp"
#include "adipredict/error.hpp"

#include <cmath>

namespace adipredict {

namespace {

LinearModel make(std::string target, std::vector<std::string> names, std::vector<double> weights, double bias)
{
    LinearModel m;
    m.target_name = std::move(target);
    m.feature_names = std::move(names);
    m.weights = std::move(weights);
    m.bias = bias;
    return m;
}

const LinearModel eq8 = make("green", {"red", "blue", "black", "slice_index", "images_qnt"},
                             {-1.2295, -7.4448, -0.9017, -72.8534, 233.0906}, 230102.0526);

const LinearModel eq9 = make("red", {"green", "blue", "black", "slice_index", "images_qnt"},
                             {-0.4608, -1.3373, -0.4736, -54.5244, 47.9363}, 123509.7603);

const LinearModel eq10 = make("red", {"green", "blue", "black", "slice_index", "images_qnt"},
                              {-0.8133, -6.0551, -0.7334, -59.2545, 189.5816}, 187150.9171);

} // namespace

std::string_view to_string(FixedEquation id) noexcept
{
    switch (id) {
    case FixedEquation::Eq8: return "fixed:eq8";
    case FixedEquation::Eq9: return "fixed:eq9";
    case FixedEquation::Eq10: return "fixed:eq10";
    }
    return "?";
}

std::optional<FixedEquation> parse_fixed_equation(std::string_view name) noexcept
{
    if (name.starts_with("fixed:")) {
        name.remove_prefix(6);
    }
    if (name == "eq8") return FixedEquation::Eq8;
    if (name == "eq9") return FixedEquation::Eq9;
    if (name == "eq10") return FixedEquation::Eq10;
    return std::nullopt;
}

const LinearModel& fixed_model(FixedEquation id)
{
    switch (id) {
    case FixedEquation::Eq8: return eq8;
    case FixedEquation::Eq9: return eq9;
    case FixedEquation::Eq10: return eq10;
    }
    throw Error(ErrorCode::UnknownName, "unknown fixed equation");
}

double predict_linear(const LinearModel& model, const SliceCounts& counts)
{
    double acc = model.bias;
    for (std::size_t j = 0; j < model.weights.size(); ++j) {
        acc += model.weights[j] * feature_value(counts, model.feature_names[j]);
    }
    return acc;
}

double predict_fixed(FixedEquation id, const SliceCounts& counts)
{
    return predict_linear(fixed_model(id), counts);
}

LinearModel invert_linear(const LinearModel& model, std::string_view solve_for)
{
    std::size_t slot = model.feature_names.size();
    for (std::size_t j = 0; j < model.feature_names.size(); ++j) {
        if (model.feature_names[j] == solve_for) {
            slot = j;
            break;
        }
    }
    if (slot == model.feature_names.size()) {
        throw Error(ErrorCode::UnknownName, "model has no feature '" + std::string(solve_for) + "'");
    }
    const double c = model.weights[slot];
    if (!(std::abs(c) > 1e-12)) {
        throw Error(ErrorCode::NotInvertible, "coefficient of '" + std::string(solve_for) + "' is zero");
    }

    LinearModel out;
    out.target_name = std::string(solve_for);
    out.feature_names = model.feature_names;
    out.feature_names[slot] = model.target_name;
    out.weights.resize(model.weights.size());
    for (std::size_t j = 0; j < model.weights.size(); ++j) {
        out.weights[j] = j == slot ? 1.0 / c : -model.weights[j] / c;
    }
    out.bias = -model.bias / c;
    return out;
}

} // namespace adipredict
