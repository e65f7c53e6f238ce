#pragma once

#include "adipredict/fatmask.hpp"
#include "adipredict/regressors.hpp"

#include <optional>
#include <string_view>

namespace adipredict {

/// Whole-dataset linear predictors with fixed coefficients.
///   Eq8:  green from red, blue, black, slice_index, images_qnt
///   Eq9:  red from green, blue, black, slice_index, images_qnt
///   Eq10: red from the same inputs as Eq9, obtained by solving Eq8 for red
/// Grey pixels do not appear in any of them.
enum class FixedEquation { Eq8, Eq9, Eq10 };

std::string_view to_string(FixedEquation id) noexcept;

/// Accepts "eq8", "fixed:eq8" and the same for eq9 / eq10.
std::optional<FixedEquation> parse_fixed_equation(std::string_view name) noexcept;

const LinearModel& fixed_model(FixedEquation id);

/// Evaluates the equation on the named quantities of `counts`. No clamping.
double predict_fixed(FixedEquation id, const SliceCounts& counts);

/// Evaluates any linear model whose feature names are slice quantities.
double predict_linear(const LinearModel& model, const SliceCounts& counts);

/// Solves target = bias + sum w_j x_j for the feature `solve_for`. The old
/// target takes that feature's slot. Throws NotInvertible when
/// |w_solve_for| <= 1e-12 and UnknownName when the feature is absent.
LinearModel invert_linear(const LinearModel& model, std::string_view solve_for);

} // namespace adipredict
