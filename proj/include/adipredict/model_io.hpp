#pragma once

#include "adipredict/regressors.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace adipredict {

/// Plain-text model format. First line is `adipredict-model <version>`;
/// every following line is `<key> <values...>`, whitespace separated, with
/// reals printed at 17 significant digits so predictions survive a round
/// trip bit for bit. Rotation members nest a complete `model ... end`
/// block for their base learner.
inline constexpr int model_format_version = 1;

void write_model(std::ostream& out, const RegressionModel& model);
RegressionModel read_model(std::istream& in);

std::string model_to_string(const RegressionModel& model);
RegressionModel model_from_string(const std::string& text);

void save_model(const RegressionModel& model, const std::filesystem::path& path);
RegressionModel load_model(const std::filesystem::path& path);

} // namespace adipredict
