#pragma once

#include <string>
#include <string_view>

#include "treehash/schedule.hpp"

namespace treehash {

/// Sets one parameter by its file/flag key: mode, epsilon, c, q, B, h, k, d,
/// nI, I. Throws ConfigError for unknown keys or bad values.
void set_param(ModeParams& params, std::string_view key, std::string_view value);

/// Parses "key = value" lines; '#' starts a comment. Applies on top of `base`.
ModeParams parse_params(std::string_view text, ModeParams base = {});
ModeParams load_params_file(const std::string& path, ModeParams base = {});

/// Inverse of parse_params for the keys relevant to the mode.
std::string params_to_text(const ModeParams& params);

}  // namespace treehash
