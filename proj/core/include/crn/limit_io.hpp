#pragma once

#include "crn/parse.hpp"
#include "crn/reduce.hpp"

#include <string>
#include <string_view>

namespace crn::io {

/// Network text followed by `#@` annotation lines (scaling, variables,
/// helper expressions, channels, terms, notes). The network part stays a
/// valid `.crn` document.
std::string format_limit_model(const reduce::LimitModel& model);

ParseResult<reduce::LimitModel> parse_limit_model(std::string_view text);

/// True when the text carries the `#@ limit-v1` annotation.
bool is_limit_model(std::string_view text);

}  // namespace crn::io
