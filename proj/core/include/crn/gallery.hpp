#pragma once

#include "crn/network.hpp"
#include "crn/reduce.hpp"
#include "crn/scaling_spec.hpp"

#include <string>
#include <string_view>
#include <vector>

// Example networks and scalings compiled into the library.
namespace crn::gallery {

std::vector<std::string> files();

/// Raw text of a gallery file. Throws std::out_of_range for unknown names.
std::string_view file(std::string_view name);

// The loaders throw ParseError with the first diagnostic on bad input.
Network network(std::string_view name);
ScalingSpec scaling(std::string_view name, const Network& network);
State initial_state(std::string_view name, const Network& network);
reduce::LimitModel limit_model(std::string_view name);

}  // namespace crn::gallery
