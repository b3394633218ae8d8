#pragma once

#include "crn/network.hpp"
#include "crn/scaling_spec.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crn::io {

struct ParseDiagnostic {
    enum class Severity { Warning, Error };
    std::size_t line = 1;
    std::size_t column = 1;
    std::string message;
    Severity severity = Severity::Error;
};

/// "line:col: error: message"
std::string to_string(const ParseDiagnostic& d);

template <class T>
struct ParseResult {
    std::optional<T> value;
    std::vector<ParseDiagnostic> diagnostics;

    bool ok() const { return value.has_value(); }
    bool has_errors() const {
        for (const auto& d : diagnostics) {
            if (d.severity == ParseDiagnostic::Severity::Error) {
                return true;
            }
        }
        return false;
    }
};

struct NetworkParseOptions {
    /// Treat implicitly declared species as errors rather than warnings.
    bool strict = false;
};

/// Parses the line-oriented `.crn` format:
///
///     # crn-v1
///     species A, B
///     volume 2
///     bind: A + B <-> C @ 1.5, 0.25
///     2 A -> 0 @ 3
///
/// A `<->` line becomes two reactions, forward first; the reverse reaction of
/// a labelled line is labelled `<label>_rev`.
ParseResult<Network> parse_network(std::string_view text, const NetworkParseOptions& options = {});

/// Canonical text; parse_network(format_network(n)) == n.
std::string format_network(const Network& network);

/// Parses a `.scale` YAML document:
///
///     N0: 100
///     alpha: {M: 1, D: 1}
///     beta: {R1: -1, 9: 1/2}
///
/// Exponents are exact rationals (`1/2`, `0.5` and `-1` are accepted). Beta
/// keys are reaction labels or 1-based reaction indices; absent entries are 0.
ParseResult<ScalingSpec> parse_scaling(std::string_view text, const Network& network);

std::string format_scaling(const ScalingSpec& spec, const Network& network);

/// Parses a YAML map species -> nonnegative integer count; absent species are 0.
ParseResult<State> parse_initial_state(std::string_view text, const Network& network);

std::string format_initial_state(const State& x, const Network& network);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace crn::io
