#pragma once

#include "crn/network.hpp"
#include "crn/parse.hpp"
#include "crn/reduce.hpp"
#include "crn/scaling.hpp"
#include "crn/sim.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace crn::report {

/// 64-bit FNV-1a as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view data);

/// Structured JSON renderings. Keys are sorted and numbers use shortest
/// round-trip text, so equal inputs give byte-identical output.
std::string balance_json(const Network& network, const ScalingSpec& spec,
                         const scaling::BalanceReport& report);
std::string diagnostics_json(const std::vector<io::ParseDiagnostic>& parse,
                             const std::vector<Diagnostic>& core, const Network* network);
std::string limit_model_json(const reduce::LimitModel& model);
std::string ensemble_json(const sim::EnsembleStats& stats);
std::string comparison_json(const sim::Comparison& cmp);

struct Manifest {
    std::vector<std::string> argv;
    std::string command;
    /// Fully resolved options.
    std::map<std::string, std::string> config;
    /// path -> content hash.
    std::map<std::string, std::string> inputs;
    std::vector<std::string> outputs;
};
std::string manifest_json(const Manifest& manifest);

}  // namespace crn::report
