#pragma once

#include "crn/network.hpp"
#include "crn/parse.hpp"
#include "crn/reduce.hpp"
#include "crn/report.hpp"
#include "crn/scaling_spec.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace crnscale {

/// Bad flag values; reported with exit code 2.
class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Parse or core diagnostics already printed; exit code 1.
class DiagnosticsFailed : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct InputFile {
    std::string path;
    std::string text;
    bool from_gallery = false;
};

/// Reads a file. A missing path that names a built-in gallery file falls
/// back to the embedded copy (noted on stderr).
InputFile read_input(const std::string& path);

/// Parses a network, printing every diagnostic to stderr. Throws
/// DiagnosticsFailed on errors.
crn::Network load_network(const InputFile& in, bool strict);
crn::ScalingSpec load_scaling(const InputFile& in, const crn::Network& network);

/// Initial counts from --x0 ("M=2,D=6" or "2,6,0"), --init FILE, or a
/// `<stem>.init` file next to the network (or in the gallery when the
/// network came from there); zeros otherwise.
crn::State resolve_initial_state(const crn::Network& network, const std::string& network_path,
                                 bool network_from_gallery, const std::string& x0, const std::string& init_path,
                                 std::map<std::string, std::string>& inputs);

/// "M + 2 D + 1/2*DNA" over the given names; returns rational weights.
crn::RationalVector parse_combination(const std::string& text, const std::vector<std::string>& names);

crn::Rational parse_gamma(const std::string& text);

/// Splits "NAME=rest" at the first '='.
std::pair<std::string, std::string> split_assignment(const std::string& text, const std::string& flag);

/// n + 1 equally spaced points on [0, t_end].
std::vector<double> make_grid(double t_end, std::size_t n);

std::vector<std::string> species_names(const crn::Network& network);

/// Writes to `dir/name`, or to stdout when dir is empty. Records the path.
void emit(const std::string& dir, const std::string& name, const std::string& content,
          crn::report::Manifest& manifest);

/// Writes manifest.json into `dir` (no-op when dir is empty).
void write_manifest(const std::string& dir, crn::report::Manifest& manifest);

/// Periodic "label: k/n" lines on stderr.
class Progress {
  public:
    Progress(std::string label, std::size_t total, bool enabled);
    void tick();

  private:
    std::string label_;
    std::size_t total_;
    bool enabled_;
    std::size_t done_ = 0;
    std::size_t next_report_ = 0;
};

}  // namespace crnscale
