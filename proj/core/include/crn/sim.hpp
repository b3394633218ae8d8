#pragma once

#include "crn/expr.hpp"
#include "crn/network.hpp"
#include "crn/ode.hpp"
#include "crn/reduce.hpp"
#include "crn/rng.hpp"
#include "crn/scaling_spec.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace crn::sim {

/// State predicate `lhs op rhs` over named values, e.g. "DNA + DNA_D == 1".
class Predicate {
  public:
    enum class Op { Eq, Ne, Le, Ge, Lt, Gt };

    /// Parses and binds against `names` (value index = position). Throws
    /// ExprError on malformed text or unknown names.
    Predicate(std::string name, const std::string& text, const std::vector<std::string>& names);

    const std::string& name() const { return name_; }
    const std::string& text() const { return text_; }
    bool operator()(const std::vector<double>& values) const;

  private:
    std::string name_;
    std::string text_;
    Expr lhs_;
    Expr rhs_;
    Op op_ = Op::Eq;
};

enum class Termination { TEnd, EventCap, Hitting };
std::string to_string(Termination t);

struct Trajectory {
    /// (time, channel) per event; filled only when recording is requested.
    std::vector<std::pair<double, std::size_t>> events;
    std::vector<double> grid;
    std::vector<std::vector<double>> values;
    std::vector<double> final_values;
    double final_time = 0.0;
    Termination terminated_by = Termination::TEnd;
    std::uint64_t n_events = 0;
    /// First hitting time per predicate, in predicate order.
    std::vector<std::optional<double>> hits;
};

/// Called after every event with (time, channel, values before, values after).
using EventHook = std::function<void(double, std::size_t, const std::vector<double>&,
                                     const std::vector<double>&)>;

struct SimControls {
    std::uint64_t event_cap = 100000000;
    /// Throw Exploded at the cap instead of returning a truncated path.
    bool throw_on_cap = true;
    bool record_events = false;
    /// Stop as soon as every predicate has been hit.
    bool stop_when_all_hit = false;
    EventHook on_event;
};

/// Direct-method SSA of the count process. Reported values are counts times
/// `output_scale` (all ones when empty); predicates see the reported values.
Trajectory simulate_ssa(const Network& network, const State& x0, double t_end,
                        const std::vector<double>& grid, RngStream& rng,
                        const SimControls& controls = {},
                        const std::vector<Predicate>& predicates = {},
                        const std::vector<double>& output_scale = {});

/// The process Z^{N,gamma}: integer counts with intensities
/// kappa_k N^{beta_k + gamma} times the falling-factorial combinatorics, and
/// output N^{-alpha} X.
class ScaledProcess {
  public:
    ScaledProcess(const Network& network, const ScalingSpec& spec, const Rational& gamma, double N);

    const Network& count_network() const { return counts_; }
    double N() const { return N_; }
    /// floor((N/N0)^alpha_i X_i(0)).
    State initial_counts(const State& x0_at_N0) const;
    /// N^{-alpha_i} per species.
    const std::vector<double>& output_scale() const { return scale_; }

    Trajectory simulate(const State& counts0, double t_end, const std::vector<double>& grid,
                        RngStream& rng, const SimControls& controls = {},
                        const std::vector<Predicate>& predicates = {}) const;

  private:
    Network counts_;
    ScalingSpec spec_;
    double N_;
    std::vector<double> scale_;
};

struct HybridControls {
    OdeControls ode;
    std::uint64_t event_cap = 100000000;
    bool throw_on_cap = true;
    bool record_events = false;
    bool stop_when_all_hit = false;
    /// Absolute tolerance on the integrated intensity when locating a jump.
    double integral_tol = 1e-10;
    /// Steps per unit horizon when ode.max_step is unset (0 leaves it unset).
    std::size_t min_steps = 200;
};

/// Piecewise-deterministic simulation of a closed limit model: drift between
/// jumps, trapezoid quadrature of the total jump intensity on the ODE grid,
/// bisection for the crossing time and channel selection with the discrete
/// state's left limit. Values are the model's variables in order.
Trajectory simulate_hybrid(const reduce::LimitEvaluator& model, const std::vector<double>& v0,
                           double t_end, const std::vector<double>& grid, RngStream& rng,
                           const HybridControls& controls = {},
                           const std::vector<Predicate>& predicates = {});

/// First time the predicate held on the recorded event stream; needs a
/// trajectory recorded with events and an initial value vector.
std::optional<double> hitting_time(const Network& network, const State& x0,
                                   const Trajectory& trajectory, const Predicate& predicate);

/// Weighted sum of reported values.
struct Observable {
    std::string name;
    std::vector<double> weights;
};

struct EnsembleStats {
    std::vector<double> grid;
    std::vector<std::string> names;
    /// mean[o][g], std[o][g]; std uses the n - 1 denominator and is 0 for n = 1.
    std::vector<std::vector<double>> mean;
    std::vector<std::vector<double>> std;
    /// Replicates contributing to each grid point (paths stopped early at a
    /// hitting time contribute only up to that time).
    std::vector<std::size_t> samples_per_point;
    std::vector<std::string> hit_names;
    /// samples[p][r]: hitting time of predicate p in replicate r, if any.
    std::vector<std::vector<std::optional<double>>> hit_samples;
    std::size_t replicates = 0;
};

struct EnsembleSpec {
    /// Simulates replicate r with its own stream. Must be safe to call
    /// concurrently for distinct replicates.
    std::function<Trajectory(std::size_t replicate, RngStream& rng)> run;
    std::vector<double> grid;
    std::vector<Observable> observables;
    std::vector<std::string> hit_names;
};

/// Replicate r uses RngStream(seed, r); aggregation is ordered by replicate
/// index so the result does not depend on `threads`.
EnsembleStats run_ensemble(const EnsembleSpec& spec, std::size_t replicates, std::uint64_t seed,
                           unsigned threads = 1);

/// Mean of the observed samples, the number observed, and their standard error.
struct HitSummary {
    std::size_t hits = 0;
    std::size_t replicates = 0;
    double mean = 0.0;
    double std_error = 0.0;
};
HitSummary summarize_hits(const std::vector<std::optional<double>>& samples);

struct ObservableComparison {
    std::string name;
    std::vector<double> mean_difference;
    std::vector<bool> bands_overlap;
};

struct HitComparison {
    std::string name;
    HitSummary full;
    /// Reduced times multiplied by N0^gamma.
    HitSummary reduced;
    double ratio = 0.0;
};

struct Comparison {
    std::vector<double> grid;
    std::vector<ObservableComparison> observables;
    std::vector<HitComparison> hits;
};

/// Puts the reduced ensemble on the full model's clock (t N0^gamma) and scale
/// (values times N0^alpha, alpha per reduced observable, zero when omitted)
/// and reports differences for observables and hitting predicates present in
/// both by name. Throws GridMismatch when the rescaled grids differ.
Comparison compare_models(const EnsembleStats& full, const EnsembleStats& reduced,
                          const ScalingSpec& spec, const Rational& gamma,
                          const std::vector<Rational>& reduced_alpha = {});

void write_trajectory_csv(std::ostream& os, const std::vector<std::string>& names,
                          const Trajectory& trajectory, std::size_t replicate);
void write_trajectory_csv_header(std::ostream& os, const std::vector<std::string>& names);
void write_ensemble_csv(std::ostream& os, const EnsembleStats& stats);
void write_hitting_csv(std::ostream& os, const std::vector<std::optional<double>>& samples);
void write_comparison_csv(std::ostream& os, const Comparison& cmp);

/// %.17g rendering used by every CSV writer.
std::string format_value(double v);

}  // namespace crn::sim
