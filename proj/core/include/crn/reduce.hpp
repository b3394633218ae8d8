#pragma once

#include "crn/expr.hpp"
#include "crn/network.hpp"
#include "crn/scaling.hpp"
#include "crn/scaling_spec.hpp"

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace crn::reduce {

enum class TermKind { Vanishing, Jump, Drift, Fast };
std::string to_string(TermKind k);

/// Limiting behaviour of one (variable, reaction) pair: the reaction's
/// contribution to the variable scales like N^exponent_gap.
struct TermClass {
    std::size_t reaction = 0;
    std::size_t variable = 0;
    Rational exponent_gap;
    TermKind cls = TermKind::Vanishing;
    /// theta . zeta_k: net change of the variable in raw counts.
    Rational coefficient;
    /// theta . D^{alpha_theta} zeta_k: change in the limit's normalised units.
    Rational drift_coefficient;
};

/// Pure function of the exponent gap and the variable's abundance exponent.
TermKind classify_term(const Rational& gap, const Rational& alpha);

enum class VarKind { Frozen, Continuous, Discrete };
std::string to_string(VarKind k);

struct LimitVariable {
    std::string name;
    RationalVector theta;
    /// Set when the variable is a single species.
    std::optional<std::size_t> species;
    /// max alpha over supp(theta).
    Rational alpha;
    VarKind kind = VarKind::Frozen;
    double initial = 0.0;
};

/// Auxiliary linear combination theta . Z requested by the user.
struct AuxVariable {
    std::string name;
    RationalVector theta;
};

/// A rate-carrying term group of the limit: one reaction (or a synthetic
/// channel) with its jump increments and drift coefficients.
struct Channel {
    std::string name;
    std::optional<std::size_t> reaction;
    enum class RateSource { MassAction, Expression, Generic } source = RateSource::MassAction;
    std::string rate;
    std::vector<std::pair<std::size_t, double>> jumps;
    std::vector<std::pair<std::size_t, double>> drifts;
};

struct FastBlock {
    /// Species eliminated because some term on them is Fast.
    std::vector<std::size_t> species;
    /// Reactions carrying a Fast term on an eliminated species.
    std::vector<std::size_t> reactions;
    /// Eliminated species with alpha = 0; the lattice of the fast generator.
    std::vector<std::size_t> discrete_species;
    /// Leading-order reactions of the discrete block (largest exponent gap).
    std::vector<std::size_t> generator_reactions;
    Rational generator_gap;
    /// Conserved coordinates of the discrete block (over all species indices).
    std::vector<RationalVector> conserved;
};

struct LimitModel {
    Network network;
    ScalingSpec spec;
    Rational gamma;
    std::vector<LimitVariable> variables;
    std::vector<TermClass> terms;
    FastBlock fast_block;
    /// Named helper expressions, evaluated in order before channel rates.
    std::vector<std::pair<std::string, std::string>> lets;
    std::vector<Channel> channels;
    /// Species-indexed normalised initial state; frozen species and the fast
    /// lattice start from here.
    std::vector<double> initial_z;
    bool closed = false;
    std::vector<std::string> unresolved;
    std::vector<std::string> notes;

    std::optional<std::size_t> variable_index(const std::string& name) const;
};

struct BuildOptions {
    /// reaction index -> closed-form averaged intensity expression.
    std::map<std::size_t, std::string> averaged;
    std::vector<std::pair<std::string, std::string>> lets;
    /// Species-indexed normalised initial state; defaults to zero.
    std::optional<std::vector<double>> initial_z;
    /// Average remaining channels over the discrete fast block when possible.
    bool generic_averaging = true;
    bool check_admissibility = true;
    scaling::EnumerationOptions enumeration;
};

/// Term-by-term classification at time scale gamma. Throws NotInK2 when
/// an auxiliary theta is not in K2 and FastTermUnresolved when a retained
/// auxiliary variable carries a Fast term without a supplied average.
LimitModel build_limit_model(const Network& network, const ScalingSpec& spec, const Rational& gamma,
                             const std::vector<AuxVariable>& aux, const BuildOptions& options = {});

/// Fast block of the classification at gamma, without building variables.
FastBlock find_fast_block(const Network& network, const ScalingSpec& spec, const Rational& gamma);

struct Transition {
    std::size_t from = 0;
    std::size_t to = 0;
    double rate = 0.0;
};

struct FastGenerator {
    /// Lattice coordinates (species indices).
    std::vector<std::size_t> species;
    std::vector<std::vector<Count>> states;
    std::vector<Transition> transitions;
    std::vector<double> frozen_slow;
    std::vector<std::size_t> reactions;
    /// Per-coordinate cap applied while exploring.
    Count bound = 0;
    /// States that had an outgoing transition cut by the cap.
    std::vector<bool> on_boundary;
};

struct Truncation {
    /// Starting per-coordinate cap; 0 picks a Poisson-tail default.
    Count initial_bound = 0;
    /// Maximum number of lattice states.
    std::size_t max_states = 50000;
    /// Stop growing once the boundary mass is below this.
    double tol = 1e-10;
};

/// Generator of the discrete fast block with slow species frozen at
/// `frozen_slow` (species-indexed, normalised). The fast-species entries of
/// `frozen_slow` give the starting lattice point and hence the conserved
/// totals. Uses a fixed cap `truncation.initial_bound` (or a default).
FastGenerator fast_generator(const Network& network, const ScalingSpec& spec, const Rational& gamma,
                             const std::vector<double>& frozen_slow,
                             const Truncation& truncation = {});
FastGenerator fast_generator(const LimitModel& model, const std::vector<double>& frozen_slow,
                             const Truncation& truncation = {});

struct Equilibrium {
    std::vector<std::size_t> species;
    std::vector<std::vector<Count>> support;
    std::vector<double> probs;
    double residual = 0.0;
    double truncation_mass_bound = 0.0;
};

/// Solves pi Q = 0, sum pi = 1 on the truncated space. Throws NotIrreducible
/// when the chain has several closed classes.
Equilibrium stationary_distribution(const FastGenerator& gen, double tol = 1e-9);

/// Builds generators with a growing cap until the boundary mass drops below
/// truncation.tol (or max_states is reached) and returns the equilibrium.
Equilibrium fast_equilibrium(const Network& network, const ScalingSpec& spec,
                             const FastBlock& block, const std::vector<double>& frozen_slow,
                             const Truncation& truncation = {});

/// Limit intensity kappa_k * prod z_i^{nu_ik} (alpha_i > 0) or falling
/// factorials (alpha_i = 0), divided by V^(order-1).
double limit_intensity(const Network& network, const ScalingSpec& spec, std::size_t k,
                       const std::vector<double>& z);

/// Expectation of the limit intensity of reaction k under `eq`, with the
/// non-lattice species taken from z.
double averaged_intensity(const Network& network, const ScalingSpec& spec, std::size_t k,
                          const Equilibrium& eq, const std::vector<double>& z);

// Closed forms for the worked examples.

/// Law of (z1, z2) on {z1 + 2 z2 = m} proportional to r^(z1+z2)/(z1! z2!),
/// r = kappa10 / kappa9. Support is ordered by increasing z2.
Equilibrium goutsias_mu(long m, double kappa9, double kappa10);
/// E[z2] under goutsias_mu(m).
double goutsias_alpha(long m, double kappa9, double kappa10);
/// Root in [0, m/2] of kappa10 a = kappa9 (m - 2a)(m - 2a - 1).
double alpha_moment_closure(long m, double kappa9, double kappa10);
/// Fast monomer/dimer equilibrium for total y = z1 + 2 z2.
std::array<double, 2> phi_pair(double y, double kappa9, double kappa10);
/// dx1/dt = -M k1 k3 x1 / (k2 + k3 + k1 x1).
double michaelis_menten_rhs(double x1, double M, const std::array<double, 3>& kappa);
/// Single-channel jump model for S1 <-> 2 S2, S2 -> S3 with S2 eliminated.
LimitModel mastny_reduced_model(double kappa1, double kappa2, double kappa3, double z1_0,
                                double z3_0);

/// Evaluates channel rates and drifts of a closed LimitModel. Thread-safe:
/// the generic-average cache is guarded by a mutex.
class LimitEvaluator {
  public:
    explicit LimitEvaluator(const LimitModel& model);
    ~LimitEvaluator();
    LimitEvaluator(const LimitEvaluator&) = delete;
    LimitEvaluator& operator=(const LimitEvaluator&) = delete;

    const LimitModel& model() const { return model_; }
    std::size_t num_channels() const { return model_.channels.size(); }

    /// Channel intensities at variable values v (one entry per variable).
    void rates(const std::vector<double>& v, std::vector<double>& out) const;
    /// d v / dt from the drift terms (zero for non-continuous variables).
    void drift(const std::vector<double>& v, std::vector<double>& out) const;
    /// Species-indexed z reconstructed from species variables and initial_z.
    std::vector<double> species_values(const std::vector<double>& v) const;

  private:
    struct Impl;
    LimitModel model_;
    std::unique_ptr<Impl> impl_;
};

}  // namespace crn::reduce
