#pragma once

#include "crn/network.hpp"
#include "crn/rational.hpp"
#include "crn/scaling_spec.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace crn::scaling {

/// Outcome of a balance check for one species or linear combination.
enum class Verdict {
    Balanced,             ///< production and consumption exponents match
    ConstraintSatisfied,  ///< unbalanced, but gamma is within the natural time scale
    ConstraintViolated,   ///< unbalanced and gamma exceeds the natural time scale
};

std::string to_string(Verdict v);

struct BalanceCheck {
    Verdict verdict = Verdict::Balanced;
    /// max rho over reactions with positive / negative net change.
    ExtRational max_plus;
    ExtRational max_minus;
    /// Natural time scale of the species or combination.
    ExtRational bound;
};

/// Reactions k with theta . zeta_k > 0 and < 0 respectively.
struct NetChange {
    std::vector<std::size_t> plus;
    std::vector<std::size_t> minus;
};
NetChange net_change(const Network& network, const RationalVector& theta);

/// alpha_i - max rho_k over reactions changing species i. Throws
/// IsolatedSpecies when no reaction changes it.
Rational species_timescale(const Network& network, const ScalingSpec& spec, std::size_t i);

BalanceCheck check_species_balance(const Network& network, const ScalingSpec& spec, std::size_t i,
                                   const Rational& gamma);

/// max alpha over supp(theta) minus max rho over reactions theta changes; +inf
/// when theta is conserved by every reaction.
ExtRational theta_timescale(const Network& network, const ScalingSpec& spec,
                            const RationalVector& theta);

BalanceCheck check_collective_balance(const Network& network, const ScalingSpec& spec,
                                      const RationalVector& theta, const Rational& gamma);

/// Maximal strongly connected components of the species graph (edge i -> j
/// when a reaction consumes i and produces j). Components are sorted
/// internally and ordered by their smallest member.
std::vector<std::vector<std::size_t>> scc_decompose(const Network& network);

struct SignClass {
    std::vector<std::size_t> gamma_minus;
    std::vector<std::size_t> gamma_plus;
    std::vector<std::size_t> gamma_zero;
    std::optional<RationalVector> witness;
    bool feasible = false;
};

struct EnumerationOptions {
    /// Maximum number of search nodes per support set.
    std::uint64_t budget = 531441;  // 3^12
};

/// Every sign pattern (Gamma_-, Gamma_+, Gamma_0) realised by some nonzero
/// theta >= 0 supported in `support`. Reactions that do not change any
/// species of the support are always in Gamma_0. Throws SearchBudgetExceeded.
std::vector<SignClass> enumerate_sign_classes(const Network& network,
                                              const std::vector<std::size_t>& support,
                                              const EnumerationOptions& options = {});

struct ClassVerdict {
    std::size_t scc = 0;
    SignClass sign_class;
    bool balanced = false;
    ExtRational max_plus;
    ExtRational max_minus;
    /// Smallest gamma_theta over the whole class (the binding constraint).
    ExtRational bound;
    bool satisfied = false;
};

struct SpeciesVerdict {
    bool isolated = false;
    BalanceCheck check;
};

struct K2Result {
    std::vector<std::size_t> fast_reactions;
    /// Species spanning L1.
    std::vector<std::size_t> l1_species;
    std::vector<RationalVector> generators;
    std::vector<ExtRational> generator_timescales;
    ExtRational r2 = ExtRational::pos_inf();
};

struct BalanceReport {
    Rational gamma;
    std::vector<std::vector<std::size_t>> sccs;
    std::vector<SpeciesVerdict> species_verdicts;
    std::vector<ClassVerdict> class_verdicts;
    /// gamma_i per species; +inf for isolated species.
    std::vector<ExtRational> natural_timescales;
    ExtRational max_admissible_gamma = ExtRational::pos_inf();
    ExtRational r1 = ExtRational::pos_inf();
    K2Result k2;
    bool admissible = true;
    /// r2 > r1 held (or K2 had no generator with a finite time scale).
    bool r2_exceeds_r1 = true;
};

/// Reactions k with gamma + rho_k = alpha_i and zeta_ik != 0.
std::vector<std::size_t> gamma_set(const Network& network, const ScalingSpec& spec, std::size_t i,
                                   const Rational& gamma);

/// min_i gamma_i over non-isolated species; +inf when every species is isolated.
ExtRational compute_r1(const Network& network, const ScalingSpec& spec);

K2Result compute_k2_r2(const Network& network, const ScalingSpec& spec);

BalanceReport verify_all_balance(const Network& network, const ScalingSpec& spec,
                                 const Rational& gamma, const EnumerationOptions& options = {});

/// Like verify_all_balance's class list, but enumerating sign classes over the
/// full species set instead of per strongly connected component.
ExtRational max_admissible_gamma_full(const Network& network, const ScalingSpec& spec,
                                      const EnumerationOptions& options = {});

struct AlphaCandidate {
    RationalVector alpha;
    std::size_t balanced_classes = 0;
    ExtRational max_admissible_gamma;
};

/// Scores every alpha in the Cartesian product of `candidate_grid` by the
/// number of balanced sign classes and the admissible gamma bound, returning
/// the Pareto-optimal assignments (more balanced classes first, then larger
/// bound, then lexicographic alpha).
std::vector<AlphaCandidate> propose_alpha(const Network& network, const RationalVector& beta,
                                          const std::vector<std::vector<Rational>>& candidate_grid,
                                          const EnumerationOptions& options = {});

/// Text rendering of the report laid out like a balance-equation table.
std::string format_balance_table(const Network& network, const ScalingSpec& spec,
                                 const BalanceReport& report);

/// "X1 + 2X2" style rendering of a nonnegative combination.
std::string format_combination(const Network& network, const RationalVector& theta);

}  // namespace crn::scaling
