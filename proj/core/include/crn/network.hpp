#pragma once

#include "crn/errors.hpp"
#include "crn/rational.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace crn {

using Count = std::int64_t;
using State = std::vector<Count>;

struct Species {
    std::size_t index = 0;
    std::string name;
    friend bool operator==(const Species&, const Species&) = default;
};

/// One irreversible reaction nu -> nu_prime with stochastic rate constant kappa'.
class Reaction {
  public:
    Reaction() = default;
    Reaction(std::vector<Count> nu, std::vector<Count> nu_prime, double rate_const,
             std::string label = {});

    const std::vector<Count>& nu() const { return nu_; }
    const std::vector<Count>& nu_prime() const { return nu_prime_; }
    const std::vector<Count>& zeta() const { return zeta_; }
    double rate_const() const { return rate_const_; }
    const std::string& label() const { return label_; }

    /// Sum of reactant coefficients.
    Count order() const;

    friend bool operator==(const Reaction&, const Reaction&) = default;

  private:
    std::vector<Count> nu_;
    std::vector<Count> nu_prime_;
    std::vector<Count> zeta_;
    double rate_const_ = 0.0;
    std::string label_;
};

struct ConservationLaw {
    RationalVector theta;
    friend bool operator==(const ConservationLaw&, const ConservationLaw&) = default;
};

struct Diagnostic {
    enum class Severity { Warning, Error };
    Severity severity = Severity::Error;
    std::string message;
    /// Reaction or species the diagnostic concerns, when applicable.
    std::optional<std::size_t> reaction;
    std::optional<std::size_t> species;
};

class Network {
  public:
    Network() = default;
    /// Throws std::invalid_argument on inconsistent dimensions, duplicate species
    /// names or a nonpositive volume.
    Network(std::vector<std::string> species_names, std::vector<Reaction> reactions,
            double volume = 1.0);

    std::size_t num_species() const { return species_.size(); }
    std::size_t num_reactions() const { return reactions_.size(); }
    const std::vector<Species>& species() const { return species_; }
    const std::vector<Reaction>& reactions() const { return reactions_; }
    const Reaction& reaction(std::size_t k) const { return reactions_.at(k); }
    double volume() const { return volume_; }

    std::optional<std::size_t> species_index(const std::string& name) const;
    std::optional<std::size_t> reaction_index(const std::string& label) const;
    /// Label if present, otherwise "R<k+1>".
    std::string reaction_name(std::size_t k) const;

    friend bool operator==(const Network&, const Network&) = default;

  private:
    std::vector<Species> species_;
    std::vector<Reaction> reactions_;
    double volume_ = 1.0;
};

/// kappa' times the falling-factorial combinatorial factor, divided by
/// V^(order-1) for reactions of order at least two.
double intensity(const Network& network, std::size_t k, const State& x);

/// x + zeta_k. Throws NegativeCount when a component would become negative and
/// CountOverflow on 64-bit overflow.
State apply_reaction(const Network& network, const State& x, std::size_t k);

/// Extreme rays of {theta >= 0 : theta . zeta_k = 0 for all k}, primitive
/// integer scaled and sorted lexicographically.
std::vector<ConservationLaw> conservation_laws(const Network& network);

/// Mass-action right-hand side sum_k kappa_k z^{nu_k} zeta_k using the supplied
/// normalized rate constants.
std::vector<double> classical_ode_rhs(const Network& network, const std::vector<double>& kappa,
                                      const std::vector<double>& z);

std::vector<Diagnostic> validate(const Network& network);

}  // namespace crn
