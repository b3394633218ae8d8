#include "crn/network.hpp"

#include "crn/cone.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <unordered_set>

namespace crn {

Reaction::Reaction(std::vector<Count> nu, std::vector<Count> nu_prime, double rate_const,
                   std::string label)
    : nu_(std::move(nu)),
      nu_prime_(std::move(nu_prime)),
      rate_const_(rate_const),
      label_(std::move(label)) {
    if (nu_.size() != nu_prime_.size()) {
        throw std::invalid_argument("reaction vectors differ in length");
    }
    zeta_.resize(nu_.size());
    for (std::size_t i = 0; i < nu_.size(); ++i) {
        if (nu_[i] < 0 || nu_prime_[i] < 0) {
            throw std::invalid_argument("negative stoichiometric coefficient");
        }
        zeta_[i] = nu_prime_[i] - nu_[i];
    }
}

Count Reaction::order() const {
    Count s = 0;
    for (Count c : nu_) {
        s += c;
    }
    return s;
}

Network::Network(std::vector<std::string> species_names, std::vector<Reaction> reactions,
                 double volume)
    : reactions_(std::move(reactions)), volume_(volume) {
    if (!(volume_ > 0.0) || !std::isfinite(volume_)) {
        throw std::invalid_argument("volume must be positive");
    }
    std::unordered_set<std::string> seen;
    species_.reserve(species_names.size());
    for (std::size_t i = 0; i < species_names.size(); ++i) {
        if (!seen.insert(species_names[i]).second) {
            throw std::invalid_argument("duplicate species name '" + species_names[i] + "'");
        }
        species_.push_back(Species{i, std::move(species_names[i])});
    }
    for (const auto& r : reactions_) {
        if (r.nu().size() != species_.size()) {
            throw std::invalid_argument("reaction vector length differs from species count");
        }
    }
}

std::optional<std::size_t> Network::species_index(const std::string& name) const {
    for (const auto& s : species_) {
        if (s.name == name) {
            return s.index;
        }
    }
    return std::nullopt;
}

std::optional<std::size_t> Network::reaction_index(const std::string& label) const {
    for (std::size_t k = 0; k < reactions_.size(); ++k) {
        if (reaction_name(k) == label) {
            return k;
        }
    }
    return std::nullopt;
}

std::string Network::reaction_name(std::size_t k) const {
    const auto& label = reactions_.at(k).label();
    return label.empty() ? "R" + std::to_string(k + 1) : label;
}

double intensity(const Network& network, std::size_t k, const State& x) {
    const Reaction& r = network.reaction(k);
    double value = r.rate_const();
    const auto& nu = r.nu();
    for (std::size_t i = 0; i < nu.size(); ++i) {
        for (Count j = 0; j < nu[i]; ++j) {
            Count factor = x[i] - j;
            if (factor <= 0) {
                return 0.0;
            }
            value *= static_cast<double>(factor);
        }
    }
    Count order = r.order();
    if (order >= 2) {
        value /= std::pow(network.volume(), static_cast<double>(order - 1));
    }
    return value;
}

State apply_reaction(const Network& network, const State& x, std::size_t k) {
    const auto& zeta = network.reaction(k).zeta();
    State out(x);
    for (std::size_t i = 0; i < zeta.size(); ++i) {
        if (__builtin_add_overflow(out[i], zeta[i], &out[i])) {
            throw CountOverflow("species count overflow applying " + network.reaction_name(k));
        }
        if (out[i] < 0) {
            throw NegativeCount("reaction " + network.reaction_name(k) +
                                " drives species " + network.species()[i].name + " negative");
        }
    }
    return out;
}

std::vector<ConservationLaw> conservation_laws(const Network& network) {
    cone::Matrix eq;
    for (const auto& r : network.reactions()) {
        RationalVector row(network.num_species());
        bool nonzero = false;
        for (std::size_t i = 0; i < row.size(); ++i) {
            row[i] = r.zeta()[i];
            nonzero = nonzero || r.zeta()[i] != 0;
        }
        if (nonzero) {
            eq.push_back(std::move(row));
        }
    }
    std::vector<ConservationLaw> out;
    for (auto& ray : cone::nonneg_kernel_rays(eq, network.num_species())) {
        out.push_back(ConservationLaw{std::move(ray)});
    }
    return out;
}

std::vector<double> classical_ode_rhs(const Network& network, const std::vector<double>& kappa,
                                      const std::vector<double>& z) {
    if (kappa.size() != network.num_reactions() || z.size() != network.num_species()) {
        throw std::invalid_argument("classical_ode_rhs: dimension mismatch");
    }
    std::vector<double> out(network.num_species(), 0.0);
    for (std::size_t k = 0; k < network.num_reactions(); ++k) {
        const Reaction& r = network.reaction(k);
        double rate = kappa[k];
        for (std::size_t i = 0; i < z.size(); ++i) {
            for (Count j = 0; j < r.nu()[i]; ++j) {
                rate *= z[i];
            }
        }
        for (std::size_t i = 0; i < z.size(); ++i) {
            out[i] += rate * static_cast<double>(r.zeta()[i]);
        }
    }
    return out;
}

std::vector<Diagnostic> validate(const Network& network) {
    std::vector<Diagnostic> out;
    const auto n = network.num_species();
    std::vector<bool> touched(n, false);
    std::set<std::pair<std::vector<Count>, std::vector<Count>>> seen;
    for (std::size_t k = 0; k < network.num_reactions(); ++k) {
        const Reaction& r = network.reaction(k);
        const std::string name = network.reaction_name(k);
        if (r.order() > 2) {
            out.push_back({Diagnostic::Severity::Warning,
                           name + ": order " + std::to_string(r.order()) +
                               " exceeds the binary (order <= 2) assumption",
                           k, std::nullopt});
        }
        if (!(r.rate_const() > 0.0) || !std::isfinite(r.rate_const())) {
            out.push_back({Diagnostic::Severity::Error, name + ": nonpositive rate constant", k,
                           std::nullopt});
        }
        if (!seen.insert({r.nu(), r.nu_prime()}).second) {
            out.push_back({Diagnostic::Severity::Warning, name + ": duplicate reaction", k,
                           std::nullopt});
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (r.nu()[i] != 0 || r.nu_prime()[i] != 0) {
                touched[i] = true;
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!touched[i]) {
            out.push_back({Diagnostic::Severity::Warning,
                           "species " + network.species()[i].name +
                               " is never produced nor consumed",
                           std::nullopt, i});
        }
    }
    return out;
}

}  // namespace crn
