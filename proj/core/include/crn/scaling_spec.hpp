#pragma once

#include "crn/network.hpp"
#include "crn/rational.hpp"

#include <vector>

namespace crn {

/// One-parameter embedding of a network: abundances scale as N^alpha_i and
/// rate constants as kappa'_k = kappa_k N0^beta_k.
struct ScalingSpec {
    double N0 = 0.0;
    RationalVector alpha;
    RationalVector beta;
    /// kappa'_k N0^(-beta_k).
    std::vector<double> kappa;
    /// beta_k + nu_k . alpha.
    RationalVector rho;
};

/// Derives kappa and rho. Throws std::invalid_argument on dimension mismatch,
/// N0 <= 1 or a negative alpha entry.
ScalingSpec make_scaling_spec(const Network& network, double N0, RationalVector alpha,
                              RationalVector beta);

/// N^q for rational q, evaluated in double precision.
double rational_power(double base, const Rational& q);

}  // namespace crn
