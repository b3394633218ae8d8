#pragma once

#include "crn/rational.hpp"

#include <optional>
#include <vector>

namespace crn::cone {

/// Row-major rational matrix; every row has the same length.
using Matrix = std::vector<RationalVector>;

/// Extreme rays of the pointed cone {x >= 0 : A x = 0}, where A has one row
/// per equation. Rays are primitive integer vectors sorted lexicographically.
std::vector<RationalVector> nonneg_kernel_rays(const Matrix& equations, std::size_t dim);

/// Linear constraint a . x (op) b.
struct Constraint {
    enum class Op { Le, Ge, Eq };
    RationalVector a;
    Op op = Op::Eq;
    Rational b;
};

/// Returns a point x >= 0 satisfying all constraints, or nullopt when the
/// system is infeasible. Exact phase-one simplex with Bland's rule.
std::optional<RationalVector> find_feasible(const std::vector<Constraint>& constraints,
                                            std::size_t dim);

}  // namespace crn::cone
