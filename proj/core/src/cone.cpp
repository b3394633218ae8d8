#include "crn/cone.hpp"

#include <algorithm>
#include <stdexcept>

namespace crn::cone {

namespace {

using Support = std::vector<bool>;

Support support_of(const RationalVector& v) {
    Support s(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        s[i] = v[i] != 0;
    }
    return s;
}

bool subset(const Support& a, const Support& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] && !b[i]) {
            return false;
        }
    }
    return true;
}

// Keeps only rays whose support is minimal; duplicates of a support are
// proportional in a pointed cone of this form, so one representative suffices.
std::vector<RationalVector> minimal_support(std::vector<RationalVector> rays) {
    std::vector<Support> supp;
    supp.reserve(rays.size());
    for (const auto& r : rays) {
        supp.push_back(support_of(r));
    }
    std::vector<RationalVector> out;
    std::vector<Support> kept;
    for (std::size_t a = 0; a < rays.size(); ++a) {
        bool dominated = false;
        for (std::size_t b = 0; b < rays.size() && !dominated; ++b) {
            if (a == b) {
                continue;
            }
            if (subset(supp[b], supp[a]) && supp[b] != supp[a]) {
                dominated = true;
            }
        }
        if (dominated) {
            continue;
        }
        if (std::find(kept.begin(), kept.end(), supp[a]) != kept.end()) {
            continue;
        }
        kept.push_back(supp[a]);
        out.push_back(std::move(rays[a]));
    }
    return out;
}

}  // namespace

std::vector<RationalVector> nonneg_kernel_rays(const Matrix& equations, std::size_t dim) {
    std::vector<RationalVector> rays;
    for (std::size_t i = 0; i < dim; ++i) {
        RationalVector e(dim);
        e[i] = 1;
        rays.push_back(std::move(e));
    }
    for (const auto& row : equations) {
        if (row.size() != dim) {
            throw std::invalid_argument("nonneg_kernel_rays: row length mismatch");
        }
        std::vector<RationalVector> zero;
        std::vector<std::pair<RationalVector, Rational>> pos;
        std::vector<std::pair<RationalVector, Rational>> neg;
        for (auto& r : rays) {
            Rational v = dot(row, r);
            if (v == 0) {
                zero.push_back(std::move(r));
            } else if (v > 0) {
                pos.emplace_back(std::move(r), v);
            } else {
                neg.emplace_back(std::move(r), v);
            }
        }
        std::vector<RationalVector> next = std::move(zero);
        for (const auto& [p, vp] : pos) {
            for (const auto& [n, vn] : neg) {
                RationalVector c(dim);
                for (std::size_t i = 0; i < dim; ++i) {
                    c[i] = vp * n[i] - vn * p[i];
                }
                next.push_back(primitive_integer(c));
            }
        }
        rays = minimal_support(std::move(next));
    }
    for (auto& r : rays) {
        r = primitive_integer(r);
    }
    std::sort(rays.begin(), rays.end());
    return rays;
}

std::optional<RationalVector> find_feasible(const std::vector<Constraint>& constraints,
                                            std::size_t dim) {
    const std::size_t m = constraints.size();
    std::size_t n_slack = 0;
    for (const auto& c : constraints) {
        if (c.a.size() != dim) {
            throw std::invalid_argument("find_feasible: constraint length mismatch");
        }
        if (c.op != Constraint::Op::Eq) {
            ++n_slack;
        }
    }
    // Columns: x (dim), slacks, artificials, rhs.
    const std::size_t n_cols = dim + n_slack + m;
    std::vector<RationalVector> t(m, RationalVector(n_cols + 1));
    std::vector<std::size_t> basis(m);
    std::size_t slack = dim;
    for (std::size_t r = 0; r < m; ++r) {
        const auto& c = constraints[r];
        for (std::size_t j = 0; j < dim; ++j) {
            t[r][j] = c.a[j];
        }
        if (c.op == Constraint::Op::Le) {
            t[r][slack++] = 1;
        } else if (c.op == Constraint::Op::Ge) {
            t[r][slack++] = -1;
        }
        t[r][n_cols] = c.b;
        if (c.b < 0) {
            for (auto& v : t[r]) {
                v = -v;
            }
        }
        t[r][dim + n_slack + r] = 1;
        basis[r] = dim + n_slack + r;
    }
    // Phase-one objective: minimise the artificial sum, kept as reduced costs.
    RationalVector cost(n_cols + 1);
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t j = 0; j <= n_cols; ++j) {
            if (j < dim + n_slack || j == n_cols) {
                cost[j] -= t[r][j];
            }
        }
    }
    const std::size_t first_art = dim + n_slack;
    for (;;) {
        std::size_t enter = n_cols;
        for (std::size_t j = 0; j < n_cols; ++j) {
            if (cost[j] < 0) {
                enter = j;
                break;
            }
        }
        if (enter == n_cols) {
            break;
        }
        std::size_t leave = m;
        Rational best;
        for (std::size_t r = 0; r < m; ++r) {
            if (t[r][enter] > 0) {
                Rational ratio = t[r][n_cols] / t[r][enter];
                if (leave == m || ratio < best || (ratio == best && basis[r] < basis[leave])) {
                    leave = r;
                    best = ratio;
                }
            }
        }
        if (leave == m) {
            break;  // unbounded in phase one cannot happen; objective is bounded below
        }
        Rational piv = t[leave][enter];
        for (auto& v : t[leave]) {
            if (v != 0) {
                v /= piv;
            }
        }
        for (std::size_t r = 0; r < m; ++r) {
            if (r == leave || t[r][enter] == 0) {
                continue;
            }
            Rational f = t[r][enter];
            for (std::size_t j = 0; j <= n_cols; ++j) {
                if (t[leave][j] != 0) {
                    t[r][j] -= f * t[leave][j];
                }
            }
        }
        if (cost[enter] != 0) {
            Rational f = cost[enter];
            for (std::size_t j = 0; j <= n_cols; ++j) {
                if (t[leave][j] != 0) {
                    cost[j] -= f * t[leave][j];
                }
            }
        }
        basis[leave] = enter;
    }
    if (cost[n_cols] != 0) {
        return std::nullopt;
    }
    RationalVector x(dim);
    for (std::size_t r = 0; r < m; ++r) {
        if (basis[r] < dim) {
            x[basis[r]] = t[r][n_cols];
        } else if (basis[r] >= first_art && t[r][n_cols] != 0) {
            return std::nullopt;
        }
    }
    return x;
}

}  // namespace crn::cone
