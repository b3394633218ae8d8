#include "crn/scaling.hpp"

#include "crn/cone.hpp"
#include "crn/errors.hpp"

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/strong_components.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace crn::scaling {

namespace {

enum class Sign { Plus, Minus, Zero };

ExtRational max_rho(const ScalingSpec& spec, const std::vector<std::size_t>& reactions) {
    ExtRational m = ExtRational::neg_inf();
    for (std::size_t k : reactions) {
        m = max(m, ExtRational(spec.rho[k]));
    }
    return m;
}

Verdict classify(bool balanced, const ExtRational& bound, const Rational& gamma) {
    if (balanced) {
        return Verdict::Balanced;
    }
    return ExtRational(gamma) <= bound ? Verdict::ConstraintSatisfied : Verdict::ConstraintViolated;
}

RationalVector zeta_row(const Reaction& r) {
    RationalVector row(r.zeta().size());
    for (std::size_t i = 0; i < row.size(); ++i) {
        row[i] = r.zeta()[i];
    }
    return row;
}

// Feasibility of a strict sign pattern for theta >= 0, theta != 0, supported in
// `vars`. Homogenised: strict inequalities become >= 1 / <= -1 and theta != 0
// becomes sum(theta) >= 1, valid because the solution set is a cone.
std::optional<RationalVector> solve_pattern(const Network& network,
                                            const std::vector<std::size_t>& vars,
                                            const std::vector<std::pair<std::size_t, Sign>>& signs) {
    const std::size_t d = vars.size();
    if (d == 0) {
        return std::nullopt;
    }
    std::vector<cone::Constraint> cs;
    cone::Constraint norm;
    norm.a.assign(d, Rational(1));
    norm.op = cone::Constraint::Op::Ge;
    norm.b = 1;
    cs.push_back(norm);
    for (const auto& [k, s] : signs) {
        cone::Constraint c;
        c.a.resize(d);
        bool any = false;
        for (std::size_t j = 0; j < d; ++j) {
            c.a[j] = network.reaction(k).zeta()[vars[j]];
            any = any || c.a[j] != 0;
        }
        switch (s) {
            case Sign::Plus:
                if (!any) {
                    return std::nullopt;
                }
                c.op = cone::Constraint::Op::Ge;
                c.b = 1;
                break;
            case Sign::Minus:
                if (!any) {
                    return std::nullopt;
                }
                c.op = cone::Constraint::Op::Le;
                c.b = -1;
                break;
            case Sign::Zero:
                if (!any) {
                    continue;
                }
                c.op = cone::Constraint::Op::Eq;
                c.b = 0;
                break;
        }
        cs.push_back(std::move(c));
    }
    auto x = cone::find_feasible(cs, d);
    if (!x) {
        return std::nullopt;
    }
    RationalVector theta(network.num_species());
    for (std::size_t j = 0; j < d; ++j) {
        theta[vars[j]] = (*x)[j];
    }
    return theta;
}

Sign sign_of(const Rational& v) {
    if (v > 0) {
        return Sign::Plus;
    }
    if (v < 0) {
        return Sign::Minus;
    }
    return Sign::Zero;
}

std::vector<std::pair<std::size_t, Sign>> class_signs(const SignClass& c) {
    std::vector<std::pair<std::size_t, Sign>> s;
    for (std::size_t k : c.gamma_plus) {
        s.emplace_back(k, Sign::Plus);
    }
    for (std::size_t k : c.gamma_minus) {
        s.emplace_back(k, Sign::Minus);
    }
    for (std::size_t k : c.gamma_zero) {
        s.emplace_back(k, Sign::Zero);
    }
    return s;
}

// Cache of "minimal alpha level" answers keyed by class pattern and allowed
// species set; shared across alpha assignments in propose_alpha.
using LevelKey = std::pair<std::vector<std::pair<std::size_t, int>>, std::vector<std::size_t>>;

class ClassEvaluator {
  public:
    explicit ClassEvaluator(const Network& network) : network_(network) {}

    bool feasible_within(const SignClass& c, const std::vector<std::size_t>& allowed) {
        std::vector<std::pair<std::size_t, int>> pattern;
        for (const auto& [k, s] : class_signs(c)) {
            pattern.emplace_back(k, static_cast<int>(s));
        }
        LevelKey key{std::move(pattern), allowed};
        auto it = cache_.find(key);
        if (it != cache_.end()) {
            return it->second;
        }
        bool ok = solve_pattern(network_, allowed, class_signs(c)).has_value();
        cache_.emplace(std::move(key), ok);
        return ok;
    }

    ClassVerdict evaluate(const ScalingSpec& spec, const SignClass& c,
                          const std::vector<std::size_t>& support, const Rational& gamma) {
        ClassVerdict v;
        v.sign_class = c;
        v.max_plus = max_rho(spec, c.gamma_plus);
        v.max_minus = max_rho(spec, c.gamma_minus);
        v.balanced = v.max_plus == v.max_minus;
        std::vector<std::size_t> changed = c.gamma_plus;
        changed.insert(changed.end(), c.gamma_minus.begin(), c.gamma_minus.end());
        ExtRational m = max_rho(spec, changed);
        if (m.is_neg_inf()) {
            v.bound = ExtRational::pos_inf();
        } else {
            std::set<Rational> levels;
            for (std::size_t i : support) {
                levels.insert(spec.alpha[i]);
            }
            std::optional<Rational> level;
            for (const auto& L : levels) {
                std::vector<std::size_t> allowed;
                for (std::size_t i : support) {
                    if (spec.alpha[i] <= L) {
                        allowed.push_back(i);
                    }
                }
                if (allowed.size() == support.size() || feasible_within(c, allowed)) {
                    level = L;
                    break;
                }
            }
            v.bound = ExtRational(*level) - m;
        }
        v.satisfied = v.balanced || ExtRational(gamma) <= v.bound;
        return v;
    }

  private:
    const Network& network_;
    std::map<LevelKey, bool> cache_;
};

struct SccClasses {
    std::vector<std::size_t> support;
    std::vector<SignClass> classes;
};

std::vector<SccClasses> classes_per_scc(const Network& network,
                                        const std::vector<std::vector<std::size_t>>& sccs,
                                        const EnumerationOptions& options) {
    std::vector<SccClasses> out;
    for (const auto& scc : sccs) {
        out.push_back({scc, enumerate_sign_classes(network, scc, options)});
    }
    return out;
}

}  // namespace

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Balanced:
            return "balanced";
        case Verdict::ConstraintSatisfied:
            return "unbalanced (time-scale constraint satisfied)";
        case Verdict::ConstraintViolated:
            return "unbalanced (time-scale constraint violated)";
    }
    return "?";
}

NetChange net_change(const Network& network, const RationalVector& theta) {
    NetChange nc;
    for (std::size_t k = 0; k < network.num_reactions(); ++k) {
        Rational v = 0;
        const auto& z = network.reaction(k).zeta();
        for (std::size_t i = 0; i < theta.size(); ++i) {
            if (z[i] != 0 && theta[i] != 0) {
                v += theta[i] * z[i];
            }
        }
        if (v > 0) {
            nc.plus.push_back(k);
        } else if (v < 0) {
            nc.minus.push_back(k);
        }
    }
    return nc;
}

Rational species_timescale(const Network& network, const ScalingSpec& spec, std::size_t i) {
    RationalVector e(network.num_species());
    e.at(i) = 1;
    NetChange nc = net_change(network, e);
    std::vector<std::size_t> all = nc.plus;
    all.insert(all.end(), nc.minus.begin(), nc.minus.end());
    if (all.empty()) {
        throw IsolatedSpecies("species " + network.species()[i].name +
                              " is not changed by any reaction");
    }
    return spec.alpha[i] - max_rho(spec, all).value();
}

BalanceCheck check_species_balance(const Network& network, const ScalingSpec& spec, std::size_t i,
                                   const Rational& gamma) {
    RationalVector e(network.num_species());
    e.at(i) = 1;
    return check_collective_balance(network, spec, e, gamma);
}

ExtRational theta_timescale(const Network& network, const ScalingSpec& spec,
                            const RationalVector& theta) {
    NetChange nc = net_change(network, theta);
    std::vector<std::size_t> all = nc.plus;
    all.insert(all.end(), nc.minus.begin(), nc.minus.end());
    if (all.empty()) {
        return ExtRational::pos_inf();
    }
    std::optional<Rational> amax;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (theta[i] > 0 && (!amax || spec.alpha[i] > *amax)) {
            amax = spec.alpha[i];
        }
    }
    return ExtRational(*amax) - max_rho(spec, all);
}

BalanceCheck check_collective_balance(const Network& network, const ScalingSpec& spec,
                                      const RationalVector& theta, const Rational& gamma) {
    NetChange nc = net_change(network, theta);
    BalanceCheck b;
    b.max_plus = max_rho(spec, nc.plus);
    b.max_minus = max_rho(spec, nc.minus);
    b.bound = theta_timescale(network, spec, theta);
    b.verdict = classify(b.max_plus == b.max_minus, b.bound, gamma);
    return b;
}

std::vector<std::vector<std::size_t>> scc_decompose(const Network& network) {
    using Graph = boost::adjacency_list<boost::vecS, boost::vecS, boost::directedS>;
    const std::size_t n = network.num_species();
    Graph g(n);
    for (const auto& r : network.reactions()) {
        for (std::size_t i = 0; i < n; ++i) {
            if (r.nu()[i] == 0) {
                continue;
            }
            for (std::size_t j = 0; j < n; ++j) {
                if (r.nu_prime()[j] > 0) {
                    boost::add_edge(i, j, g);
                }
            }
        }
    }
    std::vector<int> comp(n);
    int count = n == 0 ? 0 : boost::strong_components(g, comp.data());
    std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(count));
    for (std::size_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(comp[i])].push_back(i);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<SignClass> enumerate_sign_classes(const Network& network,
                                              const std::vector<std::size_t>& support,
                                              const EnumerationOptions& options) {
    std::vector<SignClass> out;
    if (support.empty()) {
        return out;
    }
    std::vector<std::size_t> vars = support;
    std::sort(vars.begin(), vars.end());
    std::vector<std::size_t> touched;
    std::vector<std::size_t> untouched;
    for (std::size_t k = 0; k < network.num_reactions(); ++k) {
        bool t = false;
        for (std::size_t i : vars) {
            t = t || network.reaction(k).zeta()[i] != 0;
        }
        (t ? touched : untouched).push_back(k);
    }
    std::vector<RationalVector> rows;
    for (std::size_t k : touched) {
        rows.push_back(zeta_row(network.reaction(k)));
    }
    std::uint64_t nodes = 0;
    std::vector<std::pair<std::size_t, Sign>> assigned;

    std::function<void(std::size_t, const RationalVector&)> dfs =
        [&](std::size_t depth, const RationalVector& witness) {
            if (depth == touched.size()) {
                SignClass c;
                for (const auto& [k, s] : assigned) {
                    (s == Sign::Plus ? c.gamma_plus : s == Sign::Minus ? c.gamma_minus : c.gamma_zero)
                        .push_back(k);
                }
                c.gamma_zero.insert(c.gamma_zero.end(), untouched.begin(), untouched.end());
                std::sort(c.gamma_zero.begin(), c.gamma_zero.end());
                RationalVector w = primitive_integer(witness);
                // Re-check the witness by direct substitution before reporting.
                for (const auto& [k, s] : assigned) {
                    if (sign_of(dot(w, zeta_row(network.reaction(k)))) != s) {
                        throw std::logic_error("sign-class witness failed verification");
                    }
                }
                c.witness = std::move(w);
                c.feasible = true;
                out.push_back(std::move(c));
                return;
            }
            const std::size_t k = touched[depth];
            const Sign current = sign_of(dot(witness, rows[depth]));
            for (Sign s : {Sign::Plus, Sign::Minus, Sign::Zero}) {
                if (++nodes > options.budget) {
                    throw SearchBudgetExceeded("sign-class enumeration exceeded budget of " +
                                               std::to_string(options.budget) + " nodes");
                }
                assigned.emplace_back(k, s);
                if (s == current) {
                    dfs(depth + 1, witness);
                } else if (auto w = solve_pattern(network, vars, assigned)) {
                    dfs(depth + 1, *w);
                }
                assigned.pop_back();
            }
        };

    auto start = solve_pattern(network, vars, {});
    if (start) {
        dfs(0, *start);
    }
    return out;
}

std::vector<std::size_t> gamma_set(const Network& network, const ScalingSpec& spec, std::size_t i,
                                   const Rational& gamma) {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < network.num_reactions(); ++k) {
        if (network.reaction(k).zeta()[i] != 0 && gamma + spec.rho[k] == spec.alpha[i]) {
            out.push_back(k);
        }
    }
    return out;
}

ExtRational compute_r1(const Network& network, const ScalingSpec& spec) {
    ExtRational r1 = ExtRational::pos_inf();
    for (std::size_t i = 0; i < network.num_species(); ++i) {
        try {
            r1 = min(r1, ExtRational(species_timescale(network, spec, i)));
        } catch (const IsolatedSpecies&) {
        }
    }
    return r1;
}

K2Result compute_k2_r2(const Network& network, const ScalingSpec& spec) {
    K2Result res;
    const std::size_t n = network.num_species();
    ExtRational r1 = compute_r1(network, spec);
    std::set<std::size_t> fast;
    if (r1.is_finite()) {
        for (std::size_t i = 0; i < n; ++i) {
            auto g = gamma_set(network, spec, i, r1.value());
            if (!g.empty()) {
                res.l1_species.push_back(i);
                fast.insert(g.begin(), g.end());
            }
        }
    }
    res.fast_reactions.assign(fast.begin(), fast.end());
    std::vector<bool> in_l1(n, false);
    for (std::size_t i : res.l1_species) {
        in_l1[i] = true;
    }
    cone::Matrix eq;
    for (std::size_t k : res.fast_reactions) {
        RationalVector row(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (in_l1[i]) {
                row[i] = network.reaction(k).zeta()[i];
            }
        }
        eq.push_back(std::move(row));
    }
    res.generators = cone::nonneg_kernel_rays(eq, n);
    for (const auto& g : res.generators) {
        ExtRational t = theta_timescale(network, spec, g);
        res.generator_timescales.push_back(t);
        res.r2 = min(res.r2, t);
    }
    return res;
}

BalanceReport verify_all_balance(const Network& network, const ScalingSpec& spec,
                                 const Rational& gamma, const EnumerationOptions& options) {
    BalanceReport rep;
    rep.gamma = gamma;
    rep.sccs = scc_decompose(network);
    const std::size_t n = network.num_species();
    for (std::size_t i = 0; i < n; ++i) {
        SpeciesVerdict sv;
        RationalVector e(n);
        e[i] = 1;
        NetChange nc = net_change(network, e);
        sv.isolated = nc.plus.empty() && nc.minus.empty();
        sv.check = check_species_balance(network, spec, i, gamma);
        rep.natural_timescales.push_back(sv.check.bound);
        if (sv.check.verdict == Verdict::ConstraintViolated) {
            rep.admissible = false;
        }
        rep.species_verdicts.push_back(sv);
    }
    ClassEvaluator eval(network);
    auto per_scc = classes_per_scc(network, rep.sccs, options);
    for (std::size_t s = 0; s < per_scc.size(); ++s) {
        for (const auto& c : per_scc[s].classes) {
            ClassVerdict v = eval.evaluate(spec, c, per_scc[s].support, gamma);
            v.scc = s;
            if (!v.balanced) {
                rep.max_admissible_gamma = min(rep.max_admissible_gamma, v.bound);
            }
            rep.admissible = rep.admissible && v.satisfied;
            rep.class_verdicts.push_back(std::move(v));
        }
    }
    rep.r1 = compute_r1(network, spec);
    rep.k2 = compute_k2_r2(network, spec);
    bool has_finite = false;
    for (const auto& t : rep.k2.generator_timescales) {
        has_finite = has_finite || t.is_finite();
    }
    rep.r2_exceeds_r1 = !has_finite || rep.k2.r2 > rep.r1;
    return rep;
}

ExtRational max_admissible_gamma_full(const Network& network, const ScalingSpec& spec,
                                      const EnumerationOptions& options) {
    std::vector<std::size_t> all(network.num_species());
    for (std::size_t i = 0; i < all.size(); ++i) {
        all[i] = i;
    }
    ClassEvaluator eval(network);
    ExtRational m = ExtRational::pos_inf();
    for (const auto& c : enumerate_sign_classes(network, all, options)) {
        ClassVerdict v = eval.evaluate(spec, c, all, Rational(0));
        if (!v.balanced) {
            m = min(m, v.bound);
        }
    }
    return m;
}

std::vector<AlphaCandidate> propose_alpha(const Network& network, const RationalVector& beta,
                                          const std::vector<std::vector<Rational>>& candidate_grid,
                                          const EnumerationOptions& options) {
    const std::size_t n = network.num_species();
    if (candidate_grid.size() != n) {
        throw std::invalid_argument("propose_alpha: grid must list candidates for every species");
    }
    for (const auto& g : candidate_grid) {
        if (g.empty()) {
            throw std::invalid_argument("propose_alpha: empty candidate list");
        }
    }
    auto sccs = scc_decompose(network);
    auto per_scc = classes_per_scc(network, sccs, options);
    ClassEvaluator eval(network);
    std::uint64_t total = 1;
    for (const auto& g : candidate_grid) {
        total *= g.size();
        if (total > options.budget) {
            throw SearchBudgetExceeded("alpha grid has more assignments than the search budget");
        }
    }
    std::vector<AlphaCandidate> scored;
    std::vector<std::size_t> idx(n, 0);
    for (std::uint64_t t = 0; t < total; ++t) {
        RationalVector alpha(n);
        for (std::size_t i = 0; i < n; ++i) {
            alpha[i] = candidate_grid[i][idx[i]];
        }
        ScalingSpec spec = make_scaling_spec(network, 2.0, alpha, beta);
        AlphaCandidate cand;
        cand.alpha = alpha;
        cand.max_admissible_gamma = ExtRational::pos_inf();
        for (const auto& sc : per_scc) {
            for (const auto& c : sc.classes) {
                ClassVerdict v = eval.evaluate(spec, c, sc.support, Rational(0));
                if (v.balanced) {
                    ++cand.balanced_classes;
                } else {
                    cand.max_admissible_gamma = min(cand.max_admissible_gamma, v.bound);
                }
            }
        }
        scored.push_back(std::move(cand));
        for (std::size_t i = n; i-- > 0;) {
            if (++idx[i] < candidate_grid[i].size()) {
                break;
            }
            idx[i] = 0;
        }
    }
    std::vector<AlphaCandidate> front;
    for (const auto& a : scored) {
        bool dominated = false;
        for (const auto& b : scored) {
            bool ge = b.balanced_classes >= a.balanced_classes &&
                      b.max_admissible_gamma >= a.max_admissible_gamma;
            bool gt = b.balanced_classes > a.balanced_classes ||
                      b.max_admissible_gamma > a.max_admissible_gamma;
            if (ge && gt) {
                dominated = true;
                break;
            }
        }
        if (!dominated) {
            front.push_back(a);
        }
    }
    std::sort(front.begin(), front.end(), [](const AlphaCandidate& a, const AlphaCandidate& b) {
        if (a.balanced_classes != b.balanced_classes) {
            return a.balanced_classes > b.balanced_classes;
        }
        if (a.max_admissible_gamma != b.max_admissible_gamma) {
            return a.max_admissible_gamma > b.max_admissible_gamma;
        }
        return a.alpha < b.alpha;
    });
    return front;
}

std::string format_combination(const Network& network, const RationalVector& theta) {
    std::string out;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (theta[i] == 0) {
            continue;
        }
        if (!out.empty()) {
            out += " + ";
        }
        if (theta[i] != 1) {
            out += crn::to_string(theta[i]);
        }
        out += network.species()[i].name;
    }
    return out.empty() ? "0" : out;
}

namespace {

std::string rho_join(const std::vector<std::size_t>& ks) {
    if (ks.empty()) {
        return "-inf";
    }
    std::string s;
    for (std::size_t j = 0; j < ks.size(); ++j) {
        s += (j ? " v " : "") + std::string("rho") + std::to_string(ks[j] + 1);
    }
    return s;
}

}  // namespace

std::string format_balance_table(const Network& network, const ScalingSpec& spec,
                                 const BalanceReport& report) {
    std::ostringstream out;
    out << "gamma = " << crn::to_string(report.gamma) << "\n\n";
    out << "Variable | Balance equation | Exponents | Verdict | Time scale\n";
    out << "---|---|---|---|---\n";
    const std::size_t n = network.num_species();
    for (std::size_t i = 0; i < n; ++i) {
        RationalVector e(n);
        e[i] = 1;
        NetChange nc = net_change(network, e);
        const auto& sv = report.species_verdicts[i];
        out << network.species()[i].name << " | " << rho_join(nc.plus) << " = "
            << rho_join(nc.minus) << " | " << sv.check.max_plus.str() << " = "
            << sv.check.max_minus.str() << " | " << to_string(sv.check.verdict) << " | "
            << sv.check.bound.str() << "\n";
    }
    for (const auto& cv : report.class_verdicts) {
        const auto& c = cv.sign_class;
        std::string verdict = cv.balanced ? "balanced"
                              : cv.satisfied
                                  ? "unbalanced (time-scale constraint satisfied)"
                                  : "unbalanced (time-scale constraint violated)";
        out << format_combination(network, *c.witness) << " | " << rho_join(c.gamma_plus) << " = "
            << rho_join(c.gamma_minus) << " | " << cv.max_plus.str() << " = "
            << cv.max_minus.str() << " | " << verdict << " | " << cv.bound.str() << "\n";
    }
    out << "\nnatural time scales:";
    for (std::size_t i = 0; i < n; ++i) {
        out << " " << network.species()[i].name << "=" << report.natural_timescales[i].str();
    }
    out << "\nr1 = " << report.r1.str() << "\nr2 = " << report.k2.r2.str()
        << "\nmax admissible gamma = " << report.max_admissible_gamma.str()
        << "\nadmissible at gamma = " << crn::to_string(report.gamma) << ": "
        << (report.admissible ? "yes" : "no") << "\n";
    (void)spec;
    return out.str();
}

}  // namespace crn::scaling
