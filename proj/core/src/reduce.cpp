#include "crn/reduce.hpp"

#include "crn/cone.hpp"
#include "crn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace crn::reduce {

namespace {

Rational max_alpha_on_support(const ScalingSpec& spec, const RationalVector& theta) {
    Rational a = -1;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (theta[i] != 0 && spec.alpha[i] > a) {
            a = spec.alpha[i];
        }
    }
    return a < 0 ? Rational(0) : a;
}

RationalVector unit(std::size_t n, std::size_t i) {
    RationalVector v(n);
    v[i] = 1;
    return v;
}

// theta . zeta_k over all species, and over the species attaining alpha_theta.
std::pair<Rational, Rational> coefficients(const Network& network, const ScalingSpec& spec,
                                           const RationalVector& theta, const Rational& alpha_theta,
                                           std::size_t k) {
    Rational all = 0;
    Rational top = 0;
    const auto& z = network.reaction(k).zeta();
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (theta[i] == 0 || z[i] == 0) {
            continue;
        }
        Rational c = theta[i] * z[i];
        all += c;
        if (spec.alpha[i] == alpha_theta) {
            top += c;
        }
    }
    return {all, top};
}

std::string rational_text(const Rational& r) { return crn::to_string(r); }

}  // namespace

std::string to_string(TermKind k) {
    switch (k) {
        case TermKind::Vanishing:
            return "vanishing";
        case TermKind::Jump:
            return "jump";
        case TermKind::Drift:
            return "drift";
        case TermKind::Fast:
            return "fast";
    }
    return "?";
}

std::string to_string(VarKind k) {
    switch (k) {
        case VarKind::Frozen:
            return "frozen";
        case VarKind::Continuous:
            return "continuous";
        case VarKind::Discrete:
            return "discrete";
    }
    return "?";
}

TermKind classify_term(const Rational& gap, const Rational& alpha) {
    if (gap < 0) {
        return TermKind::Vanishing;
    }
    if (gap > 0) {
        return TermKind::Fast;
    }
    return alpha == 0 ? TermKind::Jump : TermKind::Drift;
}

std::optional<std::size_t> LimitModel::variable_index(const std::string& name) const {
    for (std::size_t v = 0; v < variables.size(); ++v) {
        if (variables[v].name == name) {
            return v;
        }
    }
    return std::nullopt;
}

FastBlock find_fast_block(const Network& network, const ScalingSpec& spec, const Rational& gamma) {
    FastBlock fb;
    const std::size_t n = network.num_species();
    std::set<std::size_t> reactions;
    for (std::size_t i = 0; i < n; ++i) {
        bool fast = false;
        for (std::size_t k = 0; k < network.num_reactions(); ++k) {
            if (network.reaction(k).zeta()[i] != 0 && gamma + spec.rho[k] - spec.alpha[i] > 0) {
                fast = true;
                reactions.insert(k);
            }
        }
        if (fast) {
            fb.species.push_back(i);
            if (spec.alpha[i] == 0) {
                fb.discrete_species.push_back(i);
            }
        }
    }
    fb.reactions.assign(reactions.begin(), reactions.end());

    // Leading order of the discrete block: reactions moving it with the
    // largest gap. Lower-order fast reactions are slower than the block's
    // mixing and are left to the averaged channels.
    bool any = false;
    for (std::size_t k : fb.reactions) {
        for (std::size_t i : fb.discrete_species) {
            if (network.reaction(k).zeta()[i] == 0) {
                continue;
            }
            Rational gap = gamma + spec.rho[k];
            if (!any || gap > fb.generator_gap) {
                fb.generator_gap = gap;
                fb.generator_reactions.clear();
                any = true;
            }
            if (gap == fb.generator_gap &&
                (fb.generator_reactions.empty() || fb.generator_reactions.back() != k)) {
                fb.generator_reactions.push_back(k);
            }
        }
    }
    const std::size_t d = fb.discrete_species.size();
    if (d > 0) {
        cone::Matrix eq;
        for (std::size_t k : fb.generator_reactions) {
            RationalVector row(d);
            for (std::size_t j = 0; j < d; ++j) {
                row[j] = network.reaction(k).zeta()[fb.discrete_species[j]];
            }
            eq.push_back(std::move(row));
        }
        for (const auto& ray : cone::nonneg_kernel_rays(eq, d)) {
            RationalVector full(n);
            for (std::size_t j = 0; j < d; ++j) {
                full[fb.discrete_species[j]] = ray[j];
            }
            fb.conserved.push_back(std::move(full));
        }
    }
    return fb;
}

LimitModel build_limit_model(const Network& network, const ScalingSpec& spec, const Rational& gamma,
                             const std::vector<AuxVariable>& aux, const BuildOptions& options) {
    const std::size_t n = network.num_species();
    const std::size_t R = network.num_reactions();
    LimitModel m;
    m.network = network;
    m.spec = spec;
    m.gamma = gamma;
    m.lets = options.lets;
    m.initial_z = options.initial_z.value_or(std::vector<double>(n, 0.0));
    if (m.initial_z.size() != n) {
        throw std::invalid_argument("initial_z has " + std::to_string(m.initial_z.size()) +
                                    " entries, expected " + std::to_string(n));
    }
    m.fast_block = find_fast_block(network, spec, gamma);
    std::vector<bool> eliminated(n, false);
    for (std::size_t i : m.fast_block.species) {
        eliminated[i] = true;
    }

    // Auxiliary variables must lie in K2.
    scaling::K2Result k2;
    if (!aux.empty()) {
        k2 = scaling::compute_k2_r2(network, spec);
    }
    std::vector<bool> in_l1(n, false);
    for (std::size_t i : k2.l1_species) {
        in_l1[i] = true;
    }
    for (const auto& a : aux) {
        if (a.theta.size() != n) {
            throw std::invalid_argument("auxiliary variable " + a.name + " has wrong dimension");
        }
        if (std::any_of(a.theta.begin(), a.theta.end(), [](const Rational& t) { return t < 0; })) {
            throw NotInK2("auxiliary variable " + a.name + " has a negative coefficient");
        }
        for (std::size_t k : k2.fast_reactions) {
            Rational s = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (in_l1[i]) {
                    s += a.theta[i] * network.reaction(k).zeta()[i];
                }
            }
            if (s != 0) {
                throw NotInK2("auxiliary variable " + a.name + " = " +
                              scaling::format_combination(network, a.theta) + " is changed by fast reaction " +
                              network.reaction_name(k) + " (theta . Pi1 zeta = " + rational_text(s) + ")");
            }
        }
        LimitVariable v;
        v.name = a.name;
        v.theta = a.theta;
        v.alpha = max_alpha_on_support(spec, a.theta);
        m.variables.push_back(std::move(v));
    }
    const std::size_t n_aux = m.variables.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (eliminated[i]) {
            continue;
        }
        LimitVariable v;
        v.name = network.species()[i].name;
        v.theta = unit(n, i);
        v.species = i;
        v.alpha = spec.alpha[i];
        m.variables.push_back(std::move(v));
    }

    // Classify every contributing (variable, reaction) pair.
    for (std::size_t v = 0; v < m.variables.size(); ++v) {
        auto& var = m.variables[v];
        bool live = false;
        double init = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (var.theta[i] != 0 && spec.alpha[i] == var.alpha) {
                init += to_double(var.theta[i]) * m.initial_z[i];
            }
        }
        var.initial = init;
        for (std::size_t k = 0; k < R; ++k) {
            auto [coef, top] = coefficients(network, spec, var.theta, var.alpha, k);
            if (coef == 0) {
                continue;
            }
            TermClass t;
            t.reaction = k;
            t.variable = v;
            t.exponent_gap = gamma + spec.rho[k] - var.alpha;
            t.cls = classify_term(t.exponent_gap, var.alpha);
            t.coefficient = coef;
            t.drift_coefficient = top;
            if (t.cls == TermKind::Fast) {
                if (v < n_aux && !options.averaged.count(k)) {
                    std::ostringstream os;
                    os << "reaction " << network.reaction_name(k) << " contributes N^"
                       << rational_text(t.exponent_gap) << " to " << var.name
                       << "; without averaging the limit needs gamma <= alpha - rho_k = "
                       << rational_text(var.alpha - spec.rho[k]);
                    throw FastTermUnresolved(os.str());
                }
                // A supplied average resolves the term at leading order.
                t.cls = var.alpha == 0 ? TermKind::Jump : TermKind::Drift;
            }
            if (t.cls != TermKind::Vanishing) {
                live = true;
            }
            m.terms.push_back(std::move(t));
        }
        if (!live) {
            var.kind = VarKind::Frozen;
        } else {
            var.kind = var.alpha > 0 ? VarKind::Continuous : VarKind::Discrete;
        }
    }

    // Channels: one per reaction acting on a live variable.
    bool generic_ok = true;
    for (std::size_t k : m.fast_block.generator_reactions) {
        for (std::size_t i = 0; i < n; ++i) {
            if (network.reaction(k).nu()[i] > 0 && eliminated[i] && spec.alpha[i] > 0) {
                generic_ok = false;
            }
        }
    }
    std::vector<bool> fast_discrete(n, false);
    for (std::size_t i : m.fast_block.discrete_species) {
        fast_discrete[i] = true;
    }
    for (std::size_t k = 0; k < R; ++k) {
        Channel ch;
        ch.name = network.reaction_name(k);
        ch.reaction = k;
        for (const auto& t : m.terms) {
            if (t.reaction != k || m.variables[t.variable].kind == VarKind::Frozen) {
                continue;
            }
            if (t.cls == TermKind::Jump) {
                ch.jumps.emplace_back(t.variable, to_double(t.coefficient));
            } else if (t.cls == TermKind::Drift) {
                ch.drifts.emplace_back(t.variable, to_double(t.drift_coefficient));
            }
        }
        if (ch.jumps.empty() && ch.drifts.empty()) {
            continue;
        }
        std::vector<std::size_t> hidden;
        bool averageable = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (network.reaction(k).nu()[i] > 0 && eliminated[i]) {
                hidden.push_back(i);
                averageable = averageable && fast_discrete[i];
            }
        }
        if (auto it = options.averaged.find(k); it != options.averaged.end()) {
            ch.source = Channel::RateSource::Expression;
            ch.rate = it->second;
        } else if (hidden.empty()) {
            ch.source = Channel::RateSource::MassAction;
        } else if (options.generic_averaging && averageable && generic_ok) {
            ch.source = Channel::RateSource::Generic;
        } else {
            std::ostringstream os;
            os << "reaction " << ch.name << " depends on eliminated species";
            for (std::size_t i : hidden) {
                os << ' ' << network.species()[i].name;
            }
            os << " that cannot be averaged generically; supply an averaged intensity";
            m.unresolved.push_back(os.str());
        }
        m.channels.push_back(std::move(ch));
    }
    m.closed = m.unresolved.empty();

    if (!m.fast_block.species.empty() || !options.averaged.empty()) {
        m.notes.push_back("stability assumed: the fast block is taken to have a unique equilibrium");
    }
    if (!m.fast_block.discrete_species.empty()) {
        m.notes.push_back("fast-block totals are held at their initial values");
    }
    if (options.check_admissibility) {
        auto rep = scaling::verify_all_balance(network, spec, gamma, options.enumeration);
        if (!rep.admissible) {
            m.notes.push_back("inadmissible: gamma = " + rational_text(gamma) +
                              " exceeds the admissible bound " + rep.max_admissible_gamma.str() +
                              "; normalised species numbers may diverge");
        }
    }
    return m;
}

double limit_intensity(const Network& network, const ScalingSpec& spec, std::size_t k,
                       const std::vector<double>& z) {
    const Reaction& r = network.reaction(k);
    double lam = spec.kappa[k];
    for (std::size_t i = 0; i < z.size(); ++i) {
        Count nu = r.nu()[i];
        if (nu == 0) {
            continue;
        }
        if (spec.alpha[i] > 0) {
            lam *= std::pow(z[i], static_cast<double>(nu));
        } else {
            for (Count j = 0; j < nu; ++j) {
                lam *= std::max(0.0, z[i] - static_cast<double>(j));
            }
        }
    }
    if (r.order() > 1) {
        lam /= std::pow(network.volume(), static_cast<double>(r.order() - 1));
    }
    return lam;
}

double averaged_intensity(const Network& network, const ScalingSpec& spec, std::size_t k,
                          const Equilibrium& eq, const std::vector<double>& z) {
    std::vector<double> w = z;
    double sum = 0.0;
    for (std::size_t s = 0; s < eq.support.size(); ++s) {
        if (eq.probs[s] == 0.0) {
            continue;
        }
        for (std::size_t j = 0; j < eq.species.size(); ++j) {
            w[eq.species[j]] = static_cast<double>(eq.support[s][j]);
        }
        sum += eq.probs[s] * limit_intensity(network, spec, k, w);
    }
    return sum;
}

Equilibrium goutsias_mu(long m, double kappa9, double kappa10) {
    if (m < 0) {
        throw std::invalid_argument("goutsias_mu: m must be nonnegative");
    }
    Equilibrium eq;
    eq.species = {0, 1};
    const double logr = std::log(kappa10 / kappa9);
    std::vector<double> logw;
    for (long z2 = 0; 2 * z2 <= m; ++z2) {
        long z1 = m - 2 * z2;
        eq.support.push_back({z1, z2});
        logw.push_back(static_cast<double>(z1 + z2) * logr - std::lgamma(z1 + 1.0) -
                       std::lgamma(z2 + 1.0));
    }
    double top = *std::max_element(logw.begin(), logw.end());
    double total = 0.0;
    for (double& l : logw) {
        l = std::exp(l - top);
        total += l;
    }
    for (double l : logw) {
        eq.probs.push_back(l / total);
    }
    return eq;
}

double goutsias_alpha(long m, double kappa9, double kappa10) {
    Equilibrium eq = goutsias_mu(m, kappa9, kappa10);
    double a = 0.0;
    for (std::size_t s = 0; s < eq.support.size(); ++s) {
        a += eq.probs[s] * static_cast<double>(eq.support[s][1]);
    }
    return a;
}

double alpha_moment_closure(long m, double kappa9, double kappa10) {
    // kappa10 a = kappa9 (m - 2a)(m - 2a - 1) rearranged to A a^2 + B a + C = 0.
    const double md = static_cast<double>(m);
    const double A = 4.0 * kappa9;
    const double B = -(2.0 * kappa9 * (2.0 * md - 1.0) + kappa10);
    const double C = kappa9 * md * (md - 1.0);
    const double disc = B * B - 4.0 * A * C;
    if (disc < 0) {
        throw NoRootInRange("alpha_moment_closure: negative discriminant for m = " + std::to_string(m));
    }
    // Cancellation-free pair of roots.
    const double q = -0.5 * (B + std::copysign(std::sqrt(disc), B));
    std::vector<double> roots;
    if (q != 0.0) {
        roots.push_back(C / q);
        roots.push_back(q / A);
    } else {
        roots.push_back(0.0);
    }
    const double eps = 1e-12 * std::max(1.0, md);
    for (double r : roots) {
        if (r >= -eps && r <= md / 2.0 + eps) {
            return std::clamp(r, 0.0, md / 2.0);
        }
    }
    throw NoRootInRange("alpha_moment_closure: no root in [0, m/2] for m = " + std::to_string(m));
}

std::array<double, 2> phi_pair(double y, double kappa9, double kappa10) {
    if (y <= 0.0) {
        return {0.0, 0.0};
    }
    // Rationalised form of (sqrt(k10^2 + 8 k9 k10 y) - k10) / (4 k9).
    const double s = std::sqrt(kappa10 * kappa10 + 8.0 * kappa9 * kappa10 * y);
    const double phi1 = 2.0 * kappa10 * y / (s + kappa10);
    return {phi1, (y - phi1) / 2.0};
}

double michaelis_menten_rhs(double x1, double M, const std::array<double, 3>& kappa) {
    return -M * kappa[0] * kappa[2] * x1 / (kappa[1] + kappa[2] + kappa[0] * x1);
}

LimitModel mastny_reduced_model(double kappa1, double kappa2, double kappa3, double z1_0,
                                double z3_0) {
    if (!(kappa1 > 0 && kappa2 > 0 && kappa3 > 0)) {
        throw std::invalid_argument("mastny_reduced_model: rates must be positive");
    }
    const double N0 = 1000.0;
    Network net({"S1", "S2", "S3"},
                {Reaction({1, 0, 0}, {0, 2, 0}, kappa1, "R1"),
                 Reaction({0, 2, 0}, {1, 0, 0}, kappa2 * N0, "R2"),
                 Reaction({0, 1, 0}, {0, 0, 1}, kappa3 * N0, "R3")});
    LimitModel m;
    m.network = net;
    m.spec = make_scaling_spec(net, N0, RationalVector(3), RationalVector{0, 1, 1});
    m.gamma = 0;
    m.initial_z = {z1_0, 0.0, z3_0};
    const Rational zero = 0;
    LimitVariable s1{"S1", unit(3, 0), 0, zero, VarKind::Discrete, z1_0};
    LimitVariable s3{"S3", unit(3, 2), 2, zero, VarKind::Discrete, z3_0};
    m.variables = {s1, s3};
    for (std::size_t v = 0; v < 2; ++v) {
        for (std::size_t k = 0; k < 3; ++k) {
            auto [coef, top] = coefficients(net, m.spec, m.variables[v].theta, zero, k);
            if (coef == 0) {
                continue;
            }
            Rational gap = m.spec.rho[k];
            m.terms.push_back({k, v, gap, classify_term(gap, zero), coef, top});
        }
    }
    m.fast_block = find_fast_block(net, m.spec, m.gamma);
    m.channels.push_back({"R3hat", std::nullopt, Channel::RateSource::Expression,
                          "k1*k3/(k2+k3)*S1", {{0, -1.0}, {1, 2.0}}, {}});
    m.channels.push_back(
        {"R2hat", std::nullopt, Channel::RateSource::Expression, "k1*k2/(k2+k3)*S1", {}, {}});
    m.closed = true;
    m.notes.push_back("balance conditions fail for S2; S2 is zero most of the time and is eliminated");
    m.notes.push_back("stability assumed: the fast block is taken to have a unique equilibrium");
    return m;
}

// ---------------------------------------------------------------------------

struct LimitEvaluator::Impl {
    std::vector<Expr> lets;
    std::vector<std::optional<Expr>> rates;
    std::size_t n_vars = 0;
    std::size_t kappa_slot = 0;
    std::size_t let_slot = 0;
    std::size_t n_slots = 0;
    bool has_generic = false;
    mutable std::mutex mu;
    mutable std::map<std::vector<double>, Equilibrium> cache;
};

LimitEvaluator::LimitEvaluator(const LimitModel& model) : model_(model), impl_(std::make_unique<Impl>()) {
    if (!model_.closed) {
        std::string msg = "limit model is not closed";
        for (const auto& u : model_.unresolved) {
            msg += "; " + u;
        }
        throw ModelNotClosed(msg);
    }
    auto& im = *impl_;
    const std::size_t R = model_.network.num_reactions();
    im.n_vars = model_.variables.size();
    im.kappa_slot = im.n_vars;
    // slots: variables, k1..kR, N0, lets
    im.let_slot = im.kappa_slot + R + 1;
    im.n_slots = im.let_slot + model_.lets.size();
    std::map<std::string, std::size_t> names;
    for (std::size_t v = 0; v < im.n_vars; ++v) {
        names[model_.variables[v].name] = v;
    }
    for (std::size_t k = 0; k < R; ++k) {
        names.emplace("k" + std::to_string(k + 1), im.kappa_slot + k);
    }
    names.emplace("N0", im.kappa_slot + R);
    auto resolver_upto = [&](std::size_t n_lets) {
        return [&, n_lets](const std::string& s) -> std::optional<std::size_t> {
            for (std::size_t j = n_lets; j-- > 0;) {
                if (model_.lets[j].first == s) {
                    return im.let_slot + j;
                }
            }
            if (auto it = names.find(s); it != names.end()) {
                return it->second;
            }
            return std::nullopt;
        };
    };
    for (std::size_t j = 0; j < model_.lets.size(); ++j) {
        Expr e = Expr::parse(model_.lets[j].second);
        e.bind(resolver_upto(j));
        im.lets.push_back(std::move(e));
    }
    for (const auto& ch : model_.channels) {
        if (ch.source == Channel::RateSource::Expression) {
            Expr e = Expr::parse(ch.rate);
            e.bind(resolver_upto(model_.lets.size()));
            im.rates.emplace_back(std::move(e));
        } else {
            if (!ch.reaction) {
                throw ExprError("channel " + ch.name + " has no reaction and no rate expression");
            }
            im.has_generic = im.has_generic || ch.source == Channel::RateSource::Generic;
            im.rates.emplace_back(std::nullopt);
        }
    }
}

LimitEvaluator::~LimitEvaluator() = default;

std::vector<double> LimitEvaluator::species_values(const std::vector<double>& v) const {
    std::vector<double> z = model_.initial_z;
    for (std::size_t j = 0; j < model_.variables.size(); ++j) {
        if (model_.variables[j].species) {
            z[*model_.variables[j].species] = v[j];
        }
    }
    return z;
}

void LimitEvaluator::rates(const std::vector<double>& v, std::vector<double>& out) const {
    const auto& im = *impl_;
    std::vector<double> slots(im.n_slots);
    std::copy(v.begin(), v.end(), slots.begin());
    const std::size_t R = model_.network.num_reactions();
    for (std::size_t k = 0; k < R; ++k) {
        slots[im.kappa_slot + k] = model_.spec.kappa[k];
    }
    slots[im.kappa_slot + R] = model_.spec.N0;
    for (std::size_t j = 0; j < im.lets.size(); ++j) {
        slots[im.let_slot + j] = im.lets[j].eval(slots.data());
    }
    std::vector<double> z;
    const Equilibrium* eq = nullptr;
    Equilibrium local;
    out.assign(model_.channels.size(), 0.0);
    for (std::size_t c = 0; c < model_.channels.size(); ++c) {
        const auto& ch = model_.channels[c];
        switch (ch.source) {
            case Channel::RateSource::Expression:
                out[c] = im.rates[c]->eval(slots.data());
                break;
            case Channel::RateSource::MassAction:
                if (z.empty()) {
                    z = species_values(v);
                }
                out[c] = limit_intensity(model_.network, model_.spec, *ch.reaction, z);
                break;
            case Channel::RateSource::Generic:
                if (z.empty()) {
                    z = species_values(v);
                }
                if (!eq) {
                    std::lock_guard<std::mutex> lock(im.mu);
                    auto it = im.cache.find(z);
                    if (it != im.cache.end()) {
                        local = it->second;
                    } else {
                        local = fast_equilibrium(model_.network, model_.spec, model_.fast_block, z);
                        if (im.cache.size() > 100000) {
                            im.cache.clear();
                        }
                        im.cache.emplace(z, local);
                    }
                    eq = &local;
                }
                out[c] = averaged_intensity(model_.network, model_.spec, *ch.reaction, *eq, z);
                break;
        }
    }
}

void LimitEvaluator::drift(const std::vector<double>& v, std::vector<double>& out) const {
    std::vector<double> r;
    rates(v, r);
    out.assign(model_.variables.size(), 0.0);
    for (std::size_t c = 0; c < model_.channels.size(); ++c) {
        for (const auto& [var, coef] : model_.channels[c].drifts) {
            out[var] += coef * r[c];
        }
    }
}

}  // namespace crn::reduce
