// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails. Tolerances and seeds are fixed below.

#include "crn/errors.hpp"
#include "crn/gallery.hpp"
#include "crn/ode.hpp"
#include "crn/reduce.hpp"
#include "crn/scaling.hpp"
#include "crn/sim.hpp"

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/poisson.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>

using namespace crn;
using reduce::VarKind;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

Outcome fail(std::string why) { return {false, std::move(why)}; }

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

std::size_t idx(const Network& n, const std::string& s) { return n.species_index(s).value(); }

// ---------------------------------------------------------------------------
// 1. Conservation along every event of every replicate.
Outcome conservation() {
    Network net = gallery::network("goutsias.crn");
    State x0 = gallery::initial_state("goutsias.init", net);
    if (x0 != State{2, 6, 0, 0, 2, 0}) {
        return fail("gallery initial state is not (2,6,0,0,2,0)");
    }
    const std::size_t D = idx(net, "D"), DNA = idx(net, "DNA"), DNA_D = idx(net, "DNA_D"),
                      DNA_2D = idx(net, "DNA_2D");
    const std::size_t R9 = net.reaction_index("R9").value(), R10 = net.reaction_index("R10").value();
    std::uint64_t events = 0, violations = 0;
    sim::SimControls c;
    c.on_event = [&](double, std::size_t k, const std::vector<double>& before, const std::vector<double>& after) {
        ++events;
        if (after[DNA] + after[DNA_D] + after[DNA_2D] != 2.0) {
            ++violations;
        }
        auto w = [&](const std::vector<double>& v) { return v[D] + v[DNA_D] + 2.0 * v[DNA_2D]; };
        double change = w(after) - w(before);
        double expected = k == R9 ? 1.0 : k == R10 ? -1.0 : 0.0;
        if (change != expected) {
            ++violations;
        }
    };
    auto grid = std::vector<double>{0.0, 100.0};
    for (std::size_t r = 0; r < 100; ++r) {
        RngStream rng(2024, r);
        sim::simulate_ssa(net, x0, 100.0, grid, rng, c);
    }
    Outcome o;
    o.pass = violations == 0 && events > 0;
    o.detail = std::to_string(events) + " events, " + std::to_string(violations) + " violations";
    return o;
}

// ---------------------------------------------------------------------------
// 2. Hitting times of the full model and of the gamma = 2 hybrid model.
reduce::LimitModel goutsias_g2() {
    Network net = gallery::network("goutsias.crn");
    ScalingSpec spec = gallery::scaling("goutsias_binding.scale", net);
    State x0 = gallery::initial_state("goutsias.init", net);
    reduce::BuildOptions bo;
    bo.lets = {{"phi1", "2*Z12*k10/(k10+sqrt(k10^2+8*k9*k10*Z12))"},
               {"phi2", "(Z12-phi1)/2"},
               {"z5bar", "k5*phi2/(k6+k5*phi2)*Z45"}};
    bo.averaged = {{0, "k1*k3/k4*z5bar"}, {1, "k2*phi1"}, {6, "k7*phi2*z5bar"}};
    std::vector<double> z0(6);
    for (std::size_t i = 0; i < 6; ++i) {
        z0[i] = static_cast<double>(x0[i]) / rational_power(spec.N0, spec.alpha[i]);
    }
    bo.initial_z = z0;
    std::vector<reduce::AuxVariable> aux = {{"Z12", {1, 2, 0, 0, 2, 4}}, {"Z45", {0, 0, 0, 1, 1, 0}}};
    return reduce::build_limit_model(net, spec, Rational(2), aux, bo);
}

Outcome hitting_times() {
    Network net = gallery::network("goutsias.crn");
    State x0 = gallery::initial_state("goutsias.init", net);
    auto names = std::vector<std::string>{"M", "D", "RNA", "DNA", "DNA_D", "DNA_2D"};
    std::vector<sim::Predicate> fp = {{"tau1", "DNA + DNA_D == 1", names}, {"tau0", "DNA + DNA_D == 0", names}};
    sim::EnsembleSpec full;
    full.grid = {0.0};
    full.hit_names = {"tau1", "tau0"};
    sim::SimControls sc;
    sc.stop_when_all_hit = true;
    full.run = [&](std::size_t, RngStream& rng) { return sim::simulate_ssa(net, x0, 1e4, {0.0}, rng, sc, fp); };
    auto fs = sim::run_ensemble(full, 100, 305, 1);

    reduce::LimitModel model = goutsias_g2();
    if (!model.closed) {
        return fail("gamma = 2 model is not closed");
    }
    reduce::LimitEvaluator ev(model);
    std::vector<std::string> vn;
    std::vector<double> v0;
    for (const auto& v : model.variables) {
        vn.push_back(v.name);
        v0.push_back(v.initial);
    }
    std::vector<sim::Predicate> rp = {{"tau1", "Z45 == 1", vn}, {"tau0", "Z45 == 0", vn}};
    sim::EnsembleSpec red;
    red.grid = {0.0};
    red.hit_names = {"tau1", "tau0"};
    sim::HybridControls hc;
    hc.stop_when_all_hit = true;
    red.run = [&](std::size_t, RngStream& rng) { return sim::simulate_hybrid(ev, v0, 1.0, {0.0}, rng, hc, rp); };
    auto rs = sim::run_ensemble(red, 1000, 156, 1);
    auto cmp = sim::compare_models(fs, rs, model.spec, model.gamma);

    const double reference_full[2] = {305.44, 512.45};
    const double reference_red[2] = {155.95, 261.01};
    Outcome o;
    std::ostringstream os;
    for (std::size_t p = 0; p < 2; ++p) {
        const auto& h = cmp.hits[p];
        bool ok = h.full.hits == 100 && h.reduced.hits == 1000 &&
                  std::fabs(h.full.mean / reference_full[p] - 1.0) <= 0.2 &&
                  std::fabs(h.reduced.mean / reference_red[p] - 1.0) <= 0.2 && h.ratio < 0.75;
        o.pass = o.pass && ok;
        os << h.name << " full " << fmt("%.2f", h.full.mean) << " reduced " << fmt("%.2f", h.reduced.mean)
           << " ratio " << fmt("%.3f", h.ratio) << (p == 0 ? "; " : "");
    }
    o.detail = os.str();
    return o;
}

// ---------------------------------------------------------------------------
// 3. alpha(m) against direct enumeration of the fast dimer chain.
Outcome alpha_oracle() {
    double worst_alpha = 0.0, worst_identity = 0.0;
    for (auto [k9, k10] : {std::pair{0.083, 0.5}, std::pair{8.30, 0.5}}) {
        for (long m = 0; m <= 100; ++m) {
            // Weights r^(z1+z2) / (z1! z2!) on z1 + 2 z2 = m, r = k10 / k9.
            const long double lr = std::log(static_cast<long double>(k10) / k9);
            std::vector<long double> lw;
            for (long z2 = 0; 2 * z2 <= m; ++z2) {
                long z1 = m - 2 * z2;
                lw.push_back((z1 + z2) * lr - std::lgamma(static_cast<long double>(z1 + 1)) -
                             std::lgamma(static_cast<long double>(z2 + 1)));
            }
            long double top = *std::max_element(lw.begin(), lw.end());
            long double total = 0, e2 = 0, ef = 0;
            for (long z2 = 0; 2 * z2 <= m; ++z2) {
                long double w = std::exp(lw[static_cast<std::size_t>(z2)] - top);
                long z1 = m - 2 * z2;
                total += w;
                e2 += w * z2;
                ef += w * z1 * (z1 - 1);
            }
            const double brute = static_cast<double>(e2 / total);
            const double a = reduce::goutsias_alpha(m, k9, k10);
            worst_alpha = std::max(worst_alpha, std::fabs(a - brute));
            worst_identity = std::max(worst_identity, std::fabs(k10 * a - k9 * static_cast<double>(ef / total)));
        }
    }
    Outcome o;
    o.pass = worst_alpha <= 1e-12 && worst_identity <= 1e-10;
    o.detail = fmt("max |alpha - brute| %.3g, max identity residual %.3g", worst_alpha, worst_identity);
    return o;
}

// ---------------------------------------------------------------------------
// 4. Monomer/dimer equilibrium identities with the binding-scaling constants.
Outcome phi_identities() {
    Network net = gallery::network("goutsias.crn");
    ScalingSpec spec = gallery::scaling("goutsias_binding.scale", net);
    const double k9 = spec.kappa[8], k10 = spec.kappa[9];
    if (std::fabs(k9 - 8.30) > 1e-12 || std::fabs(k10 - 0.5) > 1e-12) {
        return fail("binding-scaling constants k9, k10 differ from 8.30, 0.500");
    }
    double worst_sum = 0.0, worst_eq = 0.0;
    for (int i = 0; i < 1000; ++i) {
        double y = 100.0 * i / 999.0;
        auto [p1, p2] = reduce::phi_pair(y, k9, k10);
        worst_sum = std::max(worst_sum, std::fabs(p1 + 2 * p2 - y));
        worst_eq = std::max(worst_eq, std::fabs(k9 * p1 * p1 - k10 * p2));
    }
    Outcome o;
    o.pass = worst_sum <= 1e-10 && worst_eq <= 1e-10;
    o.detail = fmt("max |phi1 + 2 phi2 - y| %.3g, max |k9 phi1^2 - k10 phi2| %.3g", worst_sum, worst_eq);
    return o;
}

// ---------------------------------------------------------------------------
// 5. Generic averaging against the Michaelis-Menten closed form, and
// convergence of the scaled process to the limiting ODE.
Outcome michaelis_menten() {
    Network net = gallery::network("mm.crn");
    ScalingSpec spec = gallery::scaling("mm.scale", net);
    const std::array<double, 3> kappa = {spec.kappa[0], spec.kappa[1], spec.kappa[2]};
    auto block = reduce::find_fast_block(net, spec, Rational(0));
    double worst = 0.0;
    for (double M : {1.0, 5.0, 20.0}) {
        for (int i = 0; i < 10; ++i) {
            double x1 = 0.1 * std::pow(100.0, i / 9.0);
            std::vector<double> z = {x1, M, 0.0, 0.0};
            auto eq = reduce::fast_equilibrium(net, spec, block, z);
            double drift = -reduce::averaged_intensity(net, spec, 0, eq, z) +
                           reduce::averaged_intensity(net, spec, 1, eq, z);
            double exact = reduce::michaelis_menten_rhs(x1, M, kappa);
            worst = std::max(worst, std::fabs(drift / exact - 1.0));
        }
    }
    if (worst > 1e-6) {
        return fail(fmt("averaged drift relative error %.3g", worst));
    }

    // Scaled process against x1' = michaelis_menten_rhs, x1(0) = 1, M = 5.
    const double M = 5.0;
    auto grid = std::vector<double>();
    for (int i = 0; i <= 300; ++i) {
        grid.push_back(3.0 * i / 300.0);
    }
    auto ode = integrate_ode(
        [&](const std::vector<double>& y, std::vector<double>& dy, double) {
            dy = {reduce::michaelis_menten_rhs(y[0], M, kappa)};
        },
        {1.0}, 0.0, grid);
    State x0 = {static_cast<Count>(spec.N0), static_cast<Count>(M), 0, 0};
    auto sup_error = [&](double N) {
        sim::ScaledProcess proc(net, spec, Rational(0), N);
        RngStream rng(55, 0);
        auto tr = proc.simulate(proc.initial_counts(x0), 3.0, grid, rng);
        double e = 0.0;
        for (std::size_t g = 0; g < grid.size(); ++g) {
            e = std::max(e, std::fabs(tr.values[g][0] - ode.states[g][0]));
        }
        return e;
    };
    double e1000 = sup_error(1000.0), e10 = sup_error(10.0);
    Outcome o;
    o.pass = e1000 < 0.1 && e1000 < e10;
    o.detail = fmt("averaging rel err %.2g; sup error N=1000 %.4f, N=10 %.4f", worst, e1000, e10);
    return o;
}

// ---------------------------------------------------------------------------
// 6. Mastny: full scaled process and reduced jump model against the
// analytic mean exp(-k1 k3 t / (k2 + k3)).
Outcome mastny() {
    Network net = gallery::network("mastny.crn");
    ScalingSpec spec = gallery::scaling("mastny.scale", net);
    State x0 = gallery::initial_state("mastny.init", net);
    const double k1 = spec.kappa[0], k2 = spec.kappa[1], k3 = spec.kappa[2];
    const std::vector<double> times = {0.5, 1.0, 2.0};
    auto analytic = [&](double t) { return std::exp(-k1 * k3 * t / (k2 + k3)); };

    sim::ScaledProcess proc(net, spec, Rational(0), 1000.0);
    sim::EnsembleSpec full;
    full.grid = times;
    // Both models work in counts (alpha = 0); report S1 / S1(0).
    const double z1 = static_cast<double>(x0[0]);
    full.observables = {{"S1", {1.0 / z1, 0.0, 0.0}}};
    full.run = [&](std::size_t, RngStream& rng) {
        return proc.simulate(proc.initial_counts(x0), 2.0, times, rng);
    };
    auto fs = sim::run_ensemble(full, 1000, 6, 1);

    reduce::LimitModel red = reduce::mastny_reduced_model(k1, k2, k3, z1, 0.0);
    reduce::LimitEvaluator ev(red);
    sim::EnsembleSpec rs;
    rs.grid = times;
    rs.observables = {{"S1", {1.0 / z1, 0.0}}};
    rs.run = [&](std::size_t, RngStream& rng) {
        return sim::simulate_hybrid(ev, {z1, 0.0}, 2.0, times, rng);
    };
    auto rst = sim::run_ensemble(rs, 1000, 7, 1);

    Outcome o;
    std::ostringstream os;
    for (std::size_t g = 0; g < times.size(); ++g) {
        double a = analytic(times[g]);
        double zf = (fs.mean[0][g] - a) / (fs.std[0][g] / std::sqrt(1000.0));
        double zr = (rst.mean[0][g] - a) / (rst.std[0][g] / std::sqrt(1000.0));
        o.pass = o.pass && std::fabs(zf) <= 3.0 && std::fabs(zr) <= 3.0;
        os << fmt("t=%.1f full %+.2f SE reduced %+.2f SE", times[g], zf, zr) << (g + 1 < times.size() ? "; " : "");
    }
    o.detail = os.str();
    return o;
}

// ---------------------------------------------------------------------------
// 7. Balance analyzer regressions.
Outcome balance() {
    std::ostringstream os;
    {
        Network net = gallery::network("inflow_exchange.crn");
        ScalingSpec spec = gallery::scaling("inflow_exchange.scale", net);
        if (spec.beta != RationalVector{2, 3, 3, 1} || spec.alpha != RationalVector{0, 0}) {
            return fail("inflow-exchange scaling file has unexpected exponents");
        }
        auto rep = scaling::verify_all_balance(net, spec, Rational(-2));
        for (const auto& v : rep.species_verdicts) {
            if (v.isolated || v.check.verdict != scaling::Verdict::Balanced) {
                return fail("inflow-exchange: a species is not balanced");
            }
        }
        auto theta = scaling::check_collective_balance(net, spec, {1, 1}, Rational(-2));
        if (theta.verdict == scaling::Verdict::Balanced) {
            return fail("inflow-exchange: S1 + S2 reported balanced");
        }
        if (rep.max_admissible_gamma != ExtRational(Rational(-2))) {
            return fail("inflow-exchange: max admissible gamma " + rep.max_admissible_gamma.str());
        }
        os << "inflow-exchange gamma <= " << rep.max_admissible_gamma.str();
    }
    {
        // beta1 = beta2 > beta3 with alpha2 = beta2 - beta3; the bound is -beta3.
        Network net = gallery::network("slow_exchange.crn");
        for (int b3 : {-1, -2, -3}) {
            ScalingSpec spec = make_scaling_spec(net, 10.0, {0, Rational(-b3)}, {0, 0, b3});
            auto rep = scaling::verify_all_balance(net, spec, Rational(0));
            if (rep.max_admissible_gamma != ExtRational(Rational(-b3))) {
                return fail("three-reaction network: bound " + rep.max_admissible_gamma.str() +
                            " for beta3 = " + std::to_string(b3));
            }
        }
        os << "; exchange network gamma <= -beta3";
    }
    {
        Network net = gallery::network("goutsias.crn");
        ScalingSpec spec = gallery::scaling("goutsias_binding.scale", net);
        auto rep = scaling::verify_all_balance(net, spec, Rational(0));
        for (const auto& v : rep.species_verdicts) {
            if (v.check.verdict != scaling::Verdict::Balanced) {
                return fail("binding scaling: a species equation is not satisfied");
            }
        }
        for (const auto& c : rep.class_verdicts) {
            if (!c.balanced) {
                return fail("binding scaling: a collective equation is not satisfied");
            }
        }
        if (!(rep.k2.r2 > rep.r1) || rep.r1 != ExtRational(Rational(0)) || rep.k2.r2 != ExtRational(Rational(1))) {
            return fail("binding scaling: r1 = " + rep.r1.str() + ", r2 = " + rep.k2.r2.str());
        }
        os << "; binding scaling " << rep.class_verdicts.size() << " classes balanced, r1 = " << rep.r1.str()
           << " < r2 = " << rep.k2.r2.str();
    }
    return {true, os.str()};
}

// ---------------------------------------------------------------------------
// 8. Structure of the gamma = 0 limits under both scalings.
struct Shape {
    std::map<std::string, VarKind> kinds;
    // channel reaction -> (jump variables, drift variables)
    std::map<std::string, std::pair<std::set<std::string>, std::set<std::string>>> channels;
    bool operator==(const Shape&) const = default;
};

Shape shape_of(const reduce::LimitModel& m) {
    Shape s;
    for (const auto& v : m.variables) {
        s.kinds[v.name] = v.kind;
    }
    for (const auto& c : m.channels) {
        auto& e = s.channels[c.name];
        for (const auto& [v, d] : c.jumps) {
            e.first.insert(m.variables[v].name);
        }
        for (const auto& [v, d] : c.drifts) {
            e.second.insert(m.variables[v].name);
        }
    }
    return s;
}

Outcome limit_structure() {
    Network net = gallery::network("goutsias.crn");
    Shape t1, t3;
    t1.kinds = {{"M", VarKind::Discrete},     {"D", VarKind::Discrete},     {"RNA", VarKind::Frozen},
                {"DNA", VarKind::Frozen},     {"DNA_D", VarKind::Frozen},   {"DNA_2D", VarKind::Frozen}};
    t1.channels = {{"R9", {{"M", "D"}, {}}}, {"R10", {{"M", "D"}, {}}}};
    t3.kinds = {{"M", VarKind::Continuous}, {"D", VarKind::Continuous}, {"RNA", VarKind::Frozen},
                {"DNA", VarKind::Discrete},  {"DNA_D", VarKind::Discrete}, {"DNA_2D", VarKind::Frozen}};
    t3.channels = {{"R9", {{}, {"M", "D"}}},
                   {"R10", {{}, {"M", "D"}}},
                   {"R5", {{"DNA", "DNA_D"}, {}}},
                   {"R6", {{"DNA", "DNA_D"}, {}}}};
    auto m1 = reduce::build_limit_model(net, gallery::scaling("goutsias_dimer.scale", net), Rational(0), {});
    auto m3 = reduce::build_limit_model(net, gallery::scaling("goutsias_binding.scale", net), Rational(0), {});
    bool ok1 = shape_of(m1) == t1 && m1.fast_block.species.empty();
    bool ok3 = shape_of(m3) == t3 && m3.fast_block.species.empty();
    Outcome o;
    o.pass = ok1 && ok3;
    o.detail = std::string("dimer scaling ") + (ok1 ? "matches" : "differs") + ", binding scaling " + (ok3 ? "matches" : "differs");
    return o;
}

// ---------------------------------------------------------------------------
// 9. Truncated stationary solves against Poisson and Binomial laws.
Outcome stationary() {
    double worst_tv = 0.0;
    {
        Network net = gallery::network("slow_exchange.crn");
        ScalingSpec spec = gallery::scaling("slow_exchange.scale", net);
        const Rational gamma = -spec.beta[2];
        auto block = reduce::find_fast_block(net, spec, gamma);
        if (block.discrete_species != std::vector<std::size_t>{0}) {
            return fail("exchange network: fast block is not {S1}");
        }
        const double k1 = spec.kappa[0], k2 = spec.kappa[1], k3 = spec.kappa[2];
        for (double z2 : {0.5, 2.0, 7.5}) {
            auto eq = reduce::fast_equilibrium(net, spec, block, {0.0, z2});
            boost::math::poisson_distribution<double> pois((k1 + k3 * z2) / k2);
            double tv = 0.0, covered = 0.0;
            for (std::size_t s = 0; s < eq.support.size(); ++s) {
                double p = boost::math::pdf(pois, static_cast<double>(eq.support[s][0]));
                tv += std::fabs(eq.probs[s] - p);
                covered += p;
            }
            tv = 0.5 * (tv + std::max(0.0, 1.0 - covered));
            worst_tv = std::max(worst_tv, tv);
        }
    }
    double worst_bin = 0.0;
    {
        Network net = gallery::network("goutsias.crn");
        ScalingSpec spec = gallery::scaling("goutsias_binding.scale", net);
        const Rational gamma(2);
        auto block = reduce::find_fast_block(net, spec, gamma);
        const double k5 = spec.kappa[4], k6 = spec.kappa[5];
        for (double y : {0.14, 1.0, 10.0}) {
            auto [p1, p2] = reduce::phi_pair(y, spec.kappa[8], spec.kappa[9]);
            for (long n : {1L, 2L, 5L}) {
                std::vector<double> z = {p1, p2, 0.0, static_cast<double>(n), 0.0, 0.0};
                auto gen = reduce::fast_generator(net, spec, gamma, z);
                auto eq = reduce::stationary_distribution(gen);
                boost::math::binomial_distribution<double> bin(static_cast<double>(n), k6 / (k6 + k5 * p2));
                const std::size_t dna = idx(net, "DNA");
                auto pos = std::find(eq.species.begin(), eq.species.end(), dna) - eq.species.begin();
                if (eq.support.size() != static_cast<std::size_t>(n + 1)) {
                    return fail("flip chain support has " + std::to_string(eq.support.size()) + " states");
                }
                for (std::size_t s = 0; s < eq.support.size(); ++s) {
                    double p = boost::math::pdf(bin, static_cast<double>(eq.support[s][pos]));
                    worst_bin = std::max(worst_bin, std::fabs(eq.probs[s] - p));
                }
            }
        }
        (void)block;
    }
    Outcome o;
    o.pass = worst_tv < 1e-8 && worst_bin <= 1e-10;
    o.detail = fmt("Poisson TV %.3g, Binomial max error %.3g", worst_tv, worst_bin);
    return o;
}

struct Criterion {
    int number;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> check;
};

}  // namespace

int main() {
    const Criterion criteria[] = {
        {1, "conservation exactness", 10.0, conservation},
        {2, "hitting times", 120.0, hitting_times},
        {3, "alpha(m) oracle", 1.0, alpha_oracle},
        {4, "phi identities", 1.0, phi_identities},
        {5, "Michaelis-Menten averaging", 60.0, michaelis_menten},
        {6, "Mastny reduction", 60.0, mastny},
        {7, "balance analyzer", 10.0, balance},
        {8, "limit-builder structure", 60.0, limit_structure},
        {9, "stationary-solve oracles", 60.0, stationary},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = fail(std::string("exception: ") + e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > c.budget_seconds) {
            o.pass = false;
            o.detail += fmt(" (over the %.0f s budget)", c.budget_seconds);
        }
        std::printf("criterion %d %s: %s (%.2f s) %s\n", c.number, o.pass ? "PASS" : "FAIL", c.name, secs,
                    o.detail.c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
