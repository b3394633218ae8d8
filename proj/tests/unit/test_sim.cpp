#include "crn/errors.hpp"
#include "crn/gallery.hpp"
#include "crn/ode.hpp"
#include "crn/reduce.hpp"
#include "crn/rng.hpp"
#include "crn/sim.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace crn;
using namespace crn::sim;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> g;
    for (int i = 0; i <= n; ++i) {
        g.push_back(a + (b - a) * i / n);
    }
    return g;
}

struct MeanSe {
    double mean = 0, se = 0;
};

MeanSe mean_se(const std::vector<double>& xs) {
    double m = 0, m2 = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double d = xs[i] - m;
        m += d / static_cast<double>(i + 1);
        m2 += d * (xs[i] - m);
    }
    return {m, std::sqrt(m2 / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()))};
}

// Kolmogorov-Smirnov statistic of samples against Exp(rate).
double ks_exponential(std::vector<double> xs, double rate) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double f = 1 - std::exp(-rate * xs[i]);
        d = std::max({d, std::fabs(f - i / n), std::fabs((i + 1) / n - f)});
    }
    return d;
}

double ks_crit_1pct(std::size_t n) { return 1.63 / std::sqrt(static_cast<double>(n)); }

RationalVector rv(std::initializer_list<int> xs) {
    RationalVector v;
    for (int x : xs) {
        v.emplace_back(x);
    }
    return v;
}

std::vector<double> initial_values(const reduce::LimitModel& m) {
    std::vector<double> v;
    for (const auto& var : m.variables) {
        v.push_back(var.initial);
    }
    return v;
}

}  // namespace

TEST_CASE("Philox streams match the reference generator") {
    auto check = [](std::uint64_t seed, std::uint64_t stream, std::array<std::uint64_t, 6> want) {
        RngStream r(seed, stream);
        for (auto w : want) {
            CHECK(r() == w);
        }
    };
    check(42, 0, {0xd1f8817d4d62880eULL, 0x307266b65cc8797eULL, 0xde1f04e7f084ed03ULL, 0x65034a8e78cd1e59ULL,
                  0x5e3daa8961c3e3d3ULL, 0x6f37dea4a04bd05cULL});
    check(42, 3, {0xb653ad1533f8b23bULL, 0x120cb8c2946e4fa5ULL, 0x64dbb9cb4a5b8b60ULL, 0x205a85f8a18c19ddULL,
                  0x3651dec234cb81e5ULL, 0x410bc7900ff12236ULL});
    check(0, 0, {0x02f4ba6408e4d89bULL, 0x3dd62b0b9ca8c5b2ULL, 0x1c8667a55d902e79ULL, 0x907d7a052fd5b4dcULL,
                 0x809bf322883987c3ULL, 0x471128b9e807f7ddULL});

    RngStream u(1, 1);
    for (int i = 0; i < 1000; ++i) {
        double x = u.uniform();
        CHECK((x >= 0.0 && x < 1.0));
    }
}

TEST_CASE("ODE integration") {
    OdeControls c;
    c.rtol = 1e-10;
    c.atol = 1e-12;
    auto sol = integrate_ode([](const std::vector<double>& y, std::vector<double>& dy, double) { dy = {-y[0]}; },
                             {1.0}, 0.0, {0.5, 1.0}, c);
    CHECK(std::fabs(sol.states[1][0] - std::exp(-1.0)) < 1e-8);

    auto flat = integrate_ode([](const std::vector<double>&, std::vector<double>& dy, double) { dy = {0.0}; },
                              {2.5}, 0.0, linspace(0, 3, 6));
    for (const auto& s : flat.states) {
        CHECK(s[0] == 2.5);
    }

    c.method = OdeMethod::Rk4;
    c.fixed_step = 1e-3;
    auto rk = integrate_ode([](const std::vector<double>& y, std::vector<double>& dy, double) { dy = {-y[0]}; },
                            {1.0}, 0.0, {1.0}, c);
    CHECK(rk.states[0][0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
}

TEST_CASE("Michaelis-Menten trajectory decreases and stays nonnegative") {
    const std::array<double, 3> k = {1, 1, 1};
    auto sol = integrate_ode(
        [&](const std::vector<double>& y, std::vector<double>& dy, double) {
            dy = {reduce::michaelis_menten_rhs(y[0], 2.0, k)};
        },
        {5.0}, 0.0, linspace(0, 20, 100));
    for (std::size_t i = 1; i < sol.states.size(); ++i) {
        CHECK(sol.states[i][0] < sol.states[i - 1][0]);
        CHECK(sol.states[i][0] >= 0.0);
    }
}

TEST_CASE("stiff problem underflows the step size") {
    OdeControls c;
    c.min_step = 1e-3;
    c.initial_step = 1e-2;
    CHECK_THROWS_AS(integrate_ode([](const std::vector<double>& y, std::vector<double>& dy,
                                     double) { dy = {-1e6 * y[0]}; },
                                  {1.0}, 0.0, {1.0}, c),
                    StepSizeUnderflow);
}

TEST_CASE("SSA Poisson birth") {
    const double kappa = 2.0, t = 1.5;
    Network n({"S1"}, {Reaction({0}, {1}, kappa)});
    std::vector<double> xs;
    for (std::size_t r = 0; r < 10000; ++r) {
        RngStream rng(11, r);
        xs.push_back(simulate_ssa(n, {0}, t, {t}, rng).values[0][0]);
    }
    auto [m, se] = mean_se(xs);
    CHECK(std::fabs(m - kappa * t) < 3 * se);
}

TEST_CASE("SSA pure death") {
    const double kappa = 0.7, t = 1.0;
    Network n({"S1"}, {Reaction({1}, {0}, kappa)});
    std::vector<double> xs;
    for (std::size_t r = 0; r < 10000; ++r) {
        RngStream rng(12, r);
        xs.push_back(simulate_ssa(n, {20}, t, {t}, rng).values[0][0]);
    }
    auto [m, se] = mean_se(xs);
    CHECK(std::fabs(m - 20 * std::exp(-kappa * t)) < 3 * se);
}

TEST_CASE("SSA inter-event times are exponential") {
    const double kappa = 3.0;
    Network n({"S1"}, {Reaction({0}, {1}, kappa)});
    SimControls c;
    c.record_events = true;
    RngStream rng(13, 0);
    auto tr = simulate_ssa(n, {0}, 2000.0, {}, rng, c);
    std::vector<double> gaps;
    double last = 0;
    for (const auto& [t, k] : tr.events) {
        gaps.push_back(t - last);
        last = t;
    }
    REQUIRE(gaps.size() > 1000);
    CHECK(ks_exponential(gaps, kappa) < ks_crit_1pct(gaps.size()));
}

TEST_CASE("SSA keeps the gene count") {
    Network net = gallery::network("goutsias.crn");
    State x0 = gallery::initial_state("goutsias.init", net);
    SimControls c;
    bool ok = true;
    c.on_event = [&](double, std::size_t, const std::vector<double>&, const std::vector<double>& v) {
        ok = ok && v[3] + v[4] + v[5] == 2.0;
    };
    for (std::size_t r = 0; r < 10; ++r) {
        RngStream rng(14, r);
        auto tr = simulate_ssa(net, x0, 100.0, linspace(0, 100, 10), rng, c);
        for (const auto& v : tr.values) {
            CHECK(v[3] + v[4] + v[5] == 2.0);
        }
    }
    CHECK(ok);
}

TEST_CASE("event cap") {
    Network n({"S1"}, {Reaction({0}, {1}, 1.0)});
    SimControls c;
    c.event_cap = 10;
    RngStream rng(15, 0);
    CHECK_THROWS_AS(simulate_ssa(n, {0}, 1e6, {}, rng, c), Exploded);
    c.throw_on_cap = false;
    RngStream rng2(15, 0);
    auto tr = simulate_ssa(n, {0}, 1e6, {}, rng2, c);
    CHECK(tr.terminated_by == Termination::EventCap);
    CHECK(tr.n_events == 10);
}

TEST_CASE("scaled process at N0 reproduces the SSA path") {
    Network n({"A", "B"}, {Reaction({1, 0}, {0, 1}, 1.0), Reaction({0, 1}, {1, 0}, 0.5)});
    auto spec = make_scaling_spec(n, 50, rv({1, 1}), rv({0, 0}));
    ScaledProcess p(n, spec, 0, 50);
    State x0 = {40, 10};
    CHECK(p.initial_counts(x0) == x0);
    auto grid = linspace(0, 5, 10);
    RngStream r1(16, 0), r2(16, 0);
    auto a = p.simulate(x0, 5.0, grid, r1);
    auto b = simulate_ssa(n, x0, 5.0, grid, r2, {}, {}, p.output_scale());
    CHECK(a.values == b.values);
    CHECK(a.n_events == b.n_events);
    CHECK(a.values[0][0] == doctest::Approx(0.8));
}

TEST_CASE("gamma = 1 stretches time by N0") {
    Network net = gallery::network("goutsias.crn");
    ScalingSpec spec = gallery::scaling("goutsias_dimer.scale", net);
    State x0 = gallery::initial_state("goutsias.init", net);
    SimControls c;
    c.record_events = true;
    ScaledProcess slow(net, spec, 0, spec.N0), fast(net, spec, 1, spec.N0);
    RngStream r1(17, 0), r2(17, 0);
    auto a = slow.simulate(x0, 50.0, {}, r1, c);
    auto b = fast.simulate(x0, 0.5, {}, r2, c);
    REQUIRE(a.events.size() > 20);
    for (std::size_t i = 0; i < 20; ++i) {
        CHECK(a.events[i].second == b.events[i].second);
        CHECK(b.events[i].first * spec.N0 == doctest::Approx(a.events[i].first).epsilon(1e-9));
    }
}

TEST_CASE("hitting times") {
    Network n({"S1"}, {Reaction({1}, {0}, 2.0)});
    std::vector<Predicate> none = {{"empty", "S1 == 0", {"S1"}}};
    RngStream rng0(18, 0);
    CHECK(simulate_ssa(n, {0}, 1.0, {}, rng0, {}, none).hits[0] == 0.0);

    std::vector<double> ts;
    SimControls c;
    c.stop_when_all_hit = true;
    for (std::size_t r = 0; r < 10000; ++r) {
        RngStream rng(19, r);
        auto tr = simulate_ssa(n, {1}, 100.0, {}, rng, c, none);
        REQUIRE(tr.hits[0].has_value());
        CHECK(tr.terminated_by == Termination::Hitting);
        ts.push_back(*tr.hits[0]);
    }
    auto [m, se] = mean_se(ts);
    CHECK(std::fabs(m - 0.5) < 3 * se);
}

TEST_CASE("hitting time from a recorded path") {
    Network n({"S1"}, {Reaction({1}, {0}, 1.0)});
    SimControls c;
    c.record_events = true;
    RngStream rng(20, 0);
    auto tr = simulate_ssa(n, {3}, 100.0, {}, rng, c);
    REQUIRE(tr.events.size() == 3);
    Predicate two("two", "S1 <= 1", {"S1"});
    CHECK(hitting_time(n, {3}, tr, two) == tr.events[1].first);
    Predicate never("never", "S1 > 5", {"S1"});
    CHECK_FALSE(hitting_time(n, {3}, tr, never).has_value());
}

TEST_CASE("predicate parsing") {
    Predicate p("p", "A + 2*B >= 3", {"A", "B"});
    CHECK(p({1, 1}));
    CHECK_FALSE(p({0, 1}));
    CHECK_THROWS_AS(Predicate("q", "A +", {"A"}), ExprError);
    CHECK_THROWS_AS(Predicate("q", "C == 1", {"A"}), ExprError);
}

TEST_CASE("hybrid without jumps follows the ODE") {
    Network net({"A", "B"}, {Reaction({1, 0}, {0, 1}, 2.0), Reaction({0, 1}, {1, 0}, 1.0)});
    auto spec = make_scaling_spec(net, 100, rv({1, 1}), rv({0, 0}));
    reduce::BuildOptions bo;
    bo.initial_z = std::vector<double>{3.0, 0.0};
    auto model = reduce::build_limit_model(net, spec, 0, {}, bo);
    reduce::LimitEvaluator ev(model);
    auto grid = linspace(0, 2, 20);
    RngStream rng(21, 0);
    auto tr = simulate_hybrid(ev, {3.0, 0.0}, 2.0, grid, rng);
    CHECK(tr.n_events == 0);
    auto ode = integrate_ode(
        [&](const std::vector<double>& y, std::vector<double>& dy, double) { ev.drift(y, dy); }, {3.0, 0.0}, 0.0,
        grid);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        CHECK(tr.values[g][0] == doctest::Approx(ode.states[g][0]).epsilon(1e-7));
        CHECK(tr.values[g][1] == doctest::Approx(ode.states[g][1]).epsilon(1e-7));
    }
}

TEST_CASE("hybrid jump times for a constant intensity") {
    Network net({"A"}, {Reaction({0}, {1}, 1.5)});
    auto spec = make_scaling_spec(net, 10, rv({0}), rv({0}));
    auto model = reduce::build_limit_model(net, spec, 0, {});
    REQUIRE(model.closed);
    reduce::LimitEvaluator ev(model);
    HybridControls c;
    c.record_events = true;
    RngStream rng(22, 0);
    auto tr = simulate_hybrid(ev, {0.0}, 1000.0, {}, rng, c);
    std::vector<double> gaps;
    double last = 0;
    for (const auto& [t, k] : tr.events) {
        gaps.push_back(t - last);
        last = t;
    }
    REQUIRE(gaps.size() > 1000);
    CHECK(ks_exponential(gaps, 1.5) < ks_crit_1pct(gaps.size()));
}

TEST_CASE("hybrid selects channels from the pre-jump state") {
    // A pure death channel must never take A below zero.
    Network net({"A"}, {Reaction({1}, {0}, 1.0)});
    auto spec = make_scaling_spec(net, 10, rv({0}), rv({0}));
    reduce::BuildOptions bo;
    bo.initial_z = std::vector<double>{4.0};
    auto model = reduce::build_limit_model(net, spec, 0, {}, bo);
    reduce::LimitEvaluator ev(model);
    for (std::size_t r = 0; r < 200; ++r) {
        RngStream rng(23, r);
        auto tr = simulate_hybrid(ev, {4.0}, 50.0, {50.0}, rng);
        CHECK(tr.n_events <= 4);
        CHECK(tr.final_values[0] >= 0.0);
    }
}

TEST_CASE("RNA birth-death limit has the linear mean") {
    auto model = gallery::limit_model("goutsias_g1.limit");
    REQUIRE(model.closed);
    reduce::LimitEvaluator ev(model);
    auto v0 = initial_values(model);
    const std::size_t rna = model.variable_index("RNA").value();
    const std::size_t z45 = model.variable_index("Z45").value();
    const double k3 = model.spec.kappa[2], k4 = model.spec.kappa[3], k5 = model.spec.kappa[4],
                 k6 = model.spec.kappa[5];
    const double phi2 = reduce::phi_pair(0.14, model.spec.kappa[8], model.spec.kappa[9])[1];
    const double b = k3 * k5 * phi2 * v0[z45] / (k6 + k5 * phi2);

    std::vector<double> rates;
    ev.rates(v0, rates);
    double birth = 0;
    for (std::size_t c = 0; c < model.channels.size(); ++c) {
        if (model.channels[c].reaction == std::size_t{2}) {
            birth = rates[c];
        }
    }
    CHECK(birth == doctest::Approx(b).epsilon(1e-9));

    const double t = 2.0;
    std::vector<double> xs;
    for (std::size_t r = 0; r < 4000; ++r) {
        RngStream rng(24, r);
        xs.push_back(simulate_hybrid(ev, v0, t, {t}, rng).values[0][rna]);
    }
    auto [m, se] = mean_se(xs);
    const double exact = b / k4 + (v0[rna] - b / k4) * std::exp(-k4 * t);
    CHECK(std::fabs(m - exact) < 3 * se);
}

TEST_CASE("ensembles") {
    Network n({"S1"}, {Reaction({0}, {1}, 1.0), Reaction({1}, {0}, 0.1)});
    EnsembleSpec es;
    es.grid = linspace(0, 10, 10);
    es.observables = {{"S1", {1.0}}};
    es.run = [&](std::size_t, RngStream& rng) { return simulate_ssa(n, {0}, 10.0, es.grid, rng); };

    auto one = run_ensemble(es, 1, 5);
    RngStream rng(5, 0);
    auto single = simulate_ssa(n, {0}, 10.0, es.grid, rng);
    for (std::size_t g = 0; g < es.grid.size(); ++g) {
        CHECK(one.mean[0][g] == single.values[g][0]);
        CHECK(one.std[0][g] == 0.0);
    }

    auto a = run_ensemble(es, 64, 9, 1);
    auto b = run_ensemble(es, 64, 9, 1);
    auto c = run_ensemble(es, 64, 9, 4);
    CHECK(a.mean == b.mean);
    CHECK(a.std == b.std);
    CHECK(a.mean == c.mean);
    CHECK(a.std == c.std);
    CHECK_THROWS(run_ensemble(es, 0, 9));
}

TEST_CASE("model comparison") {
    Network n({"S1"}, {Reaction({0}, {1}, 1.0)});
    std::vector<Predicate> hit = {{"five", "S1 >= 5", {"S1"}}};
    EnsembleSpec es;
    es.grid = linspace(0, 10, 5);
    es.observables = {{"S1", {1.0}}};
    es.hit_names = {"five"};
    es.run = [&](std::size_t, RngStream& rng) { return simulate_ssa(n, {0}, 10.0, es.grid, rng, {}, hit); };
    auto st = run_ensemble(es, 50, 3);
    auto spec = make_scaling_spec(n, 10, rv({0}), rv({0}));
    auto cmp = compare_models(st, st, spec, 0);
    REQUIRE(cmp.observables.size() == 1);
    for (std::size_t g = 0; g < cmp.grid.size(); ++g) {
        CHECK(cmp.observables[0].mean_difference[g] == 0.0);
        CHECK(cmp.observables[0].bands_overlap[g]);
    }
    REQUIRE(cmp.hits.size() == 1);
    CHECK(cmp.hits[0].ratio == 1.0);

    auto other = st;
    other.grid = linspace(0, 10, 4);
    CHECK_THROWS_AS(compare_models(st, other, spec, 0), GridMismatch);
    // Reduced clock at gamma = 1 runs N0 times slower.
    CHECK_THROWS_AS(compare_models(st, st, spec, 1), GridMismatch);
}
