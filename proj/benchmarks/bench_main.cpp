#include "crn/gallery.hpp"
#include "crn/reduce.hpp"
#include "crn/scaling.hpp"
#include "crn/sim.hpp"

#include <benchmark/benchmark.h>

using namespace crn;

// Full Goutsias SSA over [0, 100]; reports events per second.
static void BM_GoutsiasSsa(benchmark::State& state) {
    Network net = gallery::network("goutsias.crn");
    State x0 = gallery::initial_state("goutsias.init", net);
    std::uint64_t events = 0, r = 0;
    for (auto _ : state) {
        RngStream rng(1, r++);
        auto tr = sim::simulate_ssa(net, x0, 100.0, {100.0}, rng);
        events += tr.n_events;
        benchmark::DoNotOptimize(tr.final_values);
    }
    state.counters["events/s"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_GoutsiasSsa)->Unit(benchmark::kMillisecond);

// Hybrid gamma = 2 model until both hitting predicates fire.
static void BM_GoutsiasHybrid(benchmark::State& state) {
    auto model = gallery::limit_model("goutsias_g2.limit");
    reduce::LimitEvaluator ev(model);
    std::vector<std::string> names;
    std::vector<double> v0;
    for (const auto& v : model.variables) {
        names.push_back(v.name);
        v0.push_back(v.initial);
    }
    std::vector<sim::Predicate> hits = {{"tau0", "Z45 == 0", names}};
    sim::HybridControls c;
    c.stop_when_all_hit = true;
    std::uint64_t r = 0;
    for (auto _ : state) {
        RngStream rng(2, r++);
        benchmark::DoNotOptimize(sim::simulate_hybrid(ev, v0, 10.0, {0.0}, rng, c, hits).final_time);
    }
}
BENCHMARK(BM_GoutsiasHybrid)->Unit(benchmark::kMicrosecond);

// Truncated stationary solve of the monomer/dimer pair with total m.
static void BM_StationarySolve(benchmark::State& state) {
    Network net = gallery::network("goutsias.crn");
    ScalingSpec spec = gallery::scaling("goutsias_dimer.scale", net);
    const double m = static_cast<double>(state.range(0));
    auto gen = reduce::fast_generator(net, spec, 1, {m, 0, 0, 0, 2, 0});
    for (auto _ : state) {
        benchmark::DoNotOptimize(reduce::stationary_distribution(gen).probs);
    }
    state.counters["states"] = static_cast<double>(gen.states.size());
}
BENCHMARK(BM_StationarySolve)->Arg(100)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

// Full balance analysis with sign-class enumeration.
static void BM_BalanceBinding(benchmark::State& state) {
    Network net = gallery::network("goutsias.crn");
    ScalingSpec spec = gallery::scaling("goutsias_binding.scale", net);
    for (auto _ : state) {
        benchmark::DoNotOptimize(scaling::verify_all_balance(net, spec, 0).class_verdicts.size());
    }
}
BENCHMARK(BM_BalanceBinding)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
