// crnscale: balance analysis, reduction and simulation of scaled reaction networks.

#include "support.hpp"

#include "crn/errors.hpp"
#include "crn/gallery.hpp"
#include "crn/limit_io.hpp"
#include "crn/parse.hpp"
#include "crn/reduce.hpp"
#include "crn/report.hpp"
#include "crn/scaling.hpp"
#include "crn/sim.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

using namespace crnscale;
namespace fs = std::filesystem;

namespace {

struct Options {
    std::string network;
    std::string scale;
    std::string model;
    std::vector<std::string> gammas;
    std::string gamma = "0";
    double n = 0.0;
    std::uint64_t seed = 1;
    std::size_t replicates = 1;
    std::size_t reduced_replicates = 0;
    double t_end = 1.0;
    std::size_t grid = 100;
    std::string method;
    std::string out;
    std::string format = "csv";
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    std::uint64_t event_cap = 100000000;
    std::string x0;
    std::string init;
    std::vector<std::string> hits;
    std::vector<std::string> reduced_hits;
    std::vector<std::string> observables;
    std::vector<std::string> aux;
    std::vector<std::string> average;
    std::vector<std::string> lets;
    bool strict = false;
    bool stop_on_hit = false;
    bool no_generic = false;
    bool quiet = false;
    std::vector<std::string> argv;
};

bool report_format(const Options& o) {
    if (o.format != "csv" && o.format != "report") {
        throw UsageError("--format must be csv or report, got '" + o.format + "'");
    }
    return o.format == "report";
}

crn::report::Manifest start_manifest(const Options& o, const std::string& command) {
    crn::report::Manifest m;
    m.argv = o.argv;
    m.command = command;
    return m;
}

void record_input(crn::report::Manifest& m, const InputFile& in) {
    m.inputs[in.path] = crn::report::fnv1a_hex(in.text);
}

std::vector<crn::sim::Predicate> make_predicates(const std::vector<std::string>& specs,
                                                 const std::vector<std::string>& names) {
    std::vector<crn::sim::Predicate> out;
    for (const auto& s : specs) {
        auto [name, text] = split_assignment(s, "--hit");
        try {
            out.emplace_back(name, text, names);
        } catch (const crn::ExprError& e) {
            throw UsageError("--hit " + name + ": " + e.what());
        }
    }
    return out;
}

std::vector<std::string> predicate_names(const std::vector<crn::sim::Predicate>& ps) {
    std::vector<std::string> out;
    for (const auto& p : ps) {
        out.push_back(p.name());
    }
    return out;
}

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) {
        s += (s.empty() ? "" : ";") + x;
    }
    return s;
}

void check_run_options(const Options& o) {
    if (!(o.t_end > 0) || !std::isfinite(o.t_end)) {
        throw UsageError("--t-end must be a positive number");
    }
    if (o.grid == 0) {
        throw UsageError("--grid must be at least 1");
    }
    if (o.replicates == 0) {
        throw UsageError("--replicates must be at least 1");
    }
    if (o.threads == 0) {
        throw UsageError("--threads must be at least 1");
    }
}

void simulation_config(const Options& o, crn::report::Manifest& m) {
    m.config["seed"] = std::to_string(o.seed);
    m.config["replicates"] = std::to_string(o.replicates);
    m.config["t_end"] = crn::io::format_double(o.t_end);
    m.config["grid"] = std::to_string(o.grid);
    m.config["event_cap"] = std::to_string(o.event_cap);
    m.config["threads"] = std::to_string(o.threads);
    m.config["hits"] = join(o.hits);
    m.config["stop_on_hit"] = o.stop_on_hit ? "true" : "false";
    m.config["format"] = o.format;
}

// Every recorded trajectory of an ensemble, in replicate order.
struct TrajectorySink {
    std::mutex mutex;
    std::vector<crn::sim::Trajectory> runs;

    explicit TrajectorySink(std::size_t n) : runs(n) {}
    void put(std::size_t r, const crn::sim::Trajectory& t) {
        std::lock_guard lock(mutex);
        runs[r] = t;
    }
};

void emit_ensemble(const Options& o, const std::vector<std::string>& names, const crn::sim::EnsembleStats& st,
                   const TrajectorySink& sink, crn::report::Manifest& m) {
    std::ostringstream traj;
    crn::sim::write_trajectory_csv_header(traj, names);
    for (std::size_t r = 0; r < sink.runs.size(); ++r) {
        crn::sim::write_trajectory_csv(traj, names, sink.runs[r], r);
    }
    emit(o.out, "trajectories.csv", traj.str(), m);
    if (o.out.empty()) {
        return;
    }
    std::ostringstream ens;
    crn::sim::write_ensemble_csv(ens, st);
    emit(o.out, "ensemble.csv", ens.str(), m);
    for (std::size_t p = 0; p < st.hit_names.size(); ++p) {
        std::ostringstream h;
        crn::sim::write_hitting_csv(h, st.hit_samples[p]);
        emit(o.out, "hit_" + st.hit_names[p] + ".csv", h.str(), m);
    }
    if (report_format(o)) {
        emit(o.out, "ensemble.json", crn::report::ensemble_json(st), m);
    }
}

void print_hit_summary(std::ostream& os, const crn::sim::EnsembleStats& st) {
    for (std::size_t p = 0; p < st.hit_names.size(); ++p) {
        auto s = crn::sim::summarize_hits(st.hit_samples[p]);
        os << st.hit_names[p] << ": " << s.hits << "/" << s.replicates << " hit, mean "
           << crn::sim::format_value(s.mean) << " (se " << crn::sim::format_value(s.std_error) << ")\n";
    }
}

// ---------------------------------------------------------------------------

int cmd_validate(const Options& o) {
    const bool json = report_format(o);
    InputFile in = read_input(o.network);
    crn::io::NetworkParseOptions popt;
    popt.strict = o.strict;
    auto parsed = crn::io::parse_network(in.text, popt);
    std::vector<crn::io::ParseDiagnostic> pdiags = parsed.diagnostics;
    std::vector<crn::Diagnostic> cdiags;
    bool failed = !parsed.ok() || parsed.has_errors();
    const crn::Network* net = parsed.ok() ? &*parsed.value : nullptr;
    if (net) {
        cdiags = crn::validate(*net);
        if (!o.scale.empty()) {
            InputFile sin = read_input(o.scale);
            auto sp = crn::io::parse_scaling(sin.text, *net);
            pdiags.insert(pdiags.end(), sp.diagnostics.begin(), sp.diagnostics.end());
            failed = failed || !sp.ok() || sp.has_errors();
        }
    }
    for (const auto& d : cdiags) {
        failed = failed || d.severity == crn::Diagnostic::Severity::Error;
    }
    if (o.strict) {
        failed = failed || !pdiags.empty() || !cdiags.empty();
    }
    crn::report::Manifest m = start_manifest(o, "validate");
    if (json) {
        emit(o.out, "diagnostics.json", crn::report::diagnostics_json(pdiags, cdiags, net), m);
    } else {
        std::ostringstream os;
        for (const auto& d : pdiags) {
            os << in.path << ":" << crn::io::to_string(d) << "\n";
        }
        for (const auto& d : cdiags) {
            os << in.path << ": "
               << (d.severity == crn::Diagnostic::Severity::Error ? "error: " : "warning: ") << d.message
               << "\n";
        }
        emit(o.out, "diagnostics.txt", os.str(), m);
    }
    write_manifest(o.out, m);
    return failed ? 1 : 0;
}

std::vector<crn::Rational> gamma_list(const Options& o) {
    std::vector<crn::Rational> out;
    for (const auto& g : o.gammas) {
        std::stringstream ss(g);
        for (std::string part; std::getline(ss, part, ',');) {
            out.push_back(parse_gamma(part));
        }
    }
    if (out.empty()) {
        out.push_back(crn::Rational(0));
    }
    return out;
}

int cmd_analyze(const Options& o) {
    const bool json = report_format(o);
    InputFile nin = read_input(o.network);
    InputFile sin = read_input(o.scale);
    crn::Network net = load_network(nin, o.strict);
    crn::ScalingSpec spec = load_scaling(sin, net);
    crn::report::Manifest m = start_manifest(o, "analyze");
    record_input(m, nin);
    record_input(m, sin);
    bool all_admissible = true;
    for (const auto& g : gamma_list(o)) {
        auto rep = crn::scaling::verify_all_balance(net, spec, g);
        all_admissible = all_admissible && rep.admissible;
        std::string tag = crn::to_string(g);
        std::replace(tag.begin(), tag.end(), '/', '_');
        if (json) {
            emit(o.out, "balance_gamma" + tag + ".json", crn::report::balance_json(net, spec, rep), m);
        } else {
            emit(o.out, "balance_gamma" + tag + ".txt", crn::scaling::format_balance_table(net, spec, rep), m);
        }
    }
    m.config["gamma"] = join(o.gammas);
    write_manifest(o.out, m);
    return o.strict && !all_admissible ? 1 : 0;
}

int cmd_timescales(const Options& o) {
    const bool json = report_format(o);
    InputFile nin = read_input(o.network);
    InputFile sin = read_input(o.scale);
    crn::Network net = load_network(nin, o.strict);
    crn::ScalingSpec spec = load_scaling(sin, net);
    auto rep = crn::scaling::verify_all_balance(net, spec, crn::Rational(0));
    crn::report::Manifest m = start_manifest(o, "timescales");
    record_input(m, nin);
    record_input(m, sin);
    if (json) {
        emit(o.out, "timescales.json", crn::report::balance_json(net, spec, rep), m);
    } else {
        std::ostringstream os;
        std::size_t w = 9;
        for (const auto& s : net.species()) {
            w = std::max(w, s.name.size() + 2);
        }
        os << std::left << std::setw(static_cast<int>(w)) << "species" << std::setw(8) << "alpha"
           << "gamma_i\n";
        for (std::size_t i = 0; i < net.num_species(); ++i) {
            os << std::setw(static_cast<int>(w)) << net.species()[i].name << std::setw(8)
               << crn::to_string(spec.alpha[i]) << rep.natural_timescales[i].str() << "\n";
        }
        os << "r1 = " << rep.r1.str() << "\n";
        os << "r2 = " << rep.k2.r2.str() << "\n";
        os << "max admissible gamma = " << rep.max_admissible_gamma.str() << "\n";
        emit(o.out, "timescales.txt", os.str(), m);
    }
    write_manifest(o.out, m);
    return 0;
}

std::size_t reaction_key(const crn::Network& net, const std::string& key) {
    if (auto k = net.reaction_index(key)) {
        return *k;
    }
    try {
        std::size_t used = 0;
        unsigned long v = std::stoul(key, &used);
        if (used == key.size() && v >= 1 && v <= net.num_reactions()) {
            return v - 1;
        }
    } catch (const std::logic_error&) {
    }
    throw UsageError("--average: unknown reaction '" + key + "'");
}

int cmd_reduce(const Options& o) {
    const bool json = report_format(o);
    InputFile nin = read_input(o.network);
    InputFile sin = read_input(o.scale);
    crn::Network net = load_network(nin, o.strict);
    crn::ScalingSpec spec = load_scaling(sin, net);
    crn::report::Manifest m = start_manifest(o, "reduce");
    record_input(m, nin);
    record_input(m, sin);
    const crn::Rational gamma = parse_gamma(o.gamma);

    const auto names = species_names(net);
    std::vector<crn::reduce::AuxVariable> aux;
    for (const auto& a : o.aux) {
        auto [name, text] = split_assignment(a, "--aux");
        aux.push_back({name, parse_combination(text, names)});
    }
    crn::reduce::BuildOptions bo;
    for (const auto& a : o.average) {
        auto [key, expr] = split_assignment(a, "--average");
        bo.averaged[reaction_key(net, key)] = expr;
    }
    for (const auto& l : o.lets) {
        bo.lets.push_back(split_assignment(l, "--let"));
    }
    bo.generic_averaging = !o.no_generic;
    crn::State x0 = resolve_initial_state(net, nin.path, nin.from_gallery, o.x0, o.init, m.inputs);
    std::vector<double> z0(net.num_species());
    for (std::size_t i = 0; i < z0.size(); ++i) {
        z0[i] = static_cast<double>(x0[i]) / crn::rational_power(spec.N0, spec.alpha[i]);
    }
    bo.initial_z = z0;

    crn::reduce::LimitModel model = crn::reduce::build_limit_model(net, spec, gamma, aux, bo);
    for (const auto& u : model.unresolved) {
        std::cerr << "warning: unresolved: " << u << "\n";
    }
    m.config["gamma"] = crn::to_string(gamma);
    m.config["aux"] = join(o.aux);
    m.config["average"] = join(o.average);
    m.config["let"] = join(o.lets);
    if (json) {
        emit(o.out, "model.json", crn::report::limit_model_json(model), m);
    } else {
        emit(o.out, "model.limit", crn::io::format_limit_model(model), m);
    }
    write_manifest(o.out, m);
    return o.strict && !model.closed ? 1 : 0;
}

int simulate_limit_model(const Options& o, const InputFile& in, crn::report::Manifest& m) {
    auto parsed = crn::io::parse_limit_model(in.text);
    for (const auto& d : parsed.diagnostics) {
        std::cerr << in.path << ":" << crn::io::to_string(d) << "\n";
    }
    if (!parsed.ok() || parsed.has_errors()) {
        throw DiagnosticsFailed(in.path + " has errors");
    }
    const crn::reduce::LimitModel& model = *parsed.value;
    const std::string method = o.method.empty() ? "hybrid" : o.method;
    if (method != "hybrid" && method != "ode") {
        throw UsageError("--method " + method + " is not available for a limit model (use hybrid or ode)");
    }
    crn::reduce::LimitEvaluator ev(model);
    std::vector<std::string> names;
    std::vector<double> v0;
    for (const auto& v : model.variables) {
        names.push_back(v.name);
        v0.push_back(v.initial);
    }
    if (!o.x0.empty()) {
        std::stringstream ss(o.x0);
        for (std::string part; std::getline(ss, part, ',');) {
            auto [name, value] = split_assignment(part, "--x0");
            auto idx = model.variable_index(name);
            if (!idx) {
                throw UsageError("--x0: unknown variable '" + name + "'");
            }
            try {
                v0[*idx] = std::stod(value);
            } catch (const std::logic_error&) {
                throw UsageError("--x0: '" + value + "' is not a number");
            }
        }
    }
    const auto grid = make_grid(o.t_end, o.grid);
    auto preds = make_predicates(o.hits, names);
    m.config["method"] = method;

    crn::sim::EnsembleSpec es;
    es.grid = grid;
    es.hit_names = predicate_names(preds);
    for (std::size_t i = 0; i < names.size(); ++i) {
        std::vector<double> w(names.size(), 0.0);
        w[i] = 1.0;
        es.observables.push_back({names[i], w});
    }
    std::size_t replicates = method == "ode" ? 1 : o.replicates;
    TrajectorySink sink(replicates);
    Progress progress("simulate", replicates, !o.quiet && replicates > 1);
    if (method == "ode") {
        es.run = [&](std::size_t r, crn::RngStream&) {
            auto sol = crn::integrate_ode(
                [&ev](const std::vector<double>& y, std::vector<double>& dy, double) { ev.drift(y, dy); }, v0,
                0.0, grid);
            crn::sim::Trajectory t;
            t.grid = sol.times;
            t.values = sol.states;
            t.final_values = sol.states.back();
            t.final_time = o.t_end;
            t.hits.assign(preds.size(), std::nullopt);
            sink.put(r, t);
            return t;
        };
    } else {
        crn::sim::HybridControls hc;
        hc.event_cap = o.event_cap;
        hc.stop_when_all_hit = o.stop_on_hit;
        es.run = [&, hc](std::size_t r, crn::RngStream& rng) {
            auto t = crn::sim::simulate_hybrid(ev, v0, o.t_end, grid, rng, hc, preds);
            sink.put(r, t);
            progress.tick();
            return t;
        };
    }
    auto st = crn::sim::run_ensemble(es, replicates, o.seed, o.threads);
    emit_ensemble(o, names, st, sink, m);
    print_hit_summary(o.out.empty() ? std::cerr : std::cout, st);
    return 0;
}

int cmd_simulate(const Options& o) {
    check_run_options(o);
    report_format(o);
    InputFile in = read_input(o.network);
    crn::report::Manifest m = start_manifest(o, "simulate");
    record_input(m, in);
    simulation_config(o, m);
    if (crn::io::is_limit_model(in.text)) {
        int rc = simulate_limit_model(o, in, m);
        write_manifest(o.out, m);
        return rc;
    }
    crn::Network net = load_network(in, o.strict);
    std::optional<crn::ScalingSpec> spec;
    if (!o.scale.empty()) {
        InputFile sin = read_input(o.scale);
        record_input(m, sin);
        spec = load_scaling(sin, net);
    }
    const std::string method = o.method.empty() ? "ssa" : o.method;
    if (method != "ssa" && method != "ode") {
        throw UsageError("--method " + method + " needs a limit model input (use ssa or ode for a network)");
    }
    m.config["method"] = method;
    crn::State x0 = resolve_initial_state(net, in.path, in.from_gallery, o.x0, o.init, m.inputs);
    const auto names = species_names(net);
    const auto grid = make_grid(o.t_end, o.grid);
    auto preds = make_predicates(o.hits, names);

    crn::sim::EnsembleSpec es;
    es.grid = grid;
    es.hit_names = predicate_names(preds);
    for (std::size_t i = 0; i < names.size(); ++i) {
        std::vector<double> w(names.size(), 0.0);
        w[i] = 1.0;
        es.observables.push_back({names[i], w});
    }

    if (method == "ode") {
        // Mass-action ODE: on counts with kappa' when no scaling is given,
        // otherwise on z = N0^-alpha x with the normalised constants.
        std::vector<double> kappa, y0(names.size());
        for (std::size_t k = 0; k < net.num_reactions(); ++k) {
            kappa.push_back(spec ? spec->kappa[k] : net.reaction(k).rate_const());
        }
        for (std::size_t i = 0; i < y0.size(); ++i) {
            y0[i] = static_cast<double>(x0[i]) / (spec ? crn::rational_power(spec->N0, spec->alpha[i]) : 1.0);
        }
        TrajectorySink sink(1);
        es.run = [&](std::size_t r, crn::RngStream&) {
            auto sol = crn::integrate_ode(
                [&](const std::vector<double>& y, std::vector<double>& dy, double) {
                    dy = crn::classical_ode_rhs(net, kappa, y);
                },
                y0, 0.0, grid);
            crn::sim::Trajectory t;
            t.grid = sol.times;
            t.values = sol.states;
            t.final_values = sol.states.back();
            t.final_time = o.t_end;
            t.hits.assign(preds.size(), std::nullopt);
            sink.put(r, t);
            return t;
        };
        auto st = crn::sim::run_ensemble(es, 1, o.seed, 1);
        emit_ensemble(o, names, st, sink, m);
        write_manifest(o.out, m);
        return 0;
    }

    crn::sim::SimControls sc;
    sc.event_cap = o.event_cap;
    sc.stop_when_all_hit = o.stop_on_hit;
    TrajectorySink sink(o.replicates);
    Progress progress("simulate", o.replicates, !o.quiet && o.replicates > 1);
    std::optional<crn::sim::ScaledProcess> scaled;
    crn::State counts0 = x0;
    if (spec) {
        const crn::Rational gamma = parse_gamma(o.gamma);
        const double N = o.n > 0 ? o.n : spec->N0;
        scaled.emplace(net, *spec, gamma, N);
        counts0 = scaled->initial_counts(x0);
        m.config["gamma"] = crn::to_string(gamma);
        m.config["n"] = crn::io::format_double(N);
    }
    es.run = [&, sc](std::size_t r, crn::RngStream& rng) {
        auto t = scaled ? scaled->simulate(counts0, o.t_end, grid, rng, sc, preds)
                        : crn::sim::simulate_ssa(net, counts0, o.t_end, grid, rng, sc, preds);
        sink.put(r, t);
        progress.tick();
        return t;
    };
    auto st = crn::sim::run_ensemble(es, o.replicates, o.seed, o.threads);
    emit_ensemble(o, names, st, sink, m);
    print_hit_summary(o.out.empty() ? std::cerr : std::cout, st);
    write_manifest(o.out, m);
    return 0;
}

int cmd_compare(const Options& o) {
    check_run_options(o);
    const bool json = report_format(o);
    InputFile nin = read_input(o.network);
    InputFile min = read_input(o.model);
    crn::report::Manifest m = start_manifest(o, "compare");
    record_input(m, nin);
    record_input(m, min);
    simulation_config(o, m);
    crn::Network net = load_network(nin, o.strict);
    auto parsed = crn::io::parse_limit_model(min.text);
    for (const auto& d : parsed.diagnostics) {
        std::cerr << min.path << ":" << crn::io::to_string(d) << "\n";
    }
    if (!parsed.ok() || parsed.has_errors()) {
        throw DiagnosticsFailed(min.path + " has errors");
    }
    const crn::reduce::LimitModel& model = *parsed.value;
    if (model.network.num_species() != net.num_species()) {
        throw UsageError("model and network have different species");
    }
    crn::reduce::LimitEvaluator ev(model);
    crn::State x0 = resolve_initial_state(net, nin.path, nin.from_gallery, o.x0, o.init, m.inputs);

    const auto names = species_names(net);
    std::vector<std::string> vnames;
    std::vector<double> v0;
    for (const auto& v : model.variables) {
        vnames.push_back(v.name);
        v0.push_back(v.initial);
    }
    const double tscale = crn::rational_power(model.spec.N0, model.gamma);
    const auto grid = make_grid(o.t_end, o.grid);
    std::vector<double> rgrid;
    for (double t : grid) {
        rgrid.push_back(t / tscale);
    }

    // Observables present in both models: species kept by the limit model and
    // any --observable NAME=combination matching a variable name.
    crn::sim::EnsembleSpec full, red;
    full.grid = grid;
    red.grid = rgrid;
    std::vector<crn::Rational> ralpha;
    auto add_pair = [&](const std::string& name, std::vector<double> wf, std::size_t var) {
        full.observables.push_back({name, std::move(wf)});
        std::vector<double> wr(vnames.size(), 0.0);
        wr[var] = 1.0;
        red.observables.push_back({name, wr});
        ralpha.push_back(model.variables[var].alpha);
    };
    for (std::size_t j = 0; j < model.variables.size(); ++j) {
        if (auto s = model.variables[j].species) {
            std::vector<double> w(names.size(), 0.0);
            w[*s] = 1.0;
            add_pair(names[*s], w, j);
        }
    }
    for (const auto& ob : o.observables) {
        auto [name, text] = split_assignment(ob, "--observable");
        auto j = model.variable_index(name);
        if (!j) {
            throw UsageError("--observable " + name + ": the limit model has no such variable");
        }
        auto theta = parse_combination(text, names);
        std::vector<double> w;
        for (const auto& q : theta) {
            w.push_back(crn::to_double(q));
        }
        add_pair(name, w, *j);
    }
    auto fpreds = make_predicates(o.hits, names);
    auto rpreds = make_predicates(o.reduced_hits, vnames);
    full.hit_names = predicate_names(fpreds);
    red.hit_names = predicate_names(rpreds);
    m.config["reduced_hits"] = join(o.reduced_hits);
    m.config["observables"] = join(o.observables);

    crn::sim::SimControls sc;
    sc.event_cap = o.event_cap;
    sc.stop_when_all_hit = o.stop_on_hit;
    Progress pf("full", o.replicates, !o.quiet && o.replicates > 1);
    full.run = [&, sc](std::size_t, crn::RngStream& rng) {
        auto t = crn::sim::simulate_ssa(net, x0, o.t_end, grid, rng, sc, fpreds);
        pf.tick();
        return t;
    };
    crn::sim::HybridControls hc;
    hc.event_cap = o.event_cap;
    hc.stop_when_all_hit = o.stop_on_hit;
    const std::size_t nr = o.reduced_replicates ? o.reduced_replicates : o.replicates;
    Progress pr("reduced", nr, !o.quiet && nr > 1);
    red.run = [&, hc](std::size_t, crn::RngStream& rng) {
        auto t = crn::sim::simulate_hybrid(ev, v0, o.t_end / tscale, rgrid, rng, hc, rpreds);
        pr.tick();
        return t;
    };
    m.config["reduced_replicates"] = std::to_string(nr);
    m.config["reduced_seed"] = std::to_string(o.seed + 1);

    auto fs_ = crn::sim::run_ensemble(full, o.replicates, o.seed, o.threads);
    auto rs = crn::sim::run_ensemble(red, nr, o.seed + 1, o.threads);
    auto cmp = crn::sim::compare_models(fs_, rs, model.spec, model.gamma, ralpha);

    std::ostringstream summary;
    for (const auto& h : cmp.hits) {
        summary << h.name << ": full " << crn::sim::format_value(h.full.mean) << " (se "
                << crn::sim::format_value(h.full.std_error) << ", " << h.full.hits << "/" << h.full.replicates
                << "), reduced " << crn::sim::format_value(h.reduced.mean) << " (se "
                << crn::sim::format_value(h.reduced.std_error) << ", " << h.reduced.hits << "/"
                << h.reduced.replicates << "), ratio " << crn::sim::format_value(h.ratio) << "\n";
    }
    for (const auto& ob : cmp.observables) {
        double worst = 0.0;
        std::size_t overlap = 0;
        for (std::size_t g = 0; g < ob.mean_difference.size(); ++g) {
            worst = std::max(worst, std::fabs(ob.mean_difference[g]));
            overlap += ob.bands_overlap[g] ? 1 : 0;
        }
        summary << ob.name << ": max |mean difference| " << crn::sim::format_value(worst) << ", bands overlap at "
                << overlap << "/" << ob.mean_difference.size() << " points\n";
    }
    emit(o.out, "summary.txt", summary.str(), m);
    if (!o.out.empty()) {
        std::cout << summary.str();
        std::ostringstream c;
        crn::sim::write_comparison_csv(c, cmp);
        emit(o.out, "comparison.csv", c.str(), m);
        if (json) {
            emit(o.out, "comparison.json", crn::report::comparison_json(cmp), m);
        }
    }
    write_manifest(o.out, m);
    return 0;
}

int cmd_examples(const Options& o) {
    const std::string dir = o.out.empty() ? "examples" : o.out;
    fs::create_directories(dir);
    for (const auto& name : crn::gallery::files()) {
        fs::path p = fs::path(dir) / name;
        std::ofstream f(p, std::ios::binary);
        f << crn::gallery::file(name);
        if (!f) {
            throw std::runtime_error("cannot write " + p.string());
        }
        std::cout << p.string() << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    o.argv.assign(argv, argv + argc);
    CLI::App app{"Multiscale analysis, reduction and simulation of reaction networks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "crnscale 0.1.0");

    auto add_format = [&](CLI::App* c) {
        c->add_option("--format", o.format, "csv | report")->capture_default_str();
        c->add_option("--out", o.out, "output directory (stdout when omitted)");
        c->add_flag("--strict", o.strict, "treat warnings as errors");
    };
    auto add_sim = [&](CLI::App* c) {
        c->add_option("--seed", o.seed)->capture_default_str();
        c->add_option("--replicates", o.replicates)->capture_default_str();
        c->add_option("--t-end", o.t_end)->capture_default_str();
        c->add_option("--grid", o.grid, "number of grid intervals on [0, t-end]")->capture_default_str();
        c->add_option("--threads", o.threads)->capture_default_str();
        c->add_option("--event-cap", o.event_cap)->capture_default_str();
        c->add_option("--x0", o.x0, "initial state, NAME=value,... or a full comma list");
        c->add_option("--init", o.init, "initial-state file (YAML species: count)");
        c->add_option("--hit", o.hits, "hitting predicate NAME=EXPR, e.g. tau1='DNA + DNA_D == 1'");
        c->add_flag("--stop-on-hit", o.stop_on_hit, "end a path once every predicate has been hit");
        c->add_flag("--quiet", o.quiet, "no progress on stderr");
    };

    auto* validate = app.add_subcommand("validate", "parse a network (and scaling) and report diagnostics");
    validate->add_option("network", o.network)->required();
    validate->add_option("scale", o.scale);
    add_format(validate);

    auto* analyze = app.add_subcommand("analyze", "balance report at one or more gamma values");
    analyze->add_option("network", o.network)->required();
    analyze->add_option("scale", o.scale)->required();
    analyze->add_option("--gamma", o.gammas, "rational time scale(s), comma separated");
    add_format(analyze);

    auto* timescales = app.add_subcommand("timescales", "natural time scales, r1, r2 and the admissible gamma");
    timescales->add_option("network", o.network)->required();
    timescales->add_option("scale", o.scale)->required();
    add_format(timescales);

    auto* reduce = app.add_subcommand("reduce", "emit the limit model at gamma");
    reduce->add_option("network", o.network)->required();
    reduce->add_option("scale", o.scale)->required();
    reduce->add_option("--gamma", o.gamma)->capture_default_str();
    reduce->add_option("--aux", o.aux, "auxiliary variable NAME=combination, e.g. Z45='DNA + DNA_D'");
    reduce->add_option("--average", o.average, "averaged intensity REACTION=EXPR");
    reduce->add_option("--let", o.lets, "helper expression NAME=EXPR for --average");
    reduce->add_option("--x0", o.x0);
    reduce->add_option("--init", o.init);
    reduce->add_flag("--no-generic", o.no_generic, "do not average over the fast block numerically");
    add_format(reduce);

    auto* simulate = app.add_subcommand("simulate", "simulate a network (ssa | ode) or a limit model (hybrid | ode)");
    simulate->add_option("input", o.network, "network or limit model")->required();
    simulate->add_option("scale", o.scale, "scaling spec; simulates the scaled process");
    simulate->add_option("--method", o.method, "ssa | hybrid | ode");
    simulate->add_option("--gamma", o.gamma)->capture_default_str();
    simulate->add_option("--n", o.n, "scaling parameter N (default N0)");
    add_sim(simulate);
    add_format(simulate);

    auto* compare = app.add_subcommand("compare", "full SSA against a reduced limit model");
    compare->add_option("network", o.network)->required();
    compare->add_option("model", o.model, "limit model file")->required();
    compare->add_option("--reduced-hit", o.reduced_hits, "hitting predicate on limit-model variables");
    compare->add_option("--observable", o.observables, "VAR=combination of species");
    compare->add_option("--reduced-replicates", o.reduced_replicates);
    add_sim(compare);
    add_format(compare);

    auto* examples = app.add_subcommand("examples", "write the built-in example files");
    examples->add_option("--out", o.out, "directory (default ./examples)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*validate) return cmd_validate(o);
        if (*analyze) return cmd_analyze(o);
        if (*timescales) return cmd_timescales(o);
        if (*reduce) return cmd_reduce(o);
        if (*simulate) return cmd_simulate(o);
        if (*compare) return cmd_compare(o);
        if (*examples) return cmd_examples(o);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const DiagnosticsFailed& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
