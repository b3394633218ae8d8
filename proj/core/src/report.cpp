#include "crn/report.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>

namespace crn::report {

using nlohmann::json;

namespace {

json ext(const ExtRational& e) { return e.str(); }
json rat(const Rational& r) { return crn::to_string(r); }

json rationals(const RationalVector& v) {
    json a = json::array();
    for (const auto& x : v) {
        a.push_back(rat(x));
    }
    return a;
}

json names(const Network& net, const std::vector<std::size_t>& idx, bool species) {
    json a = json::array();
    for (std::size_t i : idx) {
        a.push_back(species ? net.species()[i].name : net.reaction_name(i));
    }
    return a;
}

json hits(const sim::HitSummary& h) {
    return {{"hits", h.hits}, {"replicates", h.replicates}, {"mean", h.hits ? json(h.mean) : json(nullptr)},
            {"std_error", h.std_error}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string fnv1a_hex(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string balance_json(const Network& net, const ScalingSpec& spec, const scaling::BalanceReport& rep) {
    json j;
    j["gamma"] = rat(rep.gamma);
    j["N0"] = spec.N0;
    j["alpha"] = rationals(spec.alpha);
    j["beta"] = rationals(spec.beta);
    j["rho"] = rationals(spec.rho);
    j["sccs"] = json::array();
    for (const auto& c : rep.sccs) {
        j["sccs"].push_back(names(net, c, true));
    }
    j["species"] = json::array();
    for (std::size_t i = 0; i < net.num_species(); ++i) {
        const auto& v = rep.species_verdicts[i];
        json s{{"name", net.species()[i].name}, {"isolated", v.isolated},
               {"timescale", ext(rep.natural_timescales[i])}};
        if (!v.isolated) {
            s["verdict"] = scaling::to_string(v.check.verdict);
            s["max_plus"] = ext(v.check.max_plus);
            s["max_minus"] = ext(v.check.max_minus);
        }
        j["species"].push_back(s);
    }
    j["classes"] = json::array();
    for (const auto& c : rep.class_verdicts) {
        json cj{{"scc", c.scc},
                {"gamma_plus", names(net, c.sign_class.gamma_plus, false)},
                {"gamma_minus", names(net, c.sign_class.gamma_minus, false)},
                {"balanced", c.balanced},
                {"max_plus", ext(c.max_plus)},
                {"max_minus", ext(c.max_minus)},
                {"bound", ext(c.bound)},
                {"satisfied", c.satisfied}};
        if (c.sign_class.witness) {
            cj["witness"] = rationals(*c.sign_class.witness);
        }
        j["classes"].push_back(cj);
    }
    j["r1"] = ext(rep.r1);
    j["r2"] = ext(rep.k2.r2);
    j["k2_generators"] = json::array();
    for (std::size_t g = 0; g < rep.k2.generators.size(); ++g) {
        j["k2_generators"].push_back({{"theta", rationals(rep.k2.generators[g])},
                                      {"timescale", ext(rep.k2.generator_timescales[g])}});
    }
    j["fast_reactions"] = names(net, rep.k2.fast_reactions, false);
    j["max_admissible_gamma"] = ext(rep.max_admissible_gamma);
    j["admissible"] = rep.admissible;
    j["r2_exceeds_r1"] = rep.r2_exceeds_r1;
    return dump(j);
}

std::string diagnostics_json(const std::vector<io::ParseDiagnostic>& parse, const std::vector<Diagnostic>& core,
                             const Network* net) {
    json j;
    j["parse"] = json::array();
    for (const auto& d : parse) {
        j["parse"].push_back({{"line", d.line},
                              {"column", d.column},
                              {"severity", d.severity == io::ParseDiagnostic::Severity::Error ? "error" : "warning"},
                              {"message", d.message}});
    }
    j["core"] = json::array();
    for (const auto& d : core) {
        json dj{{"severity", d.severity == Diagnostic::Severity::Error ? "error" : "warning"},
                {"message", d.message}};
        if (d.reaction && net) {
            dj["reaction"] = net->reaction_name(*d.reaction);
        }
        if (d.species && net) {
            dj["species"] = net->species()[*d.species].name;
        }
        j["core"].push_back(dj);
    }
    return dump(j);
}

std::string limit_model_json(const reduce::LimitModel& m) {
    const auto& net = m.network;
    json j;
    j["gamma"] = rat(m.gamma);
    j["closed"] = m.closed;
    j["variables"] = json::array();
    for (const auto& v : m.variables) {
        j["variables"].push_back({{"name", v.name},
                                  {"kind", reduce::to_string(v.kind)},
                                  {"alpha", rat(v.alpha)},
                                  {"theta", rationals(v.theta)},
                                  {"initial", v.initial}});
    }
    j["terms"] = json::array();
    for (const auto& t : m.terms) {
        j["terms"].push_back({{"variable", m.variables[t.variable].name},
                              {"reaction", net.reaction_name(t.reaction)},
                              {"class", reduce::to_string(t.cls)},
                              {"gap", rat(t.exponent_gap)},
                              {"coefficient", rat(t.coefficient)},
                              {"drift_coefficient", rat(t.drift_coefficient)}});
    }
    json fb;
    fb["species"] = names(net, m.fast_block.species, true);
    fb["reactions"] = names(net, m.fast_block.reactions, false);
    fb["discrete_species"] = names(net, m.fast_block.discrete_species, true);
    fb["generator_reactions"] = names(net, m.fast_block.generator_reactions, false);
    fb["conserved"] = json::array();
    for (const auto& c : m.fast_block.conserved) {
        fb["conserved"].push_back(rationals(c));
    }
    j["fast_block"] = fb;
    j["lets"] = json::array();
    for (const auto& [n, e] : m.lets) {
        j["lets"].push_back({{"name", n}, {"expr", e}});
    }
    j["channels"] = json::array();
    for (const auto& ch : m.channels) {
        json cj{{"name", ch.name}};
        if (ch.reaction) {
            cj["reaction"] = net.reaction_name(*ch.reaction);
        }
        cj["source"] = ch.source == reduce::Channel::RateSource::MassAction ? "massaction"
                       : ch.source == reduce::Channel::RateSource::Generic  ? "generic"
                                                                             : "expression";
        if (!ch.rate.empty()) {
            cj["rate"] = ch.rate;
        }
        cj["jumps"] = json::object();
        for (const auto& [v, d] : ch.jumps) {
            cj["jumps"][m.variables[v].name] = d;
        }
        cj["drifts"] = json::object();
        for (const auto& [v, d] : ch.drifts) {
            cj["drifts"][m.variables[v].name] = d;
        }
        j["channels"].push_back(cj);
    }
    j["unresolved"] = m.unresolved;
    j["notes"] = m.notes;
    return dump(j);
}

std::string ensemble_json(const sim::EnsembleStats& st) {
    json j;
    j["replicates"] = st.replicates;
    j["grid_points"] = st.grid.size();
    j["observables"] = st.names;
    j["hitting"] = json::object();
    for (std::size_t p = 0; p < st.hit_names.size(); ++p) {
        j["hitting"][st.hit_names[p]] = hits(sim::summarize_hits(st.hit_samples[p]));
    }
    return dump(j);
}

std::string comparison_json(const sim::Comparison& cmp) {
    json j;
    j["observables"] = json::object();
    for (const auto& o : cmp.observables) {
        double worst = 0.0;
        std::size_t overlaps = 0;
        for (std::size_t g = 0; g < o.mean_difference.size(); ++g) {
            worst = std::max(worst, std::abs(o.mean_difference[g]));
            overlaps += o.bands_overlap[g] ? 1 : 0;
        }
        j["observables"][o.name] = {{"max_abs_mean_difference", worst},
                                    {"band_overlap_fraction",
                                     o.mean_difference.empty() ? 1.0
                                                               : static_cast<double>(overlaps) /
                                                                     static_cast<double>(o.mean_difference.size())}};
    }
    j["hitting"] = json::object();
    for (const auto& h : cmp.hits) {
        j["hitting"][h.name] = {{"full", hits(h.full)}, {"reduced", hits(h.reduced)}, {"ratio", h.ratio}};
    }
    return dump(j);
}

std::string manifest_json(const Manifest& m) {
    json j;
    j["argv"] = m.argv;
    j["command"] = m.command;
    j["config"] = m.config;
    j["inputs"] = m.inputs;
    j["outputs"] = m.outputs;
    return dump(j);
}

}  // namespace crn::report
