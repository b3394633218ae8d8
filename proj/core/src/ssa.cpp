#include "crn/errors.hpp"
#include "crn/sim.hpp"

#include <algorithm>
#include <cmath>

namespace crn::sim {

namespace {

struct OpToken {
    const char* text;
    Predicate::Op op;
};

}  // namespace

Predicate::Predicate(std::string name, const std::string& text, const std::vector<std::string>& names)
    : name_(std::move(name)), text_(text) {
    static const OpToken ops[] = {{"==", Op::Eq}, {"!=", Op::Ne}, {"<=", Op::Le},
                                  {">=", Op::Ge}, {"<", Op::Lt},  {">", Op::Gt},
                                  {"=", Op::Eq}};
    std::size_t at = std::string::npos;
    std::size_t len = 0;
    for (const auto& o : ops) {
        std::size_t p = text.find(o.text);
        if (p != std::string::npos) {
            at = p;
            len = std::char_traits<char>::length(o.text);
            op_ = o.op;
            break;
        }
    }
    if (at == std::string::npos) {
        throw ExprError("predicate '" + text + "' has no comparison operator");
    }
    lhs_ = Expr::parse(text.substr(0, at));
    rhs_ = Expr::parse(text.substr(at + len));
    auto resolve = [&](const std::string& s) -> std::optional<std::size_t> {
        auto it = std::find(names.begin(), names.end(), s);
        if (it == names.end()) {
            return std::nullopt;
        }
        return static_cast<std::size_t>(it - names.begin());
    };
    lhs_.bind(resolve);
    rhs_.bind(resolve);
}

bool Predicate::operator()(const std::vector<double>& values) const {
    const double a = lhs_.eval(values.data());
    const double b = rhs_.eval(values.data());
    switch (op_) {
        case Op::Eq:
            return a == b;
        case Op::Ne:
            return a != b;
        case Op::Le:
            return a <= b;
        case Op::Ge:
            return a >= b;
        case Op::Lt:
            return a < b;
        case Op::Gt:
            return a > b;
    }
    return false;
}

std::string to_string(Termination t) {
    switch (t) {
        case Termination::TEnd:
            return "t_end";
        case Termination::EventCap:
            return "event_cap";
        case Termination::Hitting:
            return "hitting";
    }
    return "?";
}

Trajectory simulate_ssa(const Network& network, const State& x0, double t_end,
                        const std::vector<double>& grid, RngStream& rng, const SimControls& controls,
                        const std::vector<Predicate>& predicates,
                        const std::vector<double>& output_scale) {
    const std::size_t n = network.num_species();
    const std::size_t R = network.num_reactions();
    if (x0.size() != n) {
        throw std::invalid_argument("initial state has " + std::to_string(x0.size()) +
                                    " entries, expected " + std::to_string(n));
    }
    if (std::any_of(x0.begin(), x0.end(), [](Count c) { return c < 0; })) {
        throw NegativeCount("initial state has a negative count");
    }
    if (!(t_end > 0)) {
        throw std::invalid_argument("t_end must be positive");
    }
    std::vector<double> scale = output_scale.empty() ? std::vector<double>(n, 1.0) : output_scale;

    // Reactions whose intensity depends on species changed by reaction k.
    std::vector<std::vector<std::size_t>> depends(R);
    for (std::size_t k = 0; k < R; ++k) {
        for (std::size_t j = 0; j < R; ++j) {
            for (std::size_t i = 0; i < n; ++i) {
                if (network.reaction(k).zeta()[i] != 0 && network.reaction(j).nu()[i] > 0) {
                    depends[k].push_back(j);
                    break;
                }
            }
        }
    }

    Trajectory tr;
    State x = x0;
    std::vector<double> vals(n), prev_vals;
    auto refresh = [&] {
        for (std::size_t i = 0; i < n; ++i) {
            vals[i] = static_cast<double>(x[i]) * scale[i];
        }
    };
    refresh();
    tr.hits.assign(predicates.size(), std::nullopt);
    std::size_t pending = predicates.size();
    auto check_hits = [&](double t) {
        for (std::size_t p = 0; p < predicates.size(); ++p) {
            if (!tr.hits[p] && predicates[p](vals)) {
                tr.hits[p] = t;
                --pending;
            }
        }
    };
    check_hits(0.0);

    std::vector<double> a(R);
    for (std::size_t k = 0; k < R; ++k) {
        a[k] = intensity(network, k, x);
    }
    double t = 0.0;
    std::size_t g = 0;
    auto record_until = [&](double t_next) {
        while (g < grid.size() && grid[g] < t_next && grid[g] <= t_end) {
            tr.grid.push_back(grid[g++]);
            tr.values.push_back(vals);
        }
    };
    if (controls.stop_when_all_hit && !predicates.empty() && pending == 0) {
        record_until(0.0);
        while (g < grid.size() && grid[g] == 0.0) {
            tr.grid.push_back(grid[g++]);
            tr.values.push_back(vals);
        }
        tr.terminated_by = Termination::Hitting;
        tr.final_values = vals;
        return tr;
    }
    for (;;) {
        double a0 = 0.0;
        for (double v : a) {
            a0 += v;
        }
        double t_next = std::numeric_limits<double>::infinity();
        if (a0 > 0.0) {
            t_next = t + rng.exponential() / a0;
        }
        if (t_next > t_end) {
            record_until(std::nextafter(t_end, std::numeric_limits<double>::infinity()));
            t = t_end;
            tr.terminated_by = Termination::TEnd;
            break;
        }
        record_until(t_next);
        if (tr.n_events >= controls.event_cap) {
            if (controls.throw_on_cap) {
                throw Exploded("event cap of " + std::to_string(controls.event_cap) +
                               " reached at t = " + std::to_string(t));
            }
            tr.terminated_by = Termination::EventCap;
            break;
        }
        double target = rng.uniform() * a0;
        std::size_t k = R;
        double acc = 0.0;
        for (std::size_t j = 0; j < R; ++j) {
            if (a[j] <= 0.0) {
                continue;
            }
            k = j;
            acc += a[j];
            if (target < acc) {
                break;
            }
        }
        if (controls.on_event) {
            prev_vals = vals;
        }
        x = apply_reaction(network, x, k);
        t = t_next;
        ++tr.n_events;
        for (std::size_t j : depends[k]) {
            a[j] = intensity(network, j, x);
        }
        refresh();
        if (controls.record_events) {
            tr.events.emplace_back(t, k);
        }
        if (controls.on_event) {
            controls.on_event(t, k, prev_vals, vals);
        }
        if (pending > 0) {
            check_hits(t);
            if (pending == 0 && controls.stop_when_all_hit) {
                tr.terminated_by = Termination::Hitting;
                break;
            }
        }
    }
    tr.final_time = t;
    tr.final_values = vals;
    return tr;
}

ScaledProcess::ScaledProcess(const Network& network, const ScalingSpec& spec, const Rational& gamma,
                             double N)
    : spec_(spec), N_(N) {
    if (!(N > 0)) {
        throw std::invalid_argument("scaling parameter N must be positive");
    }
    std::vector<Reaction> rs;
    for (std::size_t k = 0; k < network.num_reactions(); ++k) {
        const Reaction& r = network.reaction(k);
        double c = spec.kappa[k] * rational_power(N, spec.beta[k] + gamma);
        rs.emplace_back(r.nu(), r.nu_prime(), c, r.label());
    }
    std::vector<std::string> names;
    for (const auto& s : network.species()) {
        names.push_back(s.name);
    }
    counts_ = Network(names, rs, network.volume());
    for (const auto& a : spec.alpha) {
        scale_.push_back(1.0 / rational_power(N, a));
    }
}

State ScaledProcess::initial_counts(const State& x0) const {
    State out(x0.size());
    for (std::size_t i = 0; i < x0.size(); ++i) {
        double f = rational_power(N_ / spec_.N0, spec_.alpha[i]);
        out[i] = static_cast<Count>(std::floor(f * static_cast<double>(x0[i]) + 1e-9));
    }
    return out;
}

Trajectory ScaledProcess::simulate(const State& counts0, double t_end, const std::vector<double>& grid,
                                   RngStream& rng, const SimControls& controls,
                                   const std::vector<Predicate>& predicates) const {
    return simulate_ssa(counts_, counts0, t_end, grid, rng, controls, predicates, scale_);
}

std::optional<double> hitting_time(const Network& network, const State& x0, const Trajectory& trajectory,
                                   const Predicate& predicate) {
    State x = x0;
    auto values = [&] {
        std::vector<double> v(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            v[i] = static_cast<double>(x[i]);
        }
        return v;
    };
    if (predicate(values())) {
        return 0.0;
    }
    for (const auto& [t, k] : trajectory.events) {
        x = apply_reaction(network, x, k);
        if (predicate(values())) {
            return t;
        }
    }
    return std::nullopt;
}

}  // namespace crn::sim
