#include "crn/errors.hpp"
#include "crn/sim.hpp"

#include <cmath>

namespace crn::sim {

namespace {

class HybridRun {
  public:
    HybridRun(const reduce::LimitEvaluator& ev, const std::vector<double>& grid, double t_end,
              const HybridControls& c, const std::vector<Predicate>& preds)
        : ev_(ev), grid_(grid), t_end_(t_end), c_(c), preds_(preds) {
        const auto& m = ev.model();
        for (std::size_t ch = 0; ch < m.channels.size(); ++ch) {
            if (!m.channels[ch].jumps.empty()) {
                jump_channels_.push_back(ch);
            }
        }
    }

    double total(const std::vector<double>& v) {
        if (jump_channels_.empty()) {
            return 0.0;
        }
        ev_.rates(v, rates_);
        double s = 0.0;
        for (std::size_t ch : jump_channels_) {
            s += std::max(0.0, rates_[ch]);
        }
        return s;
    }

    void record(double t, const std::vector<double>& v) {
        tr.grid.push_back(t);
        tr.values.push_back(v);
    }

    void check_hits(double t, const std::vector<double>& v) {
        for (std::size_t p = 0; p < preds_.size(); ++p) {
            if (!tr.hits[p] && preds_[p](v)) {
                tr.hits[p] = t;
                --pending_;
            }
        }
    }

    bool all_hit() const { return c_.stop_when_all_hit && !preds_.empty() && pending_ == 0; }

    // Applies the channel picked with the left-limit rates already in rates_.
    // Returns false when the cap stops the run.
    bool jump(double t, std::vector<double>& v, RngStream& rng) {
        if (tr.n_events >= c_.event_cap) {
            if (c_.throw_on_cap) {
                throw Exploded("event cap of " + std::to_string(c_.event_cap) + " reached at t = " +
                               std::to_string(t));
            }
            tr.terminated_by = Termination::EventCap;
            return false;
        }
        double a0 = 0.0;
        for (std::size_t ch : jump_channels_) {
            a0 += std::max(0.0, rates_[ch]);
        }
        const double u = rng.uniform() * a0;
        double acc = 0.0;
        std::optional<std::size_t> pick;
        for (std::size_t ch : jump_channels_) {
            double r = std::max(0.0, rates_[ch]);
            if (r <= 0.0) {
                continue;
            }
            pick = ch;
            acc += r;
            if (u < acc) {
                break;
            }
        }
        if (!pick) {
            return true;
        }
        for (const auto& [var, d] : ev_.model().channels[*pick].jumps) {
            v[var] += d;
        }
        ++tr.n_events;
        if (c_.record_events) {
            tr.events.emplace_back(t, *pick);
        }
        if (pending_ > 0) {
            check_hits(t, v);
        }
        return true;
    }

    Trajectory run(const std::vector<double>& v0, RngStream& rng) {
        const auto& m = ev_.model();
        if (v0.size() != m.variables.size()) {
            throw std::invalid_argument("hybrid initial state has " + std::to_string(v0.size()) +
                                        " entries, expected " + std::to_string(m.variables.size()));
        }
        tr.hits.assign(preds_.size(), std::nullopt);
        pending_ = preds_.size();
        std::vector<double> v = v0;
        check_hits(0.0, v);
        bool flow = false;
        for (const auto& ch : m.channels) {
            for (const auto& d : ch.drifts) {
                flow = flow || m.variables[d.first].kind == reduce::VarKind::Continuous;
            }
        }
        if (all_hit()) {
            while (g_ < grid_.size() && grid_[g_] <= 0.0) {
                record(grid_[g_++], v);
            }
            tr.terminated_by = Termination::Hitting;
        } else if (flow) {
            run_flow(v, rng);
        } else {
            run_jumps(v, rng);
        }
        tr.final_values = v;
        return std::move(tr);
    }

  private:
    // No continuous variables: intensities are constant between jumps.
    void run_jumps(std::vector<double>& v, RngStream& rng) {
        double t = 0.0;
        for (;;) {
            double a0 = total(v);
            double t_next = a0 > 0 ? t + rng.exponential() / a0 : std::numeric_limits<double>::infinity();
            while (g_ < grid_.size() && grid_[g_] < t_next && grid_[g_] <= t_end_) {
                record(grid_[g_++], v);
            }
            if (t_next > t_end_) {
                tr.final_time = t_end_;
                return;
            }
            t = t_next;
            if (!jump(t, v, rng)) {
                tr.final_time = t;
                return;
            }
            if (all_hit()) {
                tr.terminated_by = Termination::Hitting;
                tr.final_time = t;
                return;
            }
        }
    }

    void run_flow(std::vector<double>& v, RngStream& rng) {
        OdeControls oc = c_.ode;
        if (!std::isfinite(oc.max_step) && c_.min_steps > 0) {
            oc.max_step = t_end_ / static_cast<double>(c_.min_steps);
        }
        const auto& ev = ev_;
        OdeStepper st([&ev](const std::vector<double>& y, std::vector<double>& dy, double) { ev.drift(y, dy); },
                      oc);
        double t0 = 0.0;
        st.initialize(v, t0);
        double delta = rng.exponential();
        double acc = 0.0;
        double lam0 = total(v);
        std::vector<double> y;
        for (;;) {
            auto [ta, tb] = st.step();
            double lamb = total(st.state());
            double inc = 0.5 * (lam0 + lamb) * (tb - ta);
            if (acc + inc >= delta) {
                // Bisection on the trapezoid between ta and t.
                double lo = ta, hi = tb;
                for (int it = 0; it < 200; ++it) {
                    double mid = 0.5 * (lo + hi);
                    if (mid <= lo || mid >= hi) {
                        break;
                    }
                    st.state_at(mid, y);
                    double f = acc + 0.5 * (lam0 + total(y)) * (mid - ta) - delta;
                    if (std::fabs(f) <= c_.integral_tol) {
                        lo = hi = mid;
                        break;
                    }
                    (f < 0 ? lo : hi) = mid;
                }
                const double tj = hi;
                if (tj > t_end_) {
                    finish(st, y);
                    v = y;
                    return;
                }
                while (g_ < grid_.size() && grid_[g_] < tj) {
                    st.state_at(grid_[g_], y);
                    record(grid_[g_++], y);
                }
                st.state_at(tj, v);
                total(v);  // left-limit rates for the channel choice
                if (!jump(tj, v, rng)) {
                    tr.final_time = tj;
                    return;
                }
                if (all_hit()) {
                    tr.terminated_by = Termination::Hitting;
                    tr.final_time = tj;
                    return;
                }
                st.initialize(v, tj);
                delta = rng.exponential();
                acc = 0.0;
                lam0 = total(v);
                continue;
            }
            acc += inc;
            while (g_ < grid_.size() && grid_[g_] <= tb && grid_[g_] <= t_end_) {
                st.state_at(grid_[g_], y);
                record(grid_[g_++], y);
            }
            if (tb >= t_end_) {
                finish(st, y);
                v = y;
                return;
            }
            lam0 = lamb;
        }
    }

    void finish(const OdeStepper& st, std::vector<double>& y) {
        while (g_ < grid_.size() && grid_[g_] <= t_end_) {
            st.state_at(grid_[g_], y);
            record(grid_[g_++], y);
        }
        st.state_at(t_end_, y);
        tr.final_time = t_end_;
    }

    const reduce::LimitEvaluator& ev_;
    const std::vector<double>& grid_;
    double t_end_;
    const HybridControls& c_;
    const std::vector<Predicate>& preds_;
    std::vector<std::size_t> jump_channels_;
    std::vector<double> rates_;
    std::size_t pending_ = 0;
    std::size_t g_ = 0;

  public:
    Trajectory tr;
};

}  // namespace

Trajectory simulate_hybrid(const reduce::LimitEvaluator& model, const std::vector<double>& v0,
                           double t_end, const std::vector<double>& grid, RngStream& rng,
                           const HybridControls& controls, const std::vector<Predicate>& predicates) {
    if (!(t_end > 0)) {
        throw std::invalid_argument("t_end must be positive");
    }
    HybridRun run(model, grid, t_end, controls, predicates);
    return run.run(v0, rng);
}

}  // namespace crn::sim
