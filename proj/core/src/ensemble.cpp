#include "crn/errors.hpp"
#include "crn/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <ostream>
#include <thread>

namespace crn::sim {

EnsembleStats run_ensemble(const EnsembleSpec& spec, std::size_t replicates, std::uint64_t seed,
                           unsigned threads) {
    if (replicates == 0) {
        throw std::invalid_argument("run_ensemble needs at least one replicate");
    }
    std::vector<Trajectory> runs(replicates);
    std::vector<std::exception_ptr> errors(replicates);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t r = next.fetch_add(1);
            if (r >= replicates) {
                return;
            }
            try {
                RngStream rng(seed, r);
                runs[r] = spec.run(r, rng);
            } catch (...) {
                errors[r] = std::current_exception();
            }
        }
    };
    unsigned n_threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(replicates)));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < n_threads; ++i) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    for (std::size_t r = 0; r < replicates; ++r) {
        if (errors[r]) {
            try {
                std::rethrow_exception(errors[r]);
            } catch (const Exploded& e) {
                throw Exploded("replicate " + std::to_string(r) + ": " + e.what());
            } catch (const Error& e) {
                throw Error("replicate " + std::to_string(r) + ": " + e.what());
            } catch (const std::exception& e) {
                throw std::runtime_error("replicate " + std::to_string(r) + ": " + e.what());
            }
        }
    }

    EnsembleStats st;
    st.grid = spec.grid;
    st.replicates = replicates;
    st.hit_names = spec.hit_names;
    const std::size_t G = spec.grid.size();
    const std::size_t O = spec.observables.size();
    st.mean.assign(O, std::vector<double>(G, 0.0));
    st.std.assign(O, std::vector<double>(G, 0.0));
    st.samples_per_point.assign(G, 0);
    for (const auto& o : spec.observables) {
        st.names.push_back(o.name);
    }
    // Welford accumulation in replicate order.
    std::vector<std::vector<double>> m2(O, std::vector<double>(G, 0.0));
    for (std::size_t r = 0; r < replicates; ++r) {
        const auto& tr = runs[r];
        for (std::size_t g = 0; g < G && g < tr.values.size(); ++g) {
            const double n = static_cast<double>(++st.samples_per_point[g]);
            for (std::size_t o = 0; o < O; ++o) {
                double x = 0.0;
                const auto& w = spec.observables[o].weights;
                for (std::size_t i = 0; i < w.size() && i < tr.values[g].size(); ++i) {
                    x += w[i] * tr.values[g][i];
                }
                double d = x - st.mean[o][g];
                st.mean[o][g] += d / n;
                m2[o][g] += d * (x - st.mean[o][g]);
            }
        }
    }
    for (std::size_t o = 0; o < O; ++o) {
        for (std::size_t g = 0; g < G; ++g) {
            std::size_t n = st.samples_per_point[g];
            st.std[o][g] = n > 1 ? std::sqrt(m2[o][g] / static_cast<double>(n - 1)) : 0.0;
        }
    }
    st.hit_samples.assign(spec.hit_names.size(), {});
    for (std::size_t p = 0; p < spec.hit_names.size(); ++p) {
        for (std::size_t r = 0; r < replicates; ++r) {
            st.hit_samples[p].push_back(p < runs[r].hits.size() ? runs[r].hits[p] : std::nullopt);
        }
    }
    return st;
}

HitSummary summarize_hits(const std::vector<std::optional<double>>& samples) {
    HitSummary s;
    s.replicates = samples.size();
    double mean = 0.0, m2 = 0.0;
    for (const auto& x : samples) {
        if (!x) {
            continue;
        }
        ++s.hits;
        double d = *x - mean;
        mean += d / static_cast<double>(s.hits);
        m2 += d * (*x - mean);
    }
    s.mean = s.hits ? mean : std::numeric_limits<double>::quiet_NaN();
    s.std_error = s.hits > 1 ? std::sqrt(m2 / static_cast<double>(s.hits - 1) / static_cast<double>(s.hits))
                             : 0.0;
    return s;
}

Comparison compare_models(const EnsembleStats& full, const EnsembleStats& reduced, const ScalingSpec& spec,
                          const Rational& gamma, const std::vector<Rational>& reduced_alpha) {
    const double tscale = rational_power(spec.N0, gamma);
    if (full.grid.size() != reduced.grid.size()) {
        throw GridMismatch("full grid has " + std::to_string(full.grid.size()) + " points, reduced has " +
                           std::to_string(reduced.grid.size()));
    }
    for (std::size_t g = 0; g < full.grid.size(); ++g) {
        double a = full.grid[g];
        double b = reduced.grid[g] * tscale;
        if (std::fabs(a - b) > 1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)})) {
            throw GridMismatch("grid point " + std::to_string(g) + ": full t = " + format_value(a) +
                               ", rescaled reduced t = " + format_value(b));
        }
    }
    Comparison cmp;
    cmp.grid = full.grid;
    for (std::size_t o = 0; o < full.names.size(); ++o) {
        auto it = std::find(reduced.names.begin(), reduced.names.end(), full.names[o]);
        if (it == reduced.names.end()) {
            continue;
        }
        std::size_t ro = static_cast<std::size_t>(it - reduced.names.begin());
        double vscale = ro < reduced_alpha.size() ? rational_power(spec.N0, reduced_alpha[ro]) : 1.0;
        ObservableComparison oc;
        oc.name = full.names[o];
        for (std::size_t g = 0; g < cmp.grid.size(); ++g) {
            double fm = full.mean[o][g], fs = full.std[o][g];
            double rm = reduced.mean[ro][g] * vscale, rs = reduced.std[ro][g] * vscale;
            oc.mean_difference.push_back(fm - rm);
            oc.bands_overlap.push_back(fm - fs <= rm + rs && rm - rs <= fm + fs);
        }
        cmp.observables.push_back(std::move(oc));
    }
    for (std::size_t p = 0; p < full.hit_names.size(); ++p) {
        auto it = std::find(reduced.hit_names.begin(), reduced.hit_names.end(), full.hit_names[p]);
        if (it == reduced.hit_names.end()) {
            continue;
        }
        std::vector<std::optional<double>> scaled;
        for (const auto& x : reduced.hit_samples[static_cast<std::size_t>(it - reduced.hit_names.begin())]) {
            scaled.push_back(x ? std::optional<double>(*x * tscale) : std::nullopt);
        }
        HitComparison hc;
        hc.name = full.hit_names[p];
        hc.full = summarize_hits(full.hit_samples[p]);
        hc.reduced = summarize_hits(scaled);
        hc.ratio = hc.reduced.mean / hc.full.mean;
        cmp.hits.push_back(hc);
    }
    return cmp;
}

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_trajectory_csv_header(std::ostream& os, const std::vector<std::string>& names) {
    os << "replicate,time";
    for (const auto& n : names) {
        os << ',' << n;
    }
    os << '\n';
}

void write_trajectory_csv(std::ostream& os, const std::vector<std::string>& names, const Trajectory& trajectory,
                          std::size_t replicate) {
    for (std::size_t g = 0; g < trajectory.grid.size(); ++g) {
        os << replicate << ',' << format_value(trajectory.grid[g]);
        for (std::size_t i = 0; i < names.size(); ++i) {
            os << ',' << format_value(trajectory.values[g][i]);
        }
        os << '\n';
    }
}

void write_ensemble_csv(std::ostream& os, const EnsembleStats& stats) {
    os << "time";
    for (const auto& n : stats.names) {
        os << ",mean_" << n << ",std_" << n;
    }
    os << ",n\n";
    for (std::size_t g = 0; g < stats.grid.size(); ++g) {
        os << format_value(stats.grid[g]);
        for (std::size_t o = 0; o < stats.names.size(); ++o) {
            os << ',' << format_value(stats.mean[o][g]) << ',' << format_value(stats.std[o][g]);
        }
        os << ',' << stats.samples_per_point[g] << '\n';
    }
}

void write_hitting_csv(std::ostream& os, const std::vector<std::optional<double>>& samples) {
    os << "time\n";
    for (const auto& x : samples) {
        os << (x ? format_value(*x) : std::string("NA")) << '\n';
    }
}

void write_comparison_csv(std::ostream& os, const Comparison& cmp) {
    os << "time";
    for (const auto& o : cmp.observables) {
        os << ",diff_" << o.name << ",overlap_" << o.name;
    }
    os << '\n';
    for (std::size_t g = 0; g < cmp.grid.size(); ++g) {
        os << format_value(cmp.grid[g]);
        for (const auto& o : cmp.observables) {
            os << ',' << format_value(o.mean_difference[g]) << ',' << (o.bands_overlap[g] ? 1 : 0);
        }
        os << '\n';
    }
}

}  // namespace crn::sim
