#include "crn/errors.hpp"
#include "crn/reduce.hpp"

#include <Eigen/SparseLU>
#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/strong_components.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <sstream>

namespace crn::reduce {

namespace {

double rate_at(const Network& network, const ScalingSpec& spec, std::size_t k,
               const std::vector<std::size_t>& species, const std::vector<Count>& y,
               std::vector<double>& scratch) {
    for (std::size_t j = 0; j < species.size(); ++j) {
        scratch[species[j]] = static_cast<double>(y[j]);
    }
    return limit_intensity(network, spec, k, scratch);
}

// Per-coordinate cap from a birth-death caricature of each lattice species:
// births at their rate in y0, deaths at their per-molecule rate.
Count default_bound(const Network& network, const ScalingSpec& spec, const FastBlock& block,
                    const std::vector<Count>& y0, const std::vector<double>& frozen) {
    std::vector<double> scratch = frozen;
    const auto& sp = block.discrete_species;
    Count bound = 8;
    for (std::size_t j = 0; j < sp.size(); ++j) {
        double birth = 0.0;
        double death = 0.0;
        std::vector<Count> y = y0;
        y[j] = std::max<Count>(y0[j], 1);
        for (std::size_t k : block.generator_reactions) {
            Count z = network.reaction(k).zeta()[sp[j]];
            if (z > 0) {
                birth += rate_at(network, spec, k, sp, y0, scratch);
            } else if (z < 0) {
                death += rate_at(network, spec, k, sp, y, scratch) / static_cast<double>(y[j]);
            }
        }
        double mean = death > 0 ? birth / death : static_cast<double>(y0[j]);
        mean = std::max(mean, static_cast<double>(y0[j]));
        if (!std::isfinite(mean) || mean > 1e9) {
            mean = 1e9;
        }
        bound = std::max<Count>(bound, static_cast<Count>(std::ceil(mean + 10.0 * std::sqrt(mean))) + 1);
    }
    for (Count v : y0) {
        bound = std::max(bound, v);
    }
    return bound;
}

FastGenerator build_generator(const Network& network, const ScalingSpec& spec, const FastBlock& block,
                              const std::vector<double>& frozen_slow, Count bound,
                              std::size_t max_states) {
    const auto& sp = block.discrete_species;
    if (sp.empty()) {
        throw EmptyStateSpace("fast block has no discrete species to build a generator on");
    }
    if (frozen_slow.size() != network.num_species()) {
        throw std::invalid_argument("frozen_slow has wrong dimension");
    }
    FastGenerator gen;
    gen.species = sp;
    gen.frozen_slow = frozen_slow;
    gen.reactions = block.generator_reactions;
    gen.bound = bound;

    std::vector<Count> y0(sp.size());
    for (std::size_t j = 0; j < sp.size(); ++j) {
        double v = frozen_slow[sp[j]];
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw EmptyStateSpace("fast species " + network.species()[sp[j]].name +
                                  " has an invalid starting value");
        }
        y0[j] = std::llround(v);
        if (y0[j] > bound) {
            throw EmptyStateSpace("starting lattice point lies outside the truncation box");
        }
    }
    std::vector<std::vector<Count>> delta;
    for (std::size_t k : gen.reactions) {
        std::vector<Count> d(sp.size());
        for (std::size_t j = 0; j < sp.size(); ++j) {
            d[j] = network.reaction(k).zeta()[sp[j]];
        }
        delta.push_back(std::move(d));
    }

    std::map<std::vector<Count>, std::size_t> index;
    std::deque<std::size_t> queue;
    index.emplace(y0, 0);
    gen.states.push_back(y0);
    gen.on_boundary.push_back(false);
    queue.push_back(0);
    std::vector<double> scratch = frozen_slow;
    while (!queue.empty()) {
        std::size_t s = queue.front();
        queue.pop_front();
        for (std::size_t r = 0; r < gen.reactions.size(); ++r) {
            const std::vector<Count> y = gen.states[s];
            double rate = rate_at(network, spec, gen.reactions[r], sp, y, scratch);
            if (!(rate > 0.0)) {
                continue;
            }
            std::vector<Count> next = y;
            bool outside = false;
            bool moved = false;
            for (std::size_t j = 0; j < sp.size(); ++j) {
                next[j] += delta[r][j];
                moved = moved || delta[r][j] != 0;
                outside = outside || next[j] < 0 || next[j] > bound;
            }
            if (!moved) {
                continue;
            }
            if (outside) {
                gen.on_boundary[s] = true;
                continue;
            }
            auto it = index.find(next);
            std::size_t t;
            if (it == index.end()) {
                if (gen.states.size() >= max_states) {
                    gen.on_boundary[s] = true;
                    continue;
                }
                t = gen.states.size();
                index.emplace(next, t);
                gen.states.push_back(next);
                gen.on_boundary.push_back(false);
                queue.push_back(t);
            } else {
                t = it->second;
            }
            gen.transitions.push_back({s, t, rate});
        }
    }
    return gen;
}

}  // namespace

FastGenerator fast_generator(const Network& network, const ScalingSpec& spec, const Rational& gamma,
                             const std::vector<double>& frozen_slow, const Truncation& truncation) {
    FastBlock block = find_fast_block(network, spec, gamma);
    if (block.discrete_species.empty()) {
        throw EmptyStateSpace("no discrete fast block at gamma = " + crn::to_string(gamma));
    }
    std::vector<Count> y0;
    for (std::size_t i : block.discrete_species) {
        y0.push_back(std::llround(std::max(0.0, frozen_slow.at(i))));
    }
    Count bound = truncation.initial_bound > 0
                      ? truncation.initial_bound
                      : default_bound(network, spec, block, y0, frozen_slow);
    return build_generator(network, spec, block, frozen_slow, bound, truncation.max_states);
}

FastGenerator fast_generator(const LimitModel& model, const std::vector<double>& frozen_slow,
                             const Truncation& truncation) {
    return fast_generator(model.network, model.spec, model.gamma, frozen_slow, truncation);
}

Equilibrium stationary_distribution(const FastGenerator& gen, double tol) {
    const std::size_t n = gen.states.size();
    if (n == 0) {
        throw EmptyStateSpace("generator has no states");
    }
    Equilibrium eq;
    eq.species = gen.species;
    eq.support = gen.states;

    // Closed communicating classes.
    using Graph = boost::adjacency_list<boost::vecS, boost::vecS, boost::directedS>;
    Graph g(n);
    for (const auto& t : gen.transitions) {
        if (t.rate > 0 && t.from != t.to) {
            boost::add_edge(t.from, t.to, g);
        }
    }
    std::vector<int> comp(n);
    int nc = boost::strong_components(g, comp.data());
    std::vector<bool> leaks(nc, false);
    for (const auto& t : gen.transitions) {
        if (t.rate > 0 && comp[t.from] != comp[t.to]) {
            leaks[comp[t.from]] = true;
        }
    }
    std::vector<int> closed;
    for (int c = 0; c < nc; ++c) {
        if (!leaks[c]) {
            closed.push_back(c);
        }
    }
    if (closed.size() > 1) {
        std::ostringstream os;
        os << "truncated fast chain has " << closed.size() << " closed classes:";
        for (int c : closed) {
            os << " {";
            int shown = 0;
            for (std::size_t s = 0; s < n && shown < 4; ++s) {
                if (comp[s] == c) {
                    os << (shown++ ? " " : "") << "(";
                    for (std::size_t j = 0; j < gen.states[s].size(); ++j) {
                        os << (j ? "," : "") << gen.states[s][j];
                    }
                    os << ")";
                }
            }
            os << "}";
        }
        throw NotIrreducible(os.str());
    }

    if (n == 1) {
        eq.probs = {1.0};
    } else {
        // Q^T pi = 0 with the last balance equation replaced by sum(pi) = 1.
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(2 * gen.transitions.size() + n);
        const auto last = static_cast<Eigen::Index>(n - 1);
        for (const auto& t : gen.transitions) {
            auto from = static_cast<Eigen::Index>(t.from);
            auto to = static_cast<Eigen::Index>(t.to);
            if (to != last) {
                trip.emplace_back(to, from, t.rate);
            }
            if (from != last) {
                trip.emplace_back(from, from, -t.rate);
            }
        }
        for (Eigen::Index c = 0; c <= last; ++c) {
            trip.emplace_back(last, c, 1.0);
        }
        Eigen::SparseMatrix<double> A(last + 1, last + 1);
        A.setFromTriplets(trip.begin(), trip.end());
        A.makeCompressed();
        // The dense normalisation row defeats COLAMD (quadratic fill on long
        // chains). States come in BFS order, so the natural ordering is
        // already banded; diagonal pivots keep that row at the bottom.
        Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::NaturalOrdering<int>> lu;
        lu.setPivotThreshold(0.01);
        lu.compute(A);
        if (lu.info() != Eigen::Success) {
            throw NotIrreducible("stationary system is singular: " + lu.lastErrorMessage());
        }
        Eigen::VectorXd b = Eigen::VectorXd::Zero(last + 1);
        b[last] = 1.0;
        Eigen::VectorXd pi = lu.solve(b);
        // Iterative refinement for badly scaled rates.
        for (int it = 0; it < 3; ++it) {
            Eigen::VectorXd r = b - A * pi;
            if (r.lpNorm<Eigen::Infinity>() <= tol) {
                break;
            }
            pi += lu.solve(r);
        }
        double total = 0.0;
        eq.probs.resize(n);
        for (std::size_t s = 0; s < n; ++s) {
            eq.probs[s] = std::max(0.0, pi[static_cast<Eigen::Index>(s)]);
            total += eq.probs[s];
        }
        for (double& p : eq.probs) {
            p /= total;
        }
    }

    std::vector<double> flow(n, 0.0);
    for (const auto& t : gen.transitions) {
        double f = eq.probs[t.from] * t.rate;
        flow[t.to] += f;
        flow[t.from] -= f;
    }
    for (double f : flow) {
        eq.residual = std::max(eq.residual, std::fabs(f));
    }
    for (std::size_t s = 0; s < n; ++s) {
        if (gen.on_boundary[s]) {
            eq.truncation_mass_bound += eq.probs[s];
        }
    }
    return eq;
}

Equilibrium fast_equilibrium(const Network& network, const ScalingSpec& spec, const FastBlock& block,
                             const std::vector<double>& frozen_slow, const Truncation& truncation) {
    std::vector<Count> y0;
    for (std::size_t i : block.discrete_species) {
        y0.push_back(std::llround(std::max(0.0, frozen_slow.at(i))));
    }
    Count bound = truncation.initial_bound > 0
                      ? truncation.initial_bound
                      : default_bound(network, spec, block, y0, frozen_slow);
    for (;;) {
        FastGenerator gen =
            build_generator(network, spec, block, frozen_slow, bound, truncation.max_states);
        Equilibrium eq = stationary_distribution(gen);
        bool capped = gen.states.size() >= truncation.max_states;
        if (eq.truncation_mass_bound <= truncation.tol || capped) {
            return eq;
        }
        bound *= 2;
    }
}

}  // namespace crn::reduce
