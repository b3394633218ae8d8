#include "crn/ode.hpp"

#include "crn/errors.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace crn {

namespace odeint = boost::numeric::odeint;

namespace {
using Vec = std::vector<double>;
using Dopri = odeint::runge_kutta_dopri5<Vec>;
using DenseDopri = odeint::result_of::make_dense_output<Dopri>::type;
}  // namespace

struct OdeStepper::Impl {
    OdeRhs rhs;
    OdeControls c;
    std::size_t steps = 0;
    // Adaptive path.
    std::unique_ptr<DenseDopri> dense;
    // Fixed-step path: cubic Hermite between step points.
    odeint::runge_kutta4<Vec> rk4;
    double t_prev = 0.0, t = 0.0;
    Vec y_prev, y, f_prev, f;

    void call(const Vec& x, Vec& dx, double tt) const { rhs(x, dx, tt); }
};

OdeStepper::OdeStepper(OdeRhs rhs, OdeControls controls) : impl_(std::make_unique<Impl>()) {
    impl_->rhs = std::move(rhs);
    impl_->c = controls;
}

OdeStepper::~OdeStepper() = default;
OdeStepper::OdeStepper(OdeStepper&&) noexcept = default;
OdeStepper& OdeStepper::operator=(OdeStepper&&) noexcept = default;

void OdeStepper::initialize(const std::vector<double>& y, double t) {
    auto& im = *impl_;
    if (im.c.method == OdeMethod::Dopri5) {
        if (!im.dense) {
            im.dense = std::make_unique<DenseDopri>(
                std::isfinite(im.c.max_step)
                    ? odeint::make_dense_output(im.c.atol, im.c.rtol, im.c.max_step, Dopri())
                    : odeint::make_dense_output(im.c.atol, im.c.rtol, Dopri()));
        }
        double h = im.c.initial_step;
        if (std::isfinite(im.c.max_step)) {
            h = std::min(h, im.c.max_step);
        }
        im.dense->initialize(y, t, h);
    } else {
        im.y = y;
        im.t = t;
        im.f.resize(y.size());
        im.call(im.y, im.f, t);
    }
}

std::pair<double, double> OdeStepper::step() {
    auto& im = *impl_;
    ++im.steps;
    if (im.c.method == OdeMethod::Dopri5) {
        auto sys = [&im](const Vec& x, Vec& dx, double tt) { im.call(x, dx, tt); };
        std::pair<double, double> r;
        try {
            r = im.dense->do_step(sys);
        } catch (const odeint::step_adjustment_error& e) {
            throw StepSizeUnderflow(std::string("ODE step size adjustment failed: ") + e.what());
        }
        if (r.second - r.first < im.c.min_step) {
            throw StepSizeUnderflow("ODE step " + std::to_string(r.second - r.first) +
                                    " below minimum at t = " + std::to_string(r.first));
        }
        for (double v : im.dense->current_state()) {
            if (!std::isfinite(v)) {
                throw StepSizeUnderflow("ODE state became non-finite at t = " + std::to_string(r.second));
            }
        }
        return r;
    }
    auto sys = [&im](const Vec& x, Vec& dx, double tt) { im.call(x, dx, tt); };
    im.t_prev = im.t;
    im.y_prev = im.y;
    im.f_prev = im.f;
    im.rk4.do_step(sys, im.y, im.t, im.c.fixed_step);
    im.t += im.c.fixed_step;
    im.call(im.y, im.f, im.t);
    return {im.t_prev, im.t};
}

double OdeStepper::time() const {
    return impl_->c.method == OdeMethod::Dopri5 ? impl_->dense->current_time() : impl_->t;
}

const std::vector<double>& OdeStepper::state() const {
    return impl_->c.method == OdeMethod::Dopri5 ? impl_->dense->current_state() : impl_->y;
}

void OdeStepper::state_at(double t, std::vector<double>& y) const {
    const auto& im = *impl_;
    if (im.c.method == OdeMethod::Dopri5) {
        y.resize(im.dense->current_state().size());
        if (t == im.dense->current_time()) {
            y = im.dense->current_state();
        } else {
            im.dense->calc_state(t, y);
        }
        return;
    }
    if (t == im.t) {
        y = im.y;
        return;
    }
    const double h = im.t - im.t_prev;
    const double s = (t - im.t_prev) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    y.resize(im.y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = h00 * im.y_prev[i] + h10 * h * im.f_prev[i] + h01 * im.y[i] + h11 * h * im.f[i];
    }
}

std::size_t OdeStepper::steps() const { return impl_->steps; }

OdeSolution integrate_ode(const OdeRhs& rhs, const std::vector<double>& y0, double t0,
                          const std::vector<double>& grid, const OdeControls& controls) {
    OdeSolution sol;
    if (!std::is_sorted(grid.begin(), grid.end()) || (!grid.empty() && grid.front() < t0)) {
        throw std::invalid_argument("integrate_ode: grid must be ascending and start at or after t0");
    }
    OdeStepper st(rhs, controls);
    st.initialize(y0, t0);
    std::size_t g = 0;
    Vec y;
    while (g < grid.size() && grid[g] == t0) {
        sol.times.push_back(grid[g++]);
        sol.states.push_back(y0);
    }
    while (g < grid.size()) {
        auto [a, b] = st.step();
        while (g < grid.size() && grid[g] <= b) {
            st.state_at(grid[g], y);
            sol.times.push_back(grid[g++]);
            sol.states.push_back(y);
        }
    }
    sol.steps = st.steps();
    return sol;
}

}  // namespace crn
