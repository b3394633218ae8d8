#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

namespace crn {

using OdeRhs = std::function<void(const std::vector<double>& y, std::vector<double>& dydt, double t)>;

enum class OdeMethod { Dopri5, Rk4 };

struct OdeControls {
    OdeMethod method = OdeMethod::Dopri5;
    double rtol = 1e-8;
    double atol = 1e-10;
    double initial_step = 1e-3;
    /// Step of the fixed-step method.
    double fixed_step = 1e-2;
    /// Upper bound on adaptive steps; infinity disables it.
    double max_step = std::numeric_limits<double>::infinity();
    /// Adaptive steps below this raise StepSizeUnderflow.
    double min_step = 1e-14;
};

/// Step-by-step explicit Runge-Kutta integrator with dense output between
/// the last two accepted step points.
class OdeStepper {
  public:
    OdeStepper(OdeRhs rhs, OdeControls controls);
    ~OdeStepper();
    OdeStepper(OdeStepper&&) noexcept;
    OdeStepper& operator=(OdeStepper&&) noexcept;

    void initialize(const std::vector<double>& y, double t);
    /// Advances by one accepted step and returns (t_previous, t_current).
    std::pair<double, double> step();
    double time() const;
    const std::vector<double>& state() const;
    /// Interpolated state for t within the last step.
    void state_at(double t, std::vector<double>& y) const;
    std::size_t steps() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct OdeSolution {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    std::size_t steps = 0;
};

/// Integrates from (t0, y0) and samples at `grid` (ascending, >= t0).
OdeSolution integrate_ode(const OdeRhs& rhs, const std::vector<double>& y0, double t0,
                          const std::vector<double>& grid, const OdeControls& controls = {});

}  // namespace crn
