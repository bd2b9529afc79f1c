#pragma once

// Embedded Dormand-Prince 5(4) step with PI step-size control, on flat
// double vectors. The drivers in dynamics.hpp pack their states into these.

#include <functional>
#include <stdexcept>
#include <vector>

namespace rrlab {

// dy = f(t, y); dy arrives sized like y.
using OdeRhs = std::function<void(double t, const std::vector<double>& y,
                                  std::vector<double>& dy)>;

// Tolerances plus the controller memory (h, previous error) that persists
// across steps of one run.
struct OdeController {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double h = 1e-2;       // next step size to try (signed)
  double h_min = 1e-13;  // magnitude floor; going below throws
  double h_max = 0.5;
  double err_prev = 1.0;  // PI memory, dimensionless
};

// The controller drove |h| below h_min: the equation is stiff or runaway at
// this point. Carries the failure location for structured verdicts.
struct StepUnderflow : std::runtime_error {
  double t;
  double h;
  StepUnderflow(double t_, double h_)
      : std::runtime_error("adaptive step size underflow"), t(t_), h(h_) {}
};

struct StepOutcome {
  double h_used = 0.0;
  double error = 0.0;  // scaled error estimate of the accepted step
  int attempts = 0;
};

// Advances (t, y) by exactly one accepted step, retrying with smaller h
// until the embedded 4th-order error passes the tolerance test. Updates
// ctl.h with the PI-controlled proposal for the next step. When t_limit is
// finite the step is clipped so t never overshoots it.
StepOutcome dp54_step(const OdeRhs& f, double& t, std::vector<double>& y,
                      OdeController& ctl, double t_limit);

}  // namespace rrlab
