#include "rrlab/ode.hpp"

#include <algorithm>
#include <cmath>

namespace rrlab {

namespace {

// Dormand-Prince 5(4) tableau. b is the 5th-order propagation row; d is
// b minus the embedded 4th-order row and yields the error directly.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                 a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double d1 = b1 - 5179.0 / 57600, d3 = b3 - 7571.0 / 16695,
                 d4 = b4 - 393.0 / 640, d5 = b5 + 92097.0 / 339200,
                 d6 = b6 - 187.0 / 2100, d7 = -1.0 / 40;

}  // namespace

StepOutcome dp54_step(const OdeRhs& f, double& t, std::vector<double>& y,
                      OdeController& ctl, double t_limit) {
  const std::size_t n = y.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
  std::vector<double> yt(n), y5(n);
  StepOutcome out;

  f(t, y, k1);
  for (;;) {
    ++out.attempts;
    double h = ctl.h;
    const double dir = (t_limit >= t) ? 1.0 : -1.0;
    h = dir * std::min(std::abs(h), ctl.h_max);
    bool clipped = false;
    if (std::abs(t_limit - t) < std::abs(h)) {
      h = t_limit - t;
      clipped = true;
    }
    if (std::abs(h) < ctl.h_min) throw StepUnderflow(t, h);

    for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * a21 * k1[i];
    f(t + c2 * h, yt, k2);
    for (std::size_t i = 0; i < n; ++i)
      yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    f(t + c3 * h, yt, k3);
    for (std::size_t i = 0; i < n; ++i)
      yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(t + c4 * h, yt, k4);
    for (std::size_t i = 0; i < n; ++i)
      yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] +
                          a54 * k4[i]);
    f(t + c5 * h, yt, k5);
    for (std::size_t i = 0; i < n; ++i)
      yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                          a64 * k4[i] + a65 * k5[i]);
    f(t + h, yt, k6);
    for (std::size_t i = 0; i < n; ++i)
      y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                          b6 * k6[i]);
    f(t + h, y5, k7);

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ei = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] +
                             d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
      const double sc =
          ctl.abs_tol +
          ctl.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
      err += (ei / sc) * (ei / sc);
    }
    err = std::sqrt(err / static_cast<double>(n));

    // PI controller (order-5 exponents), clipped growth.
    const double safety = 0.9;
    double fac = safety * std::pow(std::max(err, 1e-16), -0.17) *
                 std::pow(ctl.err_prev, 0.04);
    fac = std::clamp(fac, 0.2, 5.0);

    if (err <= 1.0) {
      t = clipped ? t_limit : t + h;  // exact landing on the window edge
      y = y5;
      if (!clipped) ctl.h = h * fac;  // keep the full proposal across edges
      ctl.err_prev = std::max(err, 1e-16);
      out.h_used = h;
      out.error = err;
      return out;
    }
    ctl.h = h * std::min(fac, 0.9);
    if (out.attempts > 64) throw StepUnderflow(t, h);
  }
}

}  // namespace rrlab
