#pragma once

// Prescribed worldlines with analytic derivatives, used as field sources and
// as closed-form references in tests.

#include <functional>

#include "rrlab/worldline.hpp"

namespace rrlab {

// Straight line z(tau) = z0 + u tau, knots at uniform tau in [tau0, tau1].
Worldline make_uniform_line(const ParticleProps& props,
                            const LorentzVector& z0, const LorentzVector& u,
                            double tau0, double tau1, int n);

// Uniformly accelerated motion along axis 3 with proper acceleration g:
//   z(tau) = (sinh(g tau)/g, 0, 0, (cosh(g tau) - 1)/g + z3).
// a.a = g^2 along the whole line.
Worldline make_hyperbolic_line(const ParticleProps& props, double g, double z3,
                               double tau0, double tau1, int n);
WorldlinePoint hyperbolic_point(const ParticleProps& props, double g,
                                double z3, double tau);

// Massive circular orbit of radius R0 and lab speed beta in the 1-2 plane,
// parametrized by proper time.
Worldline make_circular_orbit(const ParticleProps& props, double R0,
                              double beta, double tau0, double tau1, int n);
WorldlinePoint circular_orbit_point(const ParticleProps& props, double R0,
                                    double beta, double tau);

// Massless circular source in the 1-2 plane, lab-time parametrization,
// radius rho, angular rate omega with rho * omega = 1 so u.u = 0.
Worldline make_massless_circular(const ParticleProps& props, double rho,
                                 double t0, double t1, int n);

// Builds a massive worldline from lab-frame profiles x(t), v(t), dv/dt(t)
// (3-vectors). Knots at uniform lab time; tau accumulated by quadrature of
// dtau = dt/gamma. Stored jerk is left zero unless jerk_lab is supplied.
struct LabProfile {
  std::function<std::array<double, 3>(double)> pos;
  std::function<std::array<double, 3>(double)> vel;
  std::function<std::array<double, 3>(double)> acc;
  std::function<std::array<double, 3>(double)> jerk;  // optional
};

Worldline make_from_lab_profile(const ParticleProps& props,
                                const LabProfile& profile, double t0,
                                double t1, int n);

// Rest-to-rest bounce along axis 1: displacement base + amp sin^4(pi t/T)
// for t in [0, T], exactly at rest outside. C^3 at the junctions, so the
// retarded fields of the line are smooth.
Worldline make_bounce_line(const ParticleProps& props, double base,
                           double amp, double T, double t0, double t1,
                           int n);

}  // namespace rrlab
