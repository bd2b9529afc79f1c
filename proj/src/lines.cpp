#include "rrlab/lines.hpp"

#include <cmath>

namespace rrlab {

Worldline make_uniform_line(const ParticleProps& props,
                            const LorentzVector& z0, const LorentzVector& u,
                            double tau0, double tau1, int n) {
  Worldline w(props);
  const double h = (tau1 - tau0) / (n - 1);
  for (int i = 0; i < n; ++i) {
    const double tau = tau0 + i * h;
    WorldlinePoint p;
    p.tau = tau;
    p.z = z0 + tau * u;
    p.u = u;
    p.a = LorentzVector(props.dim);
    p.da = LorentzVector(props.dim);
    p.dda = LorentzVector(props.dim);
    w.add_point(p);
  }
  return w;
}

WorldlinePoint hyperbolic_point(const ParticleProps& props, double g,
                                double z3, double tau) {
  const double sh = std::sinh(g * tau), ch = std::cosh(g * tau);
  WorldlinePoint p;
  p.tau = tau;
  for (auto* v : {&p.z, &p.u, &p.a, &p.da, &p.dda})
    *v = LorentzVector(props.dim);
  p.z[0] = sh / g;
  p.z[3] = (ch - 1.0) / g + z3;
  p.u[0] = ch;
  p.u[3] = sh;
  p.a[0] = g * sh;
  p.a[3] = g * ch;
  p.da[0] = g * g * ch;
  p.da[3] = g * g * sh;
  p.dda[0] = g * g * g * sh;
  p.dda[3] = g * g * g * ch;
  return p;
}

Worldline make_hyperbolic_line(const ParticleProps& props, double g, double z3,
                               double tau0, double tau1, int n) {
  Worldline w(props);
  const double h = (tau1 - tau0) / (n - 1);
  for (int i = 0; i < n; ++i) w.add_point(hyperbolic_point(props, g, z3, tau0 + i * h));
  return w;
}

WorldlinePoint circular_orbit_point(const ParticleProps& props, double R0,
                                    double beta, double tau) {
  const double gamma = 1.0 / std::sqrt(1.0 - beta * beta);
  const double Om = gamma * beta / R0;  // proper-time angular rate
  const double c = std::cos(Om * tau), s = std::sin(Om * tau);
  WorldlinePoint p;
  p.tau = tau;
  for (auto* v : {&p.z, &p.u, &p.a, &p.da, &p.dda})
    *v = LorentzVector(props.dim);
  p.z[0] = gamma * tau;
  p.z[1] = R0 * c;
  p.z[2] = R0 * s;
  p.u[0] = gamma;
  p.u[1] = -R0 * Om * s;
  p.u[2] = R0 * Om * c;
  p.a[1] = -R0 * Om * Om * c;
  p.a[2] = -R0 * Om * Om * s;
  p.da[1] = R0 * Om * Om * Om * s;
  p.da[2] = -R0 * Om * Om * Om * c;
  p.dda[1] = R0 * Om * Om * Om * Om * c;
  p.dda[2] = R0 * Om * Om * Om * Om * s;
  return p;
}

Worldline make_circular_orbit(const ParticleProps& props, double R0,
                              double beta, double tau0, double tau1, int n) {
  Worldline w(props);
  const double h = (tau1 - tau0) / (n - 1);
  for (int i = 0; i < n; ++i)
    w.add_point(circular_orbit_point(props, R0, beta, tau0 + i * h));
  return w;
}

Worldline make_massless_circular(const ParticleProps& props, double rho,
                                 double t0, double t1, int n) {
  ParticleProps pp = props;
  pp.massless = true;
  Worldline w(pp);
  const double om = 1.0 / rho;  // rho * om = 1 keeps u null
  const double h = (t1 - t0) / (n - 1);
  for (int i = 0; i < n; ++i) {
    const double t = t0 + i * h;
    const double c = std::cos(om * t), s = std::sin(om * t);
    WorldlinePoint p;
    p.tau = t;
    for (auto* v : {&p.z, &p.u, &p.a, &p.da, &p.dda})
      *v = LorentzVector(pp.dim);
    p.z[0] = t;
    p.z[1] = rho * c;
    p.z[2] = rho * s;
    p.u[0] = 1.0;
    p.u[1] = -s;
    p.u[2] = c;
    p.a[1] = -om * c;
    p.a[2] = -om * s;
    p.da[1] = om * om * s;
    p.da[2] = -om * om * c;
    p.dda[1] = om * om * om * c;
    p.dda[2] = om * om * om * s;
    w.add_point(p);
  }
  return w;
}

Worldline make_from_lab_profile(const ParticleProps& props,
                                const LabProfile& profile, double t0,
                                double t1, int n) {
  Worldline w(props);
  const double h = (t1 - t0) / (n - 1);

  auto inv_gamma = [&](double t) {
    const auto v = profile.vel(t);
    const double v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    return std::sqrt(1.0 - v2);
  };

  double tau = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = t0 + i * h;
    if (i > 0) {
      // Composite Simpson for the proper-time increment over [t-h, t].
      const int sub = 8;
      const double hs = h / sub;
      double acc = inv_gamma(t - h) + inv_gamma(t);
      for (int j = 1; j < sub; ++j)
        acc += (j % 2 ? 4.0 : 2.0) * inv_gamma(t - h + j * hs);
      tau += acc * hs / 3.0;
    }

    const auto x = profile.pos(t);
    const auto v = profile.vel(t);
    const auto al = profile.acc(t);
    const double v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    const double gamma = 1.0 / std::sqrt(1.0 - v2);
    const double va = v[0] * al[0] + v[1] * al[1] + v[2] * al[2];
    const double gdot = gamma * gamma * gamma * va;

    WorldlinePoint p;
    p.tau = tau;
    for (auto* q : {&p.z, &p.u, &p.a, &p.da, &p.dda})
      *q = LorentzVector(props.dim);
    p.z[0] = t;
    p.u[0] = gamma;
    p.a[0] = gamma * gdot;
    for (int c = 0; c < 3; ++c) {
      p.z[c + 1] = x[c];
      p.u[c + 1] = gamma * v[c];
      p.a[c + 1] = gamma * (gdot * v[c] + gamma * al[c]);
    }
    if (profile.jerk) {
      const auto jl = profile.jerk(t);
      const double a2 = al[0] * al[0] + al[1] * al[1] + al[2] * al[2];
      const double vj = v[0] * jl[0] + v[1] * jl[1] + v[2] * jl[2];
      const double gddot =
          3.0 * gamma * gamma * gdot * va + gamma * gamma * gamma * (a2 + vj);
      // da = gamma d/dt (gamma du/dt) with du/dt = (gdot, gdot v + gamma a).
      p.da[0] = gamma * (gdot * gdot + gamma * gddot);
      for (int c = 0; c < 3; ++c) {
        const double dudt = gdot * v[c] + gamma * al[c];
        const double d2udt2 =
            gddot * v[c] + 2.0 * gdot * al[c] + gamma * jl[c];
        p.da[c + 1] = gamma * (gdot * dudt + gamma * d2udt2);
      }
    }
    w.add_point(p);
  }
  return w;
}

namespace {

// sin^4(pi xi) on [0, 1] and its first three derivatives; identically zero
// outside, with the first three derivatives vanishing at the junctions.
double bounce0(double xi) {
  if (xi <= 0.0 || xi >= 1.0) return 0.0;
  const double s = std::sin(M_PI * xi);
  return s * s * s * s;
}
double bounce1(double xi) {
  if (xi <= 0.0 || xi >= 1.0) return 0.0;
  const double s = std::sin(M_PI * xi), c = std::cos(M_PI * xi);
  return 4.0 * M_PI * s * s * s * c;
}
double bounce2(double xi) {
  if (xi <= 0.0 || xi >= 1.0) return 0.0;
  const double s = std::sin(M_PI * xi), c = std::cos(M_PI * xi);
  return 4.0 * M_PI * M_PI * s * s * (3.0 * c * c - s * s);
}
double bounce3(double xi) {
  if (xi <= 0.0 || xi >= 1.0) return 0.0;
  const double s = std::sin(M_PI * xi), c = std::cos(M_PI * xi);
  return 4.0 * M_PI * M_PI * M_PI * s * c * (6.0 * c * c - 10.0 * s * s);
}

}  // namespace

Worldline make_bounce_line(const ParticleProps& props, double base,
                           double amp, double T, double t0, double t1,
                           int n) {
  LabProfile p;
  p.pos = [=](double t) {
    return std::array<double, 3>{base + amp * bounce0(t / T), 0.0, 0.0};
  };
  p.vel = [=](double t) {
    return std::array<double, 3>{amp * bounce1(t / T) / T, 0.0, 0.0};
  };
  p.acc = [=](double t) {
    return std::array<double, 3>{amp * bounce2(t / T) / (T * T), 0.0, 0.0};
  };
  p.jerk = [=](double t) {
    return std::array<double, 3>{amp * bounce3(t / T) / (T * T * T), 0.0,
                                 0.0};
  };
  return make_from_lab_profile(props, p, t0, t1, n);
}

}  // namespace rrlab
