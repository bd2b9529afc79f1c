#include "rrlab/dynamics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rrlab {

namespace {

void pack(const LorentzVector& v, std::vector<double>& y, std::size_t& at) {
  for (int i = 0; i < v.dim; ++i) y[at++] = v[i];
}

LorentzVector unpack(const std::vector<double>& y, std::size_t& at, int dim) {
  LorentzVector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = y[at++];
  return v;
}

double euclid(const LorentzVector& v) {
  double s = 0.0;
  for (int i = 0; i < v.dim; ++i) s += v[i] * v[i];
  return std::sqrt(s);
}

// Simpson increment of a worldline-point rate over [tau0, tau1] using the
// freshly appended segment (three-point rule; the segment is one RK step).
LorentzVector segment_integral(
    const Worldline& w, double tau0, double tau1,
    const std::function<LorentzVector(const WorldlinePoint&)>& rate) {
  const double h = tau1 - tau0;
  const LorentzVector fa = rate(interpolate(w, tau0));
  const LorentzVector fm = rate(interpolate(w, 0.5 * (tau0 + tau1)));
  const LorentzVector fb = rate(interpolate(w, tau1));
  return (h / 6.0) * (fa + 4.0 * fm + fb);
}

}  // namespace

LorentzVector particle_momentum_4d(const WorldlinePoint& pt, double e,
                                   double m) {
  return m * pt.u - (2.0 / 3.0) * e * e * pt.a;
}

LorentzVector particle_momentum_6d(const WorldlinePoint& pt, double e,
                                   double m, double mu) {
  const double a2 = minkowski_dot(pt.a, pt.a);
  const double da2dot = 2.0 * minkowski_dot(pt.a, pt.da);
  return m * pt.u + mu * (-pt.da + 1.5 * a2 * pt.u) +
         e * e * ((4.0 / 5.0) * pt.dda - (8.0 / 5.0) * da2dot * pt.u -
                  (64.0 / 35.0) * a2 * pt.a);
}

RankTwoTensor directional_field_derivative(
    const std::function<RankTwoTensor(const LorentzVector&)>& F,
    const LorentzVector& z, const LorentzVector& u, double delta) {
  const RankTwoTensor f1 = F(z - 2.0 * delta * u);
  const RankTwoTensor f2 = F(z - delta * u);
  const RankTwoTensor f3 = F(z + delta * u);
  const RankTwoTensor f4 = F(z + 2.0 * delta * u);
  RankTwoTensor d = (1.0 / (12.0 * delta)) * (f1 - 8.0 * f2 + 8.0 * f3 - f4);
  d.antisymmetric = true;
  return d;
}

LorentzVector landau_lifshitz_accel(
    const std::function<RankTwoTensor(const LorentzVector&)>& F,
    const LorentzVector& z, const LorentzVector& u, double e, double m,
    double delta) {
  const RankTwoTensor f = F(z);
  const LorentzVector a0 = (e / m) * apply_tensor(f, u);
  if (e == 0.0) return a0;
  const RankTwoTensor df = directional_field_derivative(F, z, u, delta);
  const LorentzVector corr = (e / m) * apply_tensor(df, u) +
                             (e / m) * apply_tensor(f, a0) -
                             minkowski_dot(a0, a0) * u;
  return a0 + (2.0 / 3.0) * (e * e / m) * corr;
}

namespace {

// Shared run bookkeeping: append accepted states to the worldline, advance
// the rate and external-force integrals by Simpson on the fresh segment,
// and assemble the balance report.
struct RunAudit {
  const ExternalField* fext;
  double e;
  std::function<LorentzVector(const WorldlinePoint&)> rad_rate;
  std::function<LorentzVector(const WorldlinePoint&)> momentum;
  std::function<double(const WorldlinePoint&)> mass_identity;

  LorentzVector p0;
  LorentzVector rad_acc, fext_acc;
  bool primed = false;

  void prime(const WorldlinePoint& pt, int dim) {
    p0 = momentum(pt);
    rad_acc = LorentzVector(dim);
    fext_acc = LorentzVector(dim);
    primed = true;
  }

  BalanceReport report(const Worldline& w, const WorldlinePoint& pt,
                       double tau_prev, const StepOutcome& step) {
    const auto force = [&](const WorldlinePoint& p) {
      return e * apply_tensor(fext->F(p.z), p.u);
    };
    rad_acc += segment_integral(w, tau_prev, pt.tau, rad_rate);
    fext_acc += segment_integral(w, tau_prev, pt.tau, force);

    BalanceReport rep;
    rep.tau = pt.tau;
    const LorentzVector p = momentum(pt);
    rep.em_residual = (p - p0) + rad_acc - fext_acc;
    RankTwoTensor am(pt.u.dim, true);
    if (pt.u.dim == 4) {
      // u ^ p cancels the bound term: zero when p is assembled consistently.
      am = wedge(pt.u, p);
      am += (2.0 / 3.0) * e * e * wedge(pt.u, pt.a);
    }
    rep.am_residual = am;
    rep.mass_drift = mass_identity(pt);
    rep.velocity_norm_drift = std::abs(minkowski_dot(pt.u, pt.u) + 1.0);
    rep.h = step.h_used;
    rep.step_error = step.error;
    return rep;
  }
};

WorldlinePoint ld4_point(double tau, const std::vector<double>& y,
                         LdMode mode, const ExternalField& fext, double e,
                         double m, double fd_delta) {
  WorldlinePoint pt;
  pt.tau = tau;
  std::size_t at = 0;
  pt.z = unpack(y, at, 4);
  pt.u = unpack(y, at, 4);
  if (mode == LdMode::direct) {
    pt.a = unpack(y, at, 4);
    // Jerk from the equation itself, for quintic-quality interpolation.
    const LorentzVector force = e * apply_tensor(fext.F(pt.z), pt.u);
    pt.da = (3.0 / (2.0 * e * e)) * (m * pt.a - force) +
            minkowski_dot(pt.a, pt.a) * pt.u;
  } else {
    pt.a = landau_lifshitz_accel(fext.F, pt.z, pt.u, e, m, fd_delta);
    pt.da = LorentzVector(4);
  }
  pt.dda = LorentzVector(4);
  return pt;
}

OdeRhs ld4_rhs(LdMode mode, const ExternalField& fext, double e, double m,
               double fd_delta) {
  if (mode == LdMode::direct) {
    return [&fext, e, m](double, const std::vector<double>& y,
                         std::vector<double>& dy) {
      std::size_t at = 0;
      const LorentzVector z = unpack(y, at, 4);
      const LorentzVector u = unpack(y, at, 4);
      const LorentzVector a = unpack(y, at, 4);
      const LorentzVector force = e * apply_tensor(fext.F(z), u);
      const LorentzVector da = (3.0 / (2.0 * e * e)) * (m * a - force) +
                               minkowski_dot(a, a) * u;
      at = 0;
      pack(u, dy, at);
      pack(a, dy, at);
      pack(da, dy, at);
    };
  }
  return [&fext, e, m, fd_delta](double, const std::vector<double>& y,
                                 std::vector<double>& dy) {
    std::size_t at = 0;
    const LorentzVector z = unpack(y, at, 4);
    const LorentzVector u = unpack(y, at, 4);
    const LorentzVector a =
        landau_lifshitz_accel(fext.F, z, u, e, m, fd_delta);
    at = 0;
    pack(u, dy, at);
    pack(a, dy, at);
  };
}

void project_accel(std::vector<double>& y) {
  // a -> a + (a.u) u restores a.u = 0 after the accepted step.
  std::size_t at = 4;
  LorentzVector u = unpack(y, at, 4);
  LorentzVector a = unpack(y, at, 4);
  a += minkowski_dot(a, u) * u;
  at = 8;
  pack(a, y, at);
}

}  // namespace

Ld4State lorentz_dirac_step(const Ld4State& s, double e, double m,
                            const ExternalField& fext, LdMode mode,
                            OdeController& ctl, double fd_delta,
                            BalanceReport* report) {
  if (mode == LdMode::direct && e == 0.0)
    throw std::invalid_argument("direct mode requires nonzero charge");
  const std::size_t n = (mode == LdMode::direct) ? 12 : 8;
  std::vector<double> y(n);
  std::size_t at = 0;
  pack(s.z, y, at);
  pack(s.u, y, at);
  if (mode == LdMode::direct) pack(s.a, y, at);

  ParticleProps props;
  props.charge = e;
  props.mass = m;
  Worldline seg(props);
  seg.add_point(ld4_point(s.tau, y, mode, fext, e, m, fd_delta));

  const OdeRhs rhs = ld4_rhs(mode, fext, e, m, fd_delta);
  double tau = s.tau;
  const StepOutcome out =
      dp54_step(rhs, tau, y, ctl, tau + 10.0 * ctl.h_max);
  if (mode == LdMode::direct) project_accel(y);

  const WorldlinePoint pt = ld4_point(tau, y, mode, fext, e, m, fd_delta);
  if (report) {
    seg.add_point(pt);
    RunAudit audit;
    audit.fext = &fext;
    audit.e = e;
    audit.rad_rate = [e](const WorldlinePoint& p) {
      return larmor_rate_4d(p, e);
    };
    audit.momentum = [e, m](const WorldlinePoint& p) {
      return particle_momentum_4d(p, e, m);
    };
    audit.mass_identity = [e, m](const WorldlinePoint& p) {
      return std::abs(
          minkowski_dot(particle_momentum_4d(p, e, m), p.u) + m);
    };
    audit.prime(seg.point(0), 4);
    *report = audit.report(seg, pt, s.tau, out);
  }

  Ld4State next;
  next.tau = tau;
  next.z = pt.z;
  next.u = pt.u;
  next.a = pt.a;
  return next;
}

RunResult run_lorentz_dirac(const ParticleProps& props,
                            const LorentzVector& z0, const LorentzVector& u0,
                            const LorentzVector& a0, const ExternalField& fext,
                            LdMode mode, double tau_end,
                            const IntegratorSettings& st) {
  const double e = props.charge, m = props.mass;
  if (mode == LdMode::direct && e == 0.0)
    throw std::invalid_argument("direct mode requires nonzero charge");

  RunResult res{Worldline(props), {}, LorentzVector(4), LorentzVector(4)};
  const std::size_t n = (mode == LdMode::direct) ? 12 : 8;
  std::vector<double> y(n);
  std::size_t at = 0;
  pack(z0, y, at);
  pack(u0, y, at);
  if (mode == LdMode::direct) pack(a0, y, at);

  OdeController ctl;
  ctl.rel_tol = st.rel_tol;
  ctl.abs_tol = st.abs_tol;
  ctl.h = st.h_init;
  ctl.h_min = st.h_min;
  ctl.h_max = st.h_max;

  RunAudit audit;
  audit.fext = &fext;
  audit.e = e;
  audit.rad_rate = [e](const WorldlinePoint& p) {
    return larmor_rate_4d(p, e);
  };
  audit.momentum = [e, m](const WorldlinePoint& p) {
    return particle_momentum_4d(p, e, m);
  };
  audit.mass_identity = [e, m](const WorldlinePoint& p) {
    return std::abs(minkowski_dot(particle_momentum_4d(p, e, m), p.u) + m);
  };

  const OdeRhs rhs = ld4_rhs(mode, fext, e, m, st.fd_delta);
  double tau = 0.0;
  WorldlinePoint pt = ld4_point(tau, y, mode, fext, e, m, st.fd_delta);
  res.line.add_point(pt);
  audit.prime(pt, 4);

  while (tau < tau_end) {
    const double tau_prev = tau;
    StepOutcome out;
    try {
      out = dp54_step(rhs, tau, y, ctl, tau_end);
    } catch (const StepUnderflow& uf) {
      res.underflow = true;
      res.underflow_tau = uf.t;
      break;
    }
    if (mode == LdMode::direct) project_accel(y);
    pt = ld4_point(tau, y, mode, fext, e, m, st.fd_delta);
    res.line.add_point(pt);
    res.reports.push_back(audit.report(res.line, pt, tau_prev, out));
  }
  res.p_rad = audit.rad_acc;
  res.f_ext_integral = audit.fext_acc;
  res.line.freeze();
  return res;
}

namespace {

// Extended 6D right-hand side. Chain length depends on the branch:
//   e != 0:          (z, u, a, da, dda), solve for d(dda)
//   e == 0, mu != 0: (z, u, a, da),      solve for d(da)
//   e == 0, mu == 0: (z, u),             m a = F_ext
int sixd_chain(double e, double mu) {
  if (e != 0.0) return 5;
  return (mu != 0.0) ? 4 : 2;
}

OdeRhs sixd_rhs(const ExternalField& fext, double e, double m, double mu) {
  const int chain = sixd_chain(e, mu);
  return [&fext, e, m, mu, chain](double, const std::vector<double>& y,
                                  std::vector<double>& dy) {
    std::size_t at = 0;
    const LorentzVector z = unpack(y, at, 6);
    const LorentzVector u = unpack(y, at, 6);
    if (chain == 2) {
      const LorentzVector a =
          (1.0 / m) * (e * apply_tensor(fext.F(z), u));
      at = 0;
      pack(u, dy, at);
      pack(a, dy, at);
      return;
    }
    const LorentzVector a = unpack(y, at, 6);
    const LorentzVector da = unpack(y, at, 6);
    const LorentzVector force = e * apply_tensor(fext.F(z), u);
    const double a2 = minkowski_dot(a, a);
    const double a_da = minkowski_dot(a, da);
    if (chain == 4) {
      // Rigid branch: m a + mu(-dda + 3(a.da) u + (3/2) a^2 a) = F_ext.
      const LorentzVector dda = (1.0 / mu) * (m * a - force) +
                                3.0 * a_da * u + 1.5 * a2 * a;
      at = 0;
      pack(u, dy, at);
      pack(a, dy, at);
      pack(da, dy, at);
      pack(dda, dy, at);
      return;
    }
    const LorentzVector dda = unpack(y, at, 6);
    // Full branch: differentiate the particle momentum, add the radiated
    // rate, equate to the external force, solve for d(dda).
    const double da2 = minkowski_dot(da, da);
    const double a_dda = minkowski_dot(a, dda);
    const double e2 = e * e;
    WorldlinePoint pt;
    pt.u = u;
    pt.a = a;
    pt.da = da;
    const LorentzVector rate = sixd_rate(pt, e);
    const LorentzVector rest =
        m * a + mu * (-dda + 3.0 * a_da * u + 1.5 * a2 * a) +
        e2 * (-(8.0 / 5.0) * (2.0 * a_da) * a -
              (8.0 / 5.0) * (2.0 * da2 + 2.0 * a_dda) * u -
              (64.0 / 35.0) * (2.0 * a_da * a + a2 * da));
    const LorentzVector ddda =
        (5.0 / (4.0 * e2)) * (force - rate - rest);
    at = 0;
    pack(u, dy, at);
    pack(a, dy, at);
    pack(da, dy, at);
    pack(dda, dy, at);
    pack(ddda, dy, at);
  };
}

WorldlinePoint sixd_point(double tau, const std::vector<double>& y,
                          int chain) {
  WorldlinePoint pt;
  pt.tau = tau;
  std::size_t at = 0;
  pt.z = unpack(y, at, 6);
  pt.u = unpack(y, at, 6);
  pt.a = (chain >= 3) ? unpack(y, at, 6) : LorentzVector(6);
  pt.da = (chain >= 4) ? unpack(y, at, 6) : LorentzVector(6);
  pt.dda = (chain >= 5) ? unpack(y, at, 6) : LorentzVector(6);
  return pt;
}

}  // namespace

RunResult run_sixd(const ParticleProps& props, const WorldlinePoint& init,
                   const ExternalField& fext, double tau_end,
                   const IntegratorSettings& st) {
  const double e = props.charge, m = props.mass, mu = props.mu6;
  const int chain = sixd_chain(e, mu);
  RunResult res{Worldline(props), {}, LorentzVector(6), LorentzVector(6)};

  std::vector<double> y(static_cast<std::size_t>(6 * chain));
  std::size_t at = 0;
  pack(init.z, y, at);
  pack(init.u, y, at);
  if (chain >= 3) pack(init.a, y, at);
  if (chain >= 4) pack(init.da, y, at);
  if (chain >= 5) pack(init.dda, y, at);

  OdeController ctl;
  ctl.rel_tol = st.rel_tol;
  ctl.abs_tol = st.abs_tol;
  ctl.h = st.h_init;
  ctl.h_min = st.h_min;
  ctl.h_max = st.h_max;

  RunAudit audit;
  audit.fext = &fext;
  audit.e = e;
  audit.rad_rate = [e](const WorldlinePoint& p) { return sixd_rate(p, e); };
  audit.momentum = [e, m, mu](const WorldlinePoint& p) {
    return particle_momentum_6d(p, e, m, mu);
  };
  // Assembly identity: p.u = -m - (mu/2) a.a + (4/5) e^2 (a.da) given the
  // orthogonality chain; deviation measures constraint drift.
  audit.mass_identity = [e, m, mu](const WorldlinePoint& p) {
    const double want = -m - 0.5 * mu * minkowski_dot(p.a, p.a) +
                        (4.0 / 5.0) * e * e * minkowski_dot(p.a, p.da);
    return std::abs(minkowski_dot(particle_momentum_6d(p, e, m, mu), p.u) -
                    want);
  };

  const OdeRhs rhs = sixd_rhs(fext, e, m, mu);
  double tau = init.tau;
  WorldlinePoint pt = sixd_point(tau, y, chain);
  res.line.add_point(pt);
  audit.prime(pt, 6);

  while (tau < tau_end) {
    const double tau_prev = tau;
    StepOutcome out;
    try {
      out = dp54_step(rhs, tau, y, ctl, tau_end);
    } catch (const StepUnderflow& uf) {
      res.underflow = true;
      res.underflow_tau = uf.t;
      break;
    }
    pt = sixd_point(tau, y, chain);
    res.line.add_point(pt);
    res.reports.push_back(audit.report(res.line, pt, tau_prev, out));
  }
  res.p_rad = audit.rad_acc;
  res.f_ext_integral = audit.fext_acc;
  res.line.freeze();
  return res;
}

RunawayVerdict detect_runaway(const Worldline& w, double accel_floor,
                              double accel_ceil) {
  RunawayVerdict v;
  std::vector<std::pair<double, double>> norms;
  for (const auto& p : w.points()) {
    const double a2 = minkowski_dot(p.a, p.a);
    if (a2 <= 0.0) continue;
    norms.emplace_back(p.tau, std::sqrt(a2));
  }
  if (accel_floor <= 0.0 || accel_ceil <= 0.0) {
    // Adaptive band over the growth segment only: a runaway that exhausts
    // double precision collapses into a post-peak coast of rounding-level
    // accelerations, so everything after the peak is cut before fitting.
    // Then a decade is trimmed off each end of the observed range so the
    // fit sees neither the seed transient nor the blow-up knee. Less than
    // six e-folds of total growth is a driven scale, not a runaway.
    std::size_t peak = 0;
    for (std::size_t i = 1; i < norms.size(); ++i)
      if (norms[i].second > norms[peak].second) peak = i;
    if (!norms.empty()) norms.resize(peak + 1);
    double amin = 0.0, amax = 0.0;
    for (const auto& [tau, an] : norms) {
      if (amin == 0.0 || an < amin) amin = an;
      if (an > amax) amax = an;
    }
    if (amin <= 0.0 || amax < amin * std::exp(6.0)) return v;
    accel_floor = amin * 10.0;
    accel_ceil = amax / 10.0;
  }
  std::vector<std::pair<double, double>> pts;
  for (const auto& [tau, an] : norms) {
    if (an < accel_floor || an > accel_ceil) continue;
    pts.emplace_back(tau, std::log(an));
  }
  v.points = static_cast<int>(pts.size());
  if (pts.size() < 8) return v;
  v.tau0 = pts.front().first;
  v.tau1 = pts.back().first;

  // Least squares weighted by proper-time coverage: an adaptive-step trace
  // piles knots up where the step shrinks, and per-knot weights would let
  // that density skew the slope.
  auto weight = [&](std::size_t i) {
    const double lo = i > 0 ? pts[i - 1].first : pts[i].first;
    const double hi = i + 1 < pts.size() ? pts[i + 1].first : pts[i].first;
    return 0.5 * (hi - lo);
  };
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& [x, yv] = pts[i];
    const double wt = weight(i);
    sw += wt;
    sx += wt * x;
    sy += wt * yv;
    sxx += wt * x * x;
    sxy += wt * x * yv;
  }
  const double denom = sw * sxx - sx * sx;
  if (!(denom > 0.0)) return v;
  v.efold_rate = (sw * sxy - sx * sy) / denom;

  // Runaway means clean exponential growth: positive slope and small
  // scatter around the fitted line relative to the window's log range.
  const double intercept = (sy - v.efold_rate * sx) / sw;
  double rss = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& [x, yv] = pts[i];
    const double r = yv - (intercept + v.efold_rate * x);
    rss += weight(i) * r * r;
  }
  const double range = std::log(accel_ceil / accel_floor);
  v.runaway = v.efold_rate > 0.0 && std::sqrt(rss / sw) < 0.05 * range;
  return v;
}

NullEigenReport find_null_eigenvectors(const RankTwoTensor& F, double tol) {
  if (F.dim != 4)
    throw DimensionMismatch("find_null_eigenvectors: 4D tensor required");
  NullEigenReport rep;
  const double scale = inf_norm(F);
  if (scale <= 1e-300) {
    rep.degenerate = true;
    return rep;
  }

  const RankTwoTensor mixed = mixed_from_lower(F);
  Eigen::Matrix4d M;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) M(i, j) = mixed.at(i, j);

  Eigen::EigenSolver<Eigen::Matrix4d> es(M);
  if (es.info() != Eigen::Success) return rep;

  // Cluster distinct real eigenvalues.
  std::vector<double> lambdas;
  for (int i = 0; i < 4; ++i) {
    const auto ev = es.eigenvalues()(i);
    if (std::abs(ev.imag()) > tol * scale) continue;
    const double l = ev.real();
    bool seen = false;
    for (double l0 : lambdas)
      if (std::abs(l - l0) <= tol * scale * 10.0) seen = true;
    if (!seen) lambdas.push_back(l);
  }

  const auto push_ray = [&](double lambda, Eigen::Vector4d v) {
    if (std::abs(v(0)) < 1e-9 * v.norm()) return;
    v /= v(0);
    LorentzVector lv{v(0), v(1), v(2), v(3)};
    // Verify: eigenvector residual and null norm.
    LorentzVector rv = apply_tensor(F, lv) - lambda * lv;
    if (euclid(rv) > 1e-6 * scale * euclid(lv)) return;
    if (std::abs(minkowski_dot(lv, lv)) > 1e-7 * euclid(lv) * euclid(lv))
      return;
    for (const auto& p : rep.pairs)
      if (std::abs(p.lambda - lambda) <= tol * scale * 100.0 &&
          inf_norm(p.v - lv) < 1e-5)
        return;
    rep.pairs.push_back({lambda, lv});
  };

  for (double lambda : lambdas) {
    // Kernel of (M - lambda I) by SVD.
    Eigen::Matrix4d A = M - lambda * Eigen::Matrix4d::Identity();
    Eigen::JacobiSVD<Eigen::Matrix4d> svd(A, Eigen::ComputeFullV);
    std::vector<Eigen::Vector4d> kernel;
    for (int i = 0; i < 4; ++i)
      if (svd.singularValues()(i) <= 1e-7 * scale)
        kernel.push_back(svd.matrixV().col(i));
    if (kernel.empty()) continue;

    if (kernel.size() == 1) {
      push_ray(lambda, kernel[0]);
      continue;
    }
    // Null rays inside a 2-plane: alpha^2 (p.p) + 2 alpha beta (p.q)
    // + beta^2 (q.q) = 0 with Minkowski dots.
    const Eigen::Vector4d p = kernel[0], q = kernel[1];
    const auto mdot = [](const Eigen::Vector4d& x, const Eigen::Vector4d& y) {
      return -x(0) * y(0) + x(1) * y(1) + x(2) * y(2) + x(3) * y(3);
    };
    const double pp = mdot(p, p), pq = mdot(p, q), qq = mdot(q, q);
    const double s2 = pp * pp + pq * pq + qq * qq;
    if (std::abs(pp) <= 1e-9 * std::sqrt(s2)) {
      push_ray(lambda, p);
      if (std::abs(pq) > 1e-9 * std::sqrt(s2))
        push_ray(lambda, -qq / (2.0 * pq) * p + q);
      else if (std::abs(qq) <= 1e-9 * std::sqrt(s2))
        push_ray(lambda, q);
    } else {
      const double disc = pq * pq - pp * qq;
      if (disc >= 0.0) {
        const double root = std::sqrt(disc);
        push_ray(lambda, ((-pq + root) / pp) * p + q);
        push_ray(lambda, ((-pq - root) / pp) * p + q);
      }
    }
  }

  std::sort(rep.pairs.begin(), rep.pairs.end(),
            [](const NullEigenPair& a, const NullEigenPair& b) {
              return a.lambda > b.lambda;
            });
  return rep;
}

namespace {

// Least-squares eigenvalue of u under F (Euclidean), with the scaled
// alignment residual.
void admissibility(const RankTwoTensor& F, const LorentzVector& u,
                   double& lambda, double& residual) {
  const LorentzVector fu = apply_tensor(F, u);
  double uu = 0.0, fu_u = 0.0;
  for (int i = 0; i < 4; ++i) {
    uu += u[i] * u[i];
    fu_u += fu[i] * u[i];
  }
  lambda = fu_u / uu;
  const double scale = inf_norm(F);
  if (scale <= 1e-300) {
    lambda = 0.0;
    residual = 0.0;
    return;
  }
  LorentzVector r = fu - lambda * u;
  double rn = 0.0, un = 0.0;
  for (int i = 0; i < 4; ++i) {
    rn += r[i] * r[i];
    un += u[i] * u[i];
  }
  residual = std::sqrt(rn) / (scale * std::sqrt(un));
}

}  // namespace

MasslessStepResult massless_step(const MasslessState& s, double q,
                                 const ExternalField& fext, double h,
                                 double eig_tol) {
  MasslessStepResult out;
  out.state = s;

  double lam0 = 0.0, res0 = 0.0;
  admissibility(fext.F(s.z), s.u, lam0, res0);
  out.lambda = lam0;
  out.residual = res0;
  if (res0 > eig_tol) return out;

  // The ray is held; the multiplier integrates q lambda along it, with the
  // mid and end points admissibility-checked too.
  const LorentzVector zm = s.z + (0.5 * h) * s.u;
  const LorentzVector z1 = s.z + h * s.u;
  double lam_m = 0.0, res_m = 0.0, lam1 = 0.0, res1 = 0.0;
  admissibility(fext.F(zm), s.u, lam_m, res_m);
  admissibility(fext.F(z1), s.u, lam1, res1);
  if (res_m > eig_tol || res1 > eig_tol) {
    out.residual = std::max(res_m, res1);
    return out;
  }

  out.admissible = true;
  out.state.t = s.t + h;
  out.state.z = z1;
  out.state.e = s.e + q * (h / 6.0) * (lam0 + 4.0 * lam_m + lam1);
  return out;
}

TwoChargeRun::TwoChargeRun(const std::array<ParticleProps, 2>& props,
                           const std::array<LorentzVector, 2>& z0,
                           const std::array<LorentzVector, 2>& u0,
                           const TwoChargeSettings& st)
    : props_(props),
      st_(st),
      lines_{Worldline(props[0]), Worldline(props[1])},
      tau_{0.0, 0.0},
      z_(z0),
      u_(u0),
      larmor_acc_{LorentzVector(4), LorentzVector(4)},
      work_acc_{LorentzVector(4), LorentzVector(4)} {
  t_ = z0[0][0];
  if (z0[1][0] != t_)
    throw std::invalid_argument("two-charge start must share a lab time");

  // Inertial pre-history so retarded roots exist from the first step. Both
  // histories must be in place before either initial acceleration reads
  // the partner's field.
  for (int i = 0; i < 2; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const double u0t = u_[ii][0];
    const int n_pre = std::max(
        8, static_cast<int>(st_.pre_history_span / (20.0 * st_.dt)));
    const double dtau_pre = st_.pre_history_span / (u0t * n_pre);
    for (int k = n_pre; k >= 1; --k) {
      WorldlinePoint p;
      p.tau = tau_[ii] - k * dtau_pre;
      p.z = z_[ii] - (k * dtau_pre) * u_[ii];
      p.u = u_[ii];
      lines_[ii].add_point(p);
    }
  }
  const std::array<LorentzVector, 2> a0 = {accel(0, z_[0], u_[0]),
                                           accel(1, z_[1], u_[1])};
  for (int i = 0; i < 2; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    WorldlinePoint p;
    p.tau = tau_[ii];
    p.z = z_[ii];
    p.u = u_[ii];
    p.a = a0[ii];
    lines_[ii].add_point(p);
  }
}

LorentzVector TwoChargeRun::accel(int i, const LorentzVector& z,
                                  const LorentzVector& u) const {
  const auto ii = static_cast<std::size_t>(i);
  const Worldline& other = lines_[static_cast<std::size_t>(1 - i)];
  const auto field = [&](const LorentzVector& y) {
    return lw_field_4d(other, y).f;
  };
  const double e = props_[ii].charge, m = props_[ii].mass;
  if (e == 0.0) return LorentzVector(4);
  if (!st_.with_mutual_reaction) {
    return (e / m) * apply_tensor(field(z), u);
  }
  return landau_lifshitz_accel(field, z, u, e, m, st_.fd_delta);
}

std::array<BalanceReport, 2> TwoChargeRun::step() {
  // Classical RK4 in lab time on (zvec, u, tau) per particle; the mutual
  // histories stay frozen during the stages (retardation exceeds dt).
  struct Stage {
    LorentzVector z, u;
    double tau;
  };
  std::array<Stage, 2> next;
  const double dt = st_.dt;

  for (int i = 0; i < 2; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const LorentzVector z0 = z_[ii];
    const LorentzVector u0 = u_[ii];

    // dz/dt = u/u0, du/dt = a/u0, dtau/dt = 1/u0.
    const auto deriv = [&](const LorentzVector& z, const LorentzVector& u,
                           LorentzVector& dz, LorentzVector& du,
                           double& dtau) {
      const LorentzVector a = accel(i, z, u);
      dz = (1.0 / u[0]) * u;
      du = (1.0 / u[0]) * a;
      dtau = 1.0 / u[0];
    };
    LorentzVector k1z(4), k1u(4), k2z(4), k2u(4), k3z(4), k3u(4), k4z(4),
        k4u(4);
    double k1t = 0, k2t = 0, k3t = 0, k4t = 0;
    deriv(z0, u0, k1z, k1u, k1t);
    deriv(z0 + (0.5 * dt) * k1z, u0 + (0.5 * dt) * k1u, k2z, k2u, k2t);
    deriv(z0 + (0.5 * dt) * k2z, u0 + (0.5 * dt) * k2u, k3z, k3u, k3t);
    deriv(z0 + dt * k3z, u0 + dt * k3u, k4z, k4u, k4t);

    next[ii].z = z0 + (dt / 6.0) * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
    next[ii].u = u0 + (dt / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    next[ii].tau = tau_[ii] + (dt / 6.0) * (k1t + 2.0 * k2t + 2.0 * k3t + k4t);
    next[ii].z[0] = z0[0] + dt;  // lab time advances exactly
  }

  std::array<BalanceReport, 2> reps;
  std::array<double, 2> tau_prev = tau_;
  std::array<LorentzVector, 2> p_prev = {
      particle_momentum_4d(lines_[0].points().back(), props_[0].charge,
                           props_[0].mass),
      particle_momentum_4d(lines_[1].points().back(), props_[1].charge,
                           props_[1].mass)};

  for (int i = 0; i < 2; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    z_[ii] = next[ii].z;
    u_[ii] = next[ii].u;
    tau_[ii] = next[ii].tau;
  }
  t_ += dt;

  // Append both knots before integrating the step windows so the mutual
  // force at the midpoint can see the updated histories.
  for (int i = 0; i < 2; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    WorldlinePoint p;
    p.tau = tau_[ii];
    p.z = z_[ii];
    p.u = u_[ii];
    p.a = accel(i, z_[ii], u_[ii]);
    lines_[ii].add_point(p);
  }

  for (int i = 0; i < 2; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const double e = props_[ii].charge, m = props_[ii].mass;
    const Worldline& self = lines_[ii];
    const Worldline& other = lines_[static_cast<std::size_t>(1 - i)];

    const auto larmor = [&](const WorldlinePoint& p) {
      return larmor_rate_4d(p, e);
    };
    const auto work = [&](const WorldlinePoint& p) {
      return e * apply_tensor(lw_field_4d(other, p.z).f, p.u);
    };
    larmor_acc_[ii] += segment_integral(self, tau_prev[ii], tau_[ii], larmor);
    work_acc_[ii] += segment_integral(self, tau_prev[ii], tau_[ii], work);

    const WorldlinePoint& pt = self.points().back();
    BalanceReport rep;
    rep.tau = pt.tau;
    const LorentzVector p_now = particle_momentum_4d(pt, e, m);
    // Differential form per lab step: dp + Larmor - work over the window.
    rep.em_residual = (p_now - p_prev[ii]) +
                      segment_integral(self, tau_prev[ii], tau_[ii], larmor) -
                      segment_integral(self, tau_prev[ii], tau_[ii], work);
    rep.am_residual = wedge(pt.u, p_now);
    rep.am_residual += (2.0 / 3.0) * e * e * wedge(pt.u, pt.a);
    rep.mass_drift = std::abs(minkowski_dot(p_now, pt.u) + m);
    rep.velocity_norm_drift = std::abs(minkowski_dot(pt.u, pt.u) + 1.0);
    rep.h = st_.dt;
    reps[ii] = rep;
  }
  return reps;
}

void TwoChargeRun::advance_to(double t_lab) {
  while (t_ + 0.5 * st_.dt < t_lab) step();
}

LorentzVector TwoChargeRun::conserved_total() const {
  LorentzVector total(4);
  for (int i = 0; i < 2; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    total += particle_momentum_4d(lines_[ii].points().back(),
                                  props_[ii].charge, props_[ii].mass);
    total += larmor_acc_[ii];
    total -= work_acc_[ii];
  }
  return total;
}

}  // namespace rrlab
