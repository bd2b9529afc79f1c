#include "rrlab/radiation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rrlab {

namespace {

bool finite(const LorentzVector& v) {
  for (int i = 0; i < v.dim; ++i)
    if (!std::isfinite(v[i])) return false;
  return true;
}

bool finite(const RankTwoTensor& t) {
  for (int i = 0; i < t.dim; ++i)
    for (int j = 0; j < t.dim; ++j)
      if (!std::isfinite(t.at(i, j))) return false;
  return true;
}

double norm_of(const LorentzVector& v) { return inf_norm(v); }
double norm_of(const RankTwoTensor& t) { return inf_norm(t); }

// Composite Simpson on the knot grid clipped to [tau0, tau1], one Richardson
// halving per interval. V is LorentzVector or RankTwoTensor.
template <typename V, typename F>
void simpson_over_knots(const Worldline& w, F&& rate, double tau0,
                        double tau1, V& total, double& err) {
  const double span = w.tau_max() - w.tau_min();
  const double slack = 1e-9 * std::max(span, 1.0);
  if (tau0 < w.tau_min() - slack)
    throw HistoryError("accumulate: window starts before history", tau0,
                       false);
  if (tau1 > w.tau_max() + slack)
    throw HistoryError("accumulate: window ends after history", tau1, true);
  tau0 = std::max(tau0, w.tau_min());
  tau1 = std::min(tau1, w.tau_max());
  if (!(tau1 > tau0)) return;

  const auto& pts = w.points();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double ta = std::max(pts[i].tau, tau0);
    const double tb = std::min(pts[i + 1].tau, tau1);
    if (!(tb > ta)) continue;
    const double h = tb - ta;
    const V fa = rate(interpolate(w, ta));
    const V f1 = rate(interpolate(w, ta + 0.25 * h));
    const V fm = rate(interpolate(w, ta + 0.5 * h));
    const V f3 = rate(interpolate(w, ta + 0.75 * h));
    const V fb = rate(interpolate(w, tb));
    const V s1 = (h / 6.0) * (fa + 4.0 * fm + fb);
    const V s2 =
        (h / 12.0) * (fa + 4.0 * f1 + 2.0 * fm + 4.0 * f3 + fb);
    const V diff = s2 - s1;
    if (!finite(s2))
      throw std::runtime_error("accumulate: non-finite rate in quadrature");
    total += s2 + (1.0 / 15.0) * diff;
    err += norm_of(diff) / 15.0;
  }
}

}  // namespace

LorentzVector larmor_rate_4d(const WorldlinePoint& pt, double e) {
  const double a2 = minkowski_dot(pt.a, pt.a);
  return (2.0 / 3.0) * e * e * a2 * pt.u;
}

LorentzVector sixd_rate(const WorldlinePoint& pt, double e) {
  const double a2 = minkowski_dot(pt.a, pt.a);
  const double da2 = minkowski_dot(pt.da, pt.da);
  const double a_da = minkowski_dot(pt.a, pt.da);
  const double e2 = e * e;
  return e2 * ((4.0 / 5.0) * da2 * pt.u - (6.0 / 35.0) * a2 * pt.da +
               (3.0 / 7.0) * (2.0 * a_da) * pt.a + 2.0 * a2 * a2 * pt.u);
}

RankTwoTensor sixd_angular_rate(const WorldlinePoint& pt, double e) {
  const double a2 = minkowski_dot(pt.a, pt.a);
  const double e2 = e * e;
  RankTwoTensor M = wedge(pt.z, sixd_rate(pt, e));
  M += e2 * ((4.0 / 5.0) * wedge(pt.a, pt.da) +
             (64.0 / 35.0) * a2 * wedge(pt.u, pt.a));
  M.antisymmetric = true;
  return M;
}

VectorQuadrature accumulate(
    const Worldline& w,
    const std::function<LorentzVector(const WorldlinePoint&)>& rate,
    double tau0, double tau1) {
  VectorQuadrature q;
  q.value = LorentzVector(w.props().dim);
  simpson_over_knots(w, rate, tau0, tau1, q.value, q.error);
  return q;
}

VectorQuadrature accumulate(
    const Worldline& w,
    const std::function<LorentzVector(const WorldlinePoint&)>& rate) {
  return accumulate(w, rate, w.tau_min(), w.tau_max());
}

TensorQuadrature accumulate_tensor(
    const Worldline& w,
    const std::function<RankTwoTensor(const WorldlinePoint&)>& rate,
    double tau0, double tau1) {
  TensorQuadrature q;
  q.value = RankTwoTensor(w.props().dim, true);
  simpson_over_knots(w, rate, tau0, tau1, q.value, q.error);
  return q;
}

TensorQuadrature accumulate_tensor(
    const Worldline& w,
    const std::function<RankTwoTensor(const WorldlinePoint&)>& rate) {
  return accumulate_tensor(w, rate, w.tau_min(), w.tau_max());
}

LorentzVector mutual_force(const Worldline& wa, const Worldline& wb,
                           double tau_a) {
  const WorldlinePoint pa = interpolate(wa, tau_a);
  const FieldSample fb = (wb.props().dim == 6) ? lw_field_6d(wb, pa.z)
                                               : lw_field_4d(wb, pa.z);
  return wa.props().charge * apply_tensor(fb.f, pa.u);
}

FluxWorkReport interference_flux_check(const Worldline& wa,
                                       const Worldline& wb, double t0,
                                       double t1, double R, int n_theta,
                                       int n_phi, int n_time) {
  if (!(t1 > t0)) throw std::invalid_argument("flux window must be ordered");
  if (n_time < 4) n_time = 4;
  n_time += n_time % 4;  // two nested even Simpson grids

  const auto stress = [&](const LorentzVector& y) {
    return interference_stress_energy(lw_field_4d(wa, y, 0),
                                      lw_field_4d(wb, y, 1));
  };

  FluxWorkReport rep;

  // Instantaneous flux at the time nodes, then Simpson in t with one
  // Richardson halving (the coarse grid reuses every other node).
  const int nn = n_time + 1;
  std::vector<LorentzVector> node(static_cast<std::size_t>(nn),
                                  LorentzVector(4));
  const double ht = (t1 - t0) / n_time;
  int peak = 0;
  for (int i = 0; i < nn; ++i) {
    node[static_cast<std::size_t>(i)] =
        sphere_flux(stress, R, t0 + ht * i, n_theta, n_phi);
    if (inf_norm(node[static_cast<std::size_t>(i)]) >
        inf_norm(node[static_cast<std::size_t>(peak)]))
      peak = i;
  }
  auto simpson = [&](int stride) {
    LorentzVector s(4);
    const double h = ht * stride;
    for (int i = 0; i + 2 * stride < nn; i += 2 * stride) {
      s += (h / 3.0) * (node[static_cast<std::size_t>(i)] +
                        4.0 * node[static_cast<std::size_t>(i + stride)] +
                        node[static_cast<std::size_t>(i + 2 * stride)]);
    }
    return s;
  };
  const LorentzVector fine = simpson(1);
  const LorentzVector coarse = simpson(2);
  rep.flux = fine + (1.0 / 15.0) * (fine - coarse);

  double sphere_err = 0.0;
  sphere_flux(stress, R, t0 + ht * peak, n_theta, n_phi, &sphere_err);
  rep.flux_error =
      inf_norm(fine - coarse) / 15.0 + (t1 - t0) * sphere_err;

  // Mutual work over the same lab window, per particle.
  const Worldline* lines[2] = {&wa, &wb};
  for (int p = 0; p < 2; ++p) {
    const Worldline& self = *lines[p];
    const Worldline& other = *lines[1 - p];
    const double w0 = tau_at_lab_time(self, t0);
    const double w1 = tau_at_lab_time(self, t1);
    const auto force = [&](const WorldlinePoint& pt) {
      const FieldSample f = lw_field_4d(other, pt.z);
      return self.props().charge * apply_tensor(f.f, pt.u);
    };
    const VectorQuadrature q = accumulate(self, force, w0, w1);
    rep.work[static_cast<std::size_t>(p)] = q.value;
    rep.work_error += q.error;
  }
  return rep;
}

DivergenceScan massless_divergence_scan(
    const Worldline& w, double t, const std::vector<double>& theta_min_list,
    int n_s, int n_theta, int n_phi) {
  if (!w.props().massless || w.props().dim != 4)
    throw std::invalid_argument(
        "massless_divergence_scan: massless 4D source required");
  if (t > w.tau_max() || t <= w.tau_min())
    throw HistoryError("massless_divergence_scan: slice outside history", t,
                       t > w.tau_max());

  DivergenceScan scan;
  scan.s0 = w.tau_min();
  scan.s1 = t;

  // Emission-window invariants on the same Gauss-Legendre s-grid.
  std::vector<double> xs, ws;
  gauss_legendre(n_s, xs, ws);
  const double mid = 0.5 * (scan.s0 + scan.s1);
  const double half = 0.5 * (scan.s1 - scan.s0);
  for (int i = 0; i < n_s; ++i) {
    const double s = mid + half * xs[i];
    const WorldlinePoint pt = interpolate(w, s);
    const double a2 = minkowski_dot(pt.a, pt.a);
    const double wt = ws[i] * half;
    scan.a2_integral += wt * a2;
    for (int k = 0; k < 3; ++k)
      scan.a2v_integral[static_cast<std::size_t>(k)] +=
          wt * a2 * pt.u[k + 1] / pt.u[0];
  }
  scan.no_divergence =
      scan.a2_integral <= 1e-18 * std::max(scan.s1 - scan.s0, 1.0);

  // One chart integral per cutoff: s and xi = log(1 - cos theta) get
  // Gauss-Legendre nodes, phi a trapezoid. The integrand per (s, xi, phi)
  // is T^{0 nu} |J| dtheta/dxi.
  const auto pass = [&](double theta_min, int ns, int nt, int np,
                        LorentzVector& out) {
    std::vector<double> sx, sw, tx, tw;
    gauss_legendre(ns, sx, sw);
    gauss_legendre(nt, tx, tw);
    const double xi0 = std::log(1.0 - std::cos(theta_min));
    const double xi1 = std::log(2.0);
    const double tmid = 0.5 * (xi0 + xi1), thalf = 0.5 * (xi1 - xi0);
    const double wphi = 2.0 * std::numbers::pi / np;
    out = LorentzVector(4);
    for (int is = 0; is < ns; ++is) {
      const double s = mid + half * sx[is];
      const WorldlinePoint pt = interpolate(w, s);
      for (int it = 0; it < nt; ++it) {
        const double c = std::exp(tmid + thalf * tx[it]);
        const double theta = std::acos(1.0 - c);
        const double st = std::sin(theta);
        // dtheta = (c / sin theta) dxi
        const double wt = (sw[is] * half) * (tw[it] * thalf) * (c / st) * wphi;
        for (int ip = 0; ip < np; ++ip) {
          const ChartPoint cp = wavefront_chart(w, t, s, theta, wphi * ip);
          RetardedData rd;
          rd.s = s;
          rd.pt = pt;
          rd.r = cp.r;
          rd.k = (1.0 / cp.r) * (cp.y - pt.z);
          rd.a_k = minkowski_dot(pt.a, rd.k);
          const FieldSample f = lw_field_4d_from_retarded(w, cp.y, rd);
          const RankTwoTensor T = stress_energy(f);
          for (int nu = 0; nu < 4; ++nu)
            out[nu] += wt * cp.jacobian * T.at(0, nu);
        }
      }
    }
  };

  for (double theta_min : theta_min_list) {
    if (!(theta_min > 0.0 && theta_min < std::numbers::pi))
      throw std::invalid_argument("theta_min outside (0, pi)");
    DivergenceScanRow row;
    row.theta_min = theta_min;
    LorentzVector fine(4), coarse(4);
    pass(theta_min, n_s, n_theta, n_phi, fine);
    pass(theta_min, n_s / 2, n_theta / 2, std::max(n_phi / 2, 4), coarse);
    row.energy = fine[0];
    for (int k = 0; k < 3; ++k)
      row.momentum[static_cast<std::size_t>(k)] = fine[k + 1];
    row.error = inf_norm(fine - coarse);
    scan.rows.push_back(row);
  }
  return scan;
}

EnergyFit fit_divergence_energy(const DivergenceScan& scan) {
  const auto n = static_cast<Eigen::Index>(scan.rows.size());
  if (n < 2) throw std::invalid_argument("fit needs at least two cutoffs");
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = scan.rows[static_cast<std::size_t>(i)];
    const double c = 1.0 - std::cos(row.theta_min);
    A(i, 0) = 1.0;
    A(i, 1) = 1.0 / (2.0 * c * c);
    b(i) = row.energy;
  }
  const Eigen::Vector2d x = A.colPivHouseholderQr().solve(b);
  return EnergyFit{x(0), x(1)};
}

MomentumFit fit_divergence_momentum(const DivergenceScan& scan, int axis) {
  if (axis < 0 || axis > 2)
    throw std::invalid_argument("momentum axis must be 0, 1 or 2");
  const auto n = static_cast<Eigen::Index>(scan.rows.size());
  if (n < 3) throw std::invalid_argument("fit needs at least three cutoffs");
  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = scan.rows[static_cast<std::size_t>(i)];
    const double c = 1.0 - std::cos(row.theta_min);
    A(i, 0) = 1.0;
    A(i, 1) = 1.0 / c;
    A(i, 2) = 1.0 / (2.0 * c * c);
    b(i) = row.momentum[static_cast<std::size_t>(axis)];
  }
  const Eigen::Vector3d x = A.colPivHouseholderQr().solve(b);
  return MomentumFit{x(0), x(1), x(2)};
}

}  // namespace rrlab
