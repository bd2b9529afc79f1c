#include "rrlab/worldline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rrlab {

void Worldline::add_point(const WorldlinePoint& p) {
  if (frozen_) {
    throw std::logic_error("Worldline::add_point: history is frozen");
  }
  if (p.z.dim != props_.dim || p.u.dim != props_.dim || p.a.dim != props_.dim) {
    throw DimensionMismatch("Worldline::add_point: point dim != line dim");
  }
  if (!pts_.empty() && !(p.tau > pts_.back().tau)) {
    throw std::invalid_argument("Worldline::add_point: tau must increase");
  }
  WorldlinePoint q = p;
  if (q.da.dim != props_.dim) q.da = LorentzVector(props_.dim);
  if (q.dda.dim != props_.dim) q.dda = LorentzVector(props_.dim);
  pts_.push_back(q);
  taus_.push_back(q.tau);
}

double Worldline::tau_min() const {
  if (pts_.empty()) throw std::logic_error("Worldline: empty history");
  return pts_.front().tau;
}

double Worldline::tau_max() const {
  if (pts_.empty()) throw std::logic_error("Worldline: empty history");
  return pts_.back().tau;
}

namespace {

// Quintic Hermite basis on x in [0,1] for boundary data
// (z0, h u0, h^2 a0, z1, h u1, h^2 a1); w = value weights, then first,
// second and third derivative weights with respect to x.
void hermite5_weights(double x, double w[6], double dw[6], double d2w[6],
                      double d3w[6]) {
  const double x2 = x * x, x3 = x2 * x, x4 = x3 * x, x5 = x4 * x;
  w[0] = 1.0 - 10.0 * x3 + 15.0 * x4 - 6.0 * x5;
  w[1] = x - 6.0 * x3 + 8.0 * x4 - 3.0 * x5;
  w[2] = 0.5 * (x2 - 3.0 * x3 + 3.0 * x4 - x5);
  w[3] = 10.0 * x3 - 15.0 * x4 + 6.0 * x5;
  w[4] = -4.0 * x3 + 7.0 * x4 - 3.0 * x5;
  w[5] = 0.5 * (x3 - 2.0 * x4 + x5);

  dw[0] = -30.0 * x2 + 60.0 * x3 - 30.0 * x4;
  dw[1] = 1.0 - 18.0 * x2 + 32.0 * x3 - 15.0 * x4;
  dw[2] = x - 4.5 * x2 + 6.0 * x3 - 2.5 * x4;
  dw[3] = 30.0 * x2 - 60.0 * x3 + 30.0 * x4;
  dw[4] = -12.0 * x2 + 28.0 * x3 - 15.0 * x4;
  dw[5] = 1.5 * x2 - 4.0 * x3 + 2.5 * x4;

  d2w[0] = -60.0 * x + 180.0 * x2 - 120.0 * x3;
  d2w[1] = -36.0 * x + 96.0 * x2 - 60.0 * x3;
  d2w[2] = 1.0 - 9.0 * x + 18.0 * x2 - 10.0 * x3;
  d2w[3] = 60.0 * x - 180.0 * x2 + 120.0 * x3;
  d2w[4] = -24.0 * x + 84.0 * x2 - 60.0 * x3;
  d2w[5] = 3.0 * x - 12.0 * x2 + 10.0 * x3;

  d3w[0] = -60.0 + 360.0 * x - 360.0 * x2;
  d3w[1] = -36.0 + 192.0 * x - 180.0 * x2;
  d3w[2] = -9.0 + 36.0 * x - 30.0 * x2;
  d3w[3] = 60.0 - 360.0 * x + 360.0 * x2;
  d3w[4] = -24.0 + 168.0 * x - 180.0 * x2;
  d3w[5] = 3.0 - 24.0 * x + 30.0 * x2;
}

int segment_index(const std::vector<double>& taus, double tau) {
  // Largest i with taus[i] <= tau, clamped to a valid segment start.
  auto it = std::upper_bound(taus.begin(), taus.end(), tau);
  int i = static_cast<int>(it - taus.begin()) - 1;
  return std::clamp(i, 0, static_cast<int>(taus.size()) - 2);
}

}  // namespace

WorldlinePoint interpolate(const Worldline& w, double tau) {
  const int n = w.size();
  if (n == 0) throw std::logic_error("interpolate: empty worldline");
  if (tau < w.tau_min()) {
    throw HistoryError("interpolate: tau before first stored knot", tau,
                       /*beyond_end=*/false);
  }
  if (tau > w.tau_max()) {
    throw HistoryError("interpolate: tau after last stored knot", tau,
                       /*beyond_end=*/true);
  }
  if (n == 1) return w.point(0);

  const auto& taus = w.taus_;
  const int i = segment_index(taus, tau);
  const WorldlinePoint& p0 = w.point(i);
  const WorldlinePoint& p1 = w.point(i + 1);
  if (tau == p0.tau) return p0;
  if (tau == p1.tau) return p1;

  const double h = p1.tau - p0.tau;
  const double x = (tau - p0.tau) / h;
  double wv[6], dw[6], d2w[6], d3w[6];
  hermite5_weights(x, wv, dw, d2w, d3w);

  const int dim = w.props().dim;
  WorldlinePoint q;
  q.tau = tau;
  q.z = LorentzVector(dim);
  q.u = LorentzVector(dim);
  q.a = LorentzVector(dim);
  q.da = LorentzVector(dim);
  q.dda = LorentzVector(dim);

  for (int c = 0; c < dim; ++c) {
    const double d[6] = {p0.z[c], h * p0.u[c], h * h * p0.a[c],
                         p1.z[c], h * p1.u[c], h * h * p1.a[c]};
    double v = 0, v1 = 0, v2 = 0, v3 = 0;
    for (int j = 0; j < 6; ++j) {
      v += wv[j] * d[j];
      v1 += dw[j] * d[j];
      v2 += d2w[j] * d[j];
      v3 += d3w[j] * d[j];
    }
    q.z[c] = v;
    q.u[c] = v1 / h;
    q.a[c] = v2 / (h * h);
    q.da[c] = v3 / (h * h * h);
  }

  // When the knots carry jerk data, u and a get their own segments.
  // Differentiating the position quintic instead would divide O(|z|)
  // rounding by h^2, a noise floor that poisons dense histories. The a
  // segment is quintic only when genuine dda data exists; a zero dda slot
  // means "not carried", and forcing it as data would inject an O(h^2)
  // curvature error, so a falls back to the (a, da) cubic there.
  const bool have_da = inf_norm(p0.da) != 0.0 || inf_norm(p1.da) != 0.0;
  const bool have_dda =
      inf_norm(p0.dda) != 0.0 || inf_norm(p1.dda) != 0.0;
  if (have_da || have_dda) {
    for (int c = 0; c < dim; ++c) {
      const double du[6] = {p0.u[c], h * p0.a[c], h * h * p0.da[c],
                            p1.u[c], h * p1.a[c], h * h * p1.da[c]};
      double uval = 0;
      for (int j = 0; j < 6; ++j) uval += wv[j] * du[j];
      q.u[c] = uval;
      if (have_dda) {
        const double da[6] = {p0.a[c], h * p0.da[c], h * h * p0.dda[c],
                              p1.a[c], h * p1.da[c], h * h * p1.dda[c]};
        double aval = 0, a1 = 0, a2 = 0;
        for (int j = 0; j < 6; ++j) {
          aval += wv[j] * da[j];
          a1 += dw[j] * da[j];
          a2 += d2w[j] * da[j];
        }
        q.a[c] = aval;
        q.da[c] = a1 / h;
        q.dda[c] = a2 / (h * h);
      } else {
        const double x2 = x * x, x3 = x2 * x;
        const double c0 = 2 * x3 - 3 * x2 + 1, c1 = x3 - 2 * x2 + x;
        const double c2 = -2 * x3 + 3 * x2, c3 = x3 - x2;
        const double g0 = 6 * x2 - 6 * x, g1 = 3 * x2 - 4 * x + 1;
        const double g2 = -g0, g3 = 3 * x2 - 2 * x;
        q.a[c] = c0 * p0.a[c] + c1 * h * p0.da[c] + c2 * p1.a[c] +
                 c3 * h * p1.da[c];
        q.da[c] = (g0 * p0.a[c] + g1 * h * p0.da[c] + g2 * p1.a[c] +
                   g3 * h * p1.da[c]) /
                  h;
        q.dda[c] = ((12 * x - 6) * p0.a[c] + (6 * x - 4) * h * p0.da[c] +
                    (6 - 12 * x) * p1.a[c] + (6 * x - 2) * h * p1.da[c]) /
                   (h * h);
      }
    }
  } else {
    // No jerk knots at all: the same noise-floor argument applies to u, so
    // it gets the (u, a) cubic and a, da its derivatives. Straight segments
    // with constant stored u then interpolate exactly.
    const double x2 = x * x, x3 = x2 * x;
    const double c0 = 2 * x3 - 3 * x2 + 1, c1 = x3 - 2 * x2 + x;
    const double c2 = -2 * x3 + 3 * x2, c3 = x3 - x2;
    const double g0 = 6 * x2 - 6 * x, g1 = 3 * x2 - 4 * x + 1;
    const double g2 = -g0, g3 = 3 * x2 - 2 * x;
    for (int c = 0; c < dim; ++c) {
      q.u[c] =
          c0 * p0.u[c] + c1 * h * p0.a[c] + c2 * p1.u[c] + c3 * h * p1.a[c];
      q.a[c] = (g0 * p0.u[c] + g1 * h * p0.a[c] + g2 * p1.u[c] +
                g3 * h * p1.a[c]) /
               h;
      q.da[c] = ((12 * x - 6) * p0.u[c] + (6 * x - 4) * h * p0.a[c] +
                 (6 - 12 * x) * p1.u[c] + (6 * x - 2) * h * p1.a[c]) /
                (h * h);
      q.dda[c] = 0.0;
    }
  }
  return q;
}

namespace {

double cone_gap(const WorldlinePoint& pt, const LorentzVector& y) {
  double d2 = 0.0;
  for (int i = 1; i < y.dim; ++i) {
    const double dd = y[i] - pt.z[i];
    d2 += dd * dd;
  }
  return (y[0] - pt.z[0]) - std::sqrt(d2);
}

}  // namespace

RetardedData retarded_data(const Worldline& w, const LorentzVector& y) {
  if (y.dim != w.props().dim) {
    throw DimensionMismatch("retarded_data: field point dim != line dim");
  }
  const int n = w.size();
  if (n < 2) throw std::logic_error("retarded_data: need at least two knots");

  // g(s) = (y0 - z0(s)) - |yv - zv(s)| is strictly decreasing for causal
  // lines, so a knot-level binary search brackets the root.
  double g_lo = cone_gap(w.point(0), y);
  double g_hi = cone_gap(w.point(n - 1), y);
  if (g_lo < 0.0) {
    throw HistoryError("retarded_data: retarded point precedes stored history",
                       w.tau_min(), /*beyond_end=*/false);
  }
  if (g_hi > 0.0) {
    throw HistoryError("retarded_data: retarded point beyond stored history",
                       w.tau_max(), /*beyond_end=*/true);
  }

  int ilo = 0, ihi = n - 1;
  while (ihi - ilo > 1) {
    const int mid = (ilo + ihi) / 2;
    if (cone_gap(w.point(mid), y) >= 0.0) {
      ilo = mid;
    } else {
      ihi = mid;
    }
  }

  double lo = w.point(ilo).tau, hi = w.point(ihi).tau;
  g_lo = cone_gap(w.point(ilo), y);
  g_hi = cone_gap(w.point(ihi), y);

  // Safeguarded Newton: secant start, bisection fallback on any step that
  // leaves the bracket or stalls. After the cone tolerance is met, two more
  // Newton polish steps push |g| to the rounding floor so the chart
  // round-trip stays tight even at small polar angles where g' ~ -theta^2/2.
  double s = (g_lo - g_hi) > 0.0 ? lo + (hi - lo) * g_lo / (g_lo - g_hi)
                                 : 0.5 * (lo + hi);
  WorldlinePoint pt;
  int polish = 0;
  for (int iter = 0; iter < 200; ++iter) {
    pt = interpolate(w, s);
    double d2 = 0.0;
    for (int i = 1; i < y.dim; ++i) {
      const double dd = y[i] - pt.z[i];
      d2 += dd * dd;
    }
    const double d = std::sqrt(d2);
    const double g = (y[0] - pt.z[0]) - d;
    const double scale = std::max(y[0] - pt.z[0], d);
    if (scale <= 1e-13 * (1.0 + std::fabs(y[0]))) {
      throw SingularPointError("retarded_data: field point on the worldline");
    }
    const bool within_tol = std::fabs(g) <= 1e-12 * scale;
    if (within_tol && polish >= 2) break;
    if (within_tol) ++polish;

    if (g > 0.0) {
      lo = s;
    } else {
      hi = s;
    }
    double gp = -pt.u[0];
    if (d > 0.0) {
      for (int i = 1; i < y.dim; ++i) gp += (y[i] - pt.z[i]) * pt.u[i] / d;
    }
    double snew = (gp < 0.0) ? s - g / gp : 0.5 * (lo + hi);
    if (within_tol) {
      // Polish steps may sit on the bracket boundary; only reject NaN/escape.
      if (!(snew >= lo) || !(snew <= hi)) break;
    } else if (!(snew > lo) || !(snew < hi)) {
      snew = 0.5 * (lo + hi);
    }
    if (snew == s) break;  // bracket exhausted at machine precision
    s = snew;
  }
  pt = interpolate(w, s);

  RetardedData rd;
  rd.s = s;
  rd.pt = pt;
  LorentzVector rel = y - pt.z;
  rd.r = -minkowski_dot(rel, pt.u);
  rd.k = LorentzVector(y.dim);
  const double dt = y[0] - pt.z[0];
  if (rd.r <= 1e-10 * std::max(dt, 1e-30)) {
    if (!w.props().massless) {
      throw SingularPointError("retarded_data: vanishing retarded distance");
    }
    rd.on_ray = true;
    return rd;
  }
  rd.k = (1.0 / rd.r) * rel;
  rd.a_k = minkowski_dot(rd.pt.a, rd.k);
  return rd;
}

double tau_at_lab_time(const Worldline& w, double t) {
  const int n = w.size();
  if (n == 0) throw std::logic_error("tau_at_lab_time: empty worldline");
  if (t < w.point(0).z[0] || t > w.point(n - 1).z[0]) {
    throw HistoryError("tau_at_lab_time: lab time outside stored history", t,
                       t > w.point(n - 1).z[0]);
  }
  int ilo = 0, ihi = n - 1;
  while (ihi - ilo > 1) {
    const int mid = (ilo + ihi) / 2;
    if (w.point(mid).z[0] <= t) {
      ilo = mid;
    } else {
      ihi = mid;
    }
  }
  double lo = w.point(ilo).tau, hi = w.point(ihi).tau;
  double s = 0.5 * (lo + hi);
  for (int iter = 0; iter < 100; ++iter) {
    const WorldlinePoint pt = interpolate(w, s);
    const double g = pt.z[0] - t;
    if (std::fabs(g) <= 1e-13 * std::max(1.0, std::fabs(t))) return s;
    if (g < 0.0) {
      lo = s;
    } else {
      hi = s;
    }
    double snew = (pt.u[0] > 0.0) ? s - g / pt.u[0] : 0.5 * (lo + hi);
    if (!(snew >= lo) || !(snew <= hi)) snew = 0.5 * (lo + hi);
    if (snew == s) break;
    s = snew;
  }
  return s;
}

ChartPoint wavefront_chart(const Worldline& w, double t, double s,
                           double theta, double phi) {
  if (!w.props().massless) {
    throw std::domain_error("wavefront_chart: source line must be massless");
  }
  if (w.props().dim != 4) {
    throw DimensionMismatch("wavefront_chart: 4D construction");
  }
  if (!(s < t)) {
    throw std::invalid_argument("wavefront_chart: need s < t");
  }
  const WorldlinePoint pt = interpolate(w, s);

  const std::array<double, 3> v = {pt.u[1], pt.u[2], pt.u[3]};
  const RankTwoTensor rot = rotation_to_axis(v);
  LorentzVector nvec{0.0, std::sin(theta) * std::cos(phi),
                     std::sin(theta) * std::sin(phi), std::cos(theta)};
  const LorentzVector m = apply_matrix(rot, nvec);

  ChartPoint cp;
  cp.s = s;
  cp.theta = theta;
  cp.phi = phi;
  cp.y = LorentzVector(4);
  cp.y[0] = t;
  for (int i = 1; i < 4; ++i) cp.y[i] = pt.z[i] + (t - s) * m[i];
  cp.r = (t - s) * (1.0 - std::cos(theta));
  cp.jacobian = (t - s) * (t - s) * std::sin(theta) * (1.0 - std::cos(theta));
  return cp;
}

}  // namespace rrlab
