#pragma once

// Worldline histories: append-only knot storage with C^2 quintic Hermite
// interpolation, the retarded-time solver, and the wavefront chart used by
// the massless-source integrals.
//
// Knots are (tau, z, u, a, da, dda) with tau strictly increasing. z/u/a feed
// the quintic segment polynomial; da/dda ride along on a cubic Hermite so
// sixth-dimension field evaluation can see the jerk. Integrators that do not
// carry a jerk store zeros there.

#include <stdexcept>
#include <vector>

#include "rrlab/geom.hpp"

namespace rrlab {

struct ParticleProps {
  double mass = 1.0;
  double charge = 1.0;
  double mu6 = 0.0;     // rigidity constant of the 6D particle term
  bool massless = false;
  int dim = 4;
};

struct WorldlinePoint {
  double tau = 0.0;
  LorentzVector z, u, a, da, dda;
};

// Query ran off the stored history; `beyond_end` distinguishes the ends.
struct HistoryError : std::runtime_error {
  double tau;
  bool beyond_end;
  HistoryError(const std::string& what, double tau_, bool beyond_end_)
      : std::runtime_error(what), tau(tau_), beyond_end(beyond_end_) {}
};

// Field point coincides with the source worldline.
struct SingularPointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Worldline {
 public:
  explicit Worldline(ParticleProps props) : props_(props) {
    for (auto* v : {&zero_.z, &zero_.u, &zero_.a, &zero_.da, &zero_.dda})
      *v = LorentzVector(props.dim);
  }

  // tau must exceed the last knot; throws std::logic_error after freeze().
  void add_point(const WorldlinePoint& p);

  // Makes the history immutable; safe to share across readers afterwards.
  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  int size() const { return static_cast<int>(pts_.size()); }
  const WorldlinePoint& point(int i) const {
    return pts_[static_cast<std::size_t>(i)];
  }
  const std::vector<WorldlinePoint>& points() const { return pts_; }
  const ParticleProps& props() const { return props_; }

  double tau_min() const;
  double tau_max() const;

 private:
  ParticleProps props_;
  WorldlinePoint zero_;  // dim-correct template for builders
  std::vector<WorldlinePoint> pts_;
  std::vector<double> taus_;
  bool frozen_ = false;

  friend WorldlinePoint interpolate(const Worldline&, double);
};

// Evaluates the segment polynomials at tau. A query exactly at a knot
// returns the stored state bitwise. Throws HistoryError outside the span.
WorldlinePoint interpolate(const Worldline& w, double tau);

// Retarded light-cone data of field point y relative to source line w:
//   s     retarded parameter, root of (y0 - z0(s)) = |yv - zv(s)|
//   pt    source state at s
//   r     retarded distance -eta(y - z, u), invariant
//   k     null ray (y - z)/r with u.k = -1
//   a_k   a(s).k
// For a massless source, r -> 0 on the forward ray of the line itself;
// there `on_ray` is set and k/a_k are left zero.
struct RetardedData {
  double s = 0.0;
  WorldlinePoint pt;
  double r = 0.0;
  LorentzVector k;
  double a_k = 0.0;
  bool on_ray = false;
};

// Bracketed, safeguarded Newton on the monotone cone condition; converges to
// |g| < 1e-12 * (y0 - z0(s)). Throws HistoryError when the root falls off the
// stored history and SingularPointError when y sits on the line.
RetardedData retarded_data(const Worldline& w, const LorentzVector& y);

// Lab-time lookup: tau with z0(tau) = t. Requires strictly increasing z0.
double tau_at_lab_time(const Worldline& w, double t);

// Retarded chart on the lab slice t around a massless source line:
//   y = z(s) + (t - s) * (1, Omega(s) n(theta, phi)),
// with Omega the spatial rotation taking zhat to the source velocity and
// n the unit vector at polar angle theta from it. theta = 0 is the forward
// ray. Returns the field point, the retarded distance r = (t-s)(1-cos theta)
// and the chart volume factor |J| = (t-s)^2 sin(theta) (1-cos theta) for
// d^3y = |J| ds dtheta dphi.
struct ChartPoint {
  LorentzVector y;
  double s = 0.0, theta = 0.0, phi = 0.0;
  double r = 0.0;
  double jacobian = 0.0;
};

ChartPoint wavefront_chart(const Worldline& w, double t, double s,
                           double theta, double phi);

}  // namespace rrlab
