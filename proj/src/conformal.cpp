#include "rrlab/conformal.hpp"

#include <cmath>

namespace rrlab {

namespace {

double euclid_sq(const LorentzVector& v) {
  double s = 0.0;
  for (int i = 0; i < v.dim; ++i) s += v[i] * v[i];
  return s;
}

// Reflection through the unit hyperboloid direction of x:
// L^b_a = delta - 2 x^b x_a / (x.x). An involution; singular on the cone.
RankTwoTensor reflection_matrix(const LorentzVector& x) {
  const double xx = minkowski_dot(x, x);
  const LorentzVector xl = lowered(x);
  RankTwoTensor m = RankTwoTensor::identity(x.dim);
  for (int i = 0; i < x.dim; ++i)
    for (int j = 0; j < x.dim; ++j) m.at(i, j) -= 2.0 * x[i] * xl[j] / xx;
  return m;
}

void check_regular(double d, const LorentzVector& x, const LorentzVector& b) {
  if (std::abs(d) <= 1e-12 * (1.0 + euclid_sq(x) * euclid_sq(b)))
    throw SingularSurfaceError("special_conformal: singular surface");
}

// Composite Jacobian at x: the b-map Jacobian at the dilated point times
// the dilatation scale.
RankTwoTensor composite_jacobian(const LorentzVector& x,
                                 const ConformalParams& p, double* d_out) {
  const LorentzVector xd = dilate(x, p.theta);
  const ConformalJacobian cj = conformal_jacobian(xd, p.b);
  if (d_out) *d_out = cj.d;
  return std::exp(p.theta) * cj.omega;
}

}  // namespace

LorentzVector dilate(const LorentzVector& x, double theta) {
  return std::exp(theta) * x;
}

double conformal_factor(const LorentzVector& x, const LorentzVector& b) {
  return 1.0 - 2.0 * minkowski_dot(x, b) +
         minkowski_dot(x, x) * minkowski_dot(b, b);
}

LorentzVector special_conformal(const LorentzVector& x,
                                const LorentzVector& b) {
  const double d = conformal_factor(x, b);
  check_regular(d, x, b);
  return (1.0 / d) * (x - minkowski_dot(x, x) * b);
}

ConformalJacobian conformal_jacobian(const LorentzVector& x,
                                     const LorentzVector& b) {
  ConformalJacobian out;
  out.d = conformal_factor(x, b);
  check_regular(out.d, x, b);

  const double xx = minkowski_dot(x, x);
  if (std::abs(xx) > 1e-6 * (1.0 + euclid_sq(x))) {
    // Factorized form: reflect at x, reflect at the inverted-and-shifted
    // point x/(x.x) - b, divide by D. Regular because that second point
    // has squared norm D/(x.x), nonzero away from the singular surface.
    const LorentzVector xi = (1.0 / xx) * x - b;
    out.omega = (1.0 / out.d) *
                matmul(reflection_matrix(xi), reflection_matrix(x));
    return out;
  }

  // Near the cone the reflection factors blow up individually while the
  // map itself stays smooth; differentiate it directly.
  const double step = 1e-6 * (1.0 + inf_norm(x));
  out.omega = RankTwoTensor(x.dim);
  for (int a = 0; a < x.dim; ++a) {
    LorentzVector xp = x, xm = x;
    xp[a] += step;
    xm[a] -= step;
    const LorentzVector fp = special_conformal(xp, b);
    const LorentzVector fm = special_conformal(xm, b);
    for (int mu = 0; mu < x.dim; ++mu)
      out.omega.at(mu, a) = (fp[mu] - fm[mu]) / (2.0 * step);
  }
  return out;
}

LorentzVector conformal_map(const LorentzVector& x,
                            const ConformalParams& p) {
  return special_conformal(dilate(x, p.theta), p.b);
}

RankTwoTensor transform_field(const RankTwoTensor& f, const LorentzVector& x,
                              const ConformalParams& p) {
  if (f.dim != x.dim)
    throw DimensionMismatch("transform_field: tensor/point dims differ");
  double d = 1.0;
  const RankTwoTensor jac = composite_jacobian(x, p, &d);

  // Inverse Jacobian from the conformality identity: J^-1 is, up to the
  // scale factors, the eta-transpose of J itself.
  const double scale = d * d * std::exp(-2.0 * p.theta);
  RankTwoTensor jinv(x.dim);
  for (int i = 0; i < x.dim; ++i)
    for (int j = 0; j < x.dim; ++j) {
      const double sign = ((i == 0) ? -1.0 : 1.0) * ((j == 0) ? -1.0 : 1.0);
      jinv.at(i, j) = scale * sign * jac.at(j, i);
    }

  RankTwoTensor g = matmul(transpose(jinv), matmul(f, jinv));
  RankTwoTensor out(f.dim, true);
  for (int i = 0; i < f.dim; ++i)
    for (int j = i + 1; j < f.dim; ++j) {
      out.at(i, j) = 0.5 * (g.at(i, j) - g.at(j, i));
      out.at(j, i) = -out.at(i, j);
    }
  return out;
}

LorentzVector transform_ray(const LorentzVector& v, const LorentzVector& x,
                            const ConformalParams& p) {
  const RankTwoTensor jac = composite_jacobian(x, p, nullptr);
  LorentzVector w = apply_matrix(jac, v);
  if (std::abs(w[0]) < 1e-12 * std::sqrt(euclid_sq(w)))
    throw SingularSurfaceError("transform_ray: mapped ray loses its clock");
  return (1.0 / w[0]) * w;
}

double multiplier_scale(const LorentzVector& x, const ConformalParams& p) {
  const double d = conformal_factor(dilate(x, p.theta), p.b);
  return d * d * std::exp(-2.0 * p.theta);
}

ConformalAudit audit_massless_invariance(const RankTwoTensor& f,
                                         const LorentzVector& v,
                                         double lambda,
                                         const LorentzVector& x,
                                         const ConformalParams& p) {
  ConformalAudit audit;
  audit.lambda_in = lambda;
  audit.lambda_out = multiplier_scale(x, p) * lambda;

  const RankTwoTensor fp = transform_field(f, x, p);
  const LorentzVector vp = transform_ray(v, x, p);

  const LorentzVector defect =
      apply_tensor(fp, vp) - audit.lambda_out * vp;
  const double vn = std::sqrt(euclid_sq(vp));
  const double fn = inf_norm(fp);
  audit.eigen_residual =
      (fn > 0.0) ? std::sqrt(euclid_sq(defect)) / (fn * vn) : 0.0;
  audit.nullity_residual = std::abs(minkowski_dot(vp, vp)) / (vn * vn);

  double d = 1.0;
  const RankTwoTensor jac = composite_jacobian(x, p, &d);
  const double ex = std::exp(p.theta);
  double worst = 0.0;
  for (int a = 0; a < x.dim; ++a)
    for (int bcol = 0; bcol < x.dim; ++bcol) {
      double s = 0.0;
      for (int mu = 0; mu < x.dim; ++mu) {
        const double eta = (mu == 0) ? -1.0 : 1.0;
        s += eta * jac.at(mu, a) * jac.at(mu, bcol);
      }
      const double eta_ab = (a == bcol) ? ((a == 0) ? -1.0 : 1.0) : 0.0;
      const double want = eta_ab * ex * ex / (d * d);
      worst = std::max(worst, std::abs(s - want));
    }
  audit.conformality_residual = worst * d * d / (ex * ex);
  return audit;
}

}  // namespace rrlab
