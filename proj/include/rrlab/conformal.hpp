#pragma once

// Dilatations and special conformal maps of Minkowski space, their
// Jacobians, and the pull-back of field tensors and massless eigenstates.
// These close the symmetry group of the massless-charge sector; the audit
// at the bottom verifies that invariance numerically.

#include <stdexcept>

#include "rrlab/geom.hpp"

namespace rrlab {

// Composite transformation: scale by e^theta first, then the b-map.
struct ConformalParams {
  double theta = 0.0;
  LorentzVector b;
};

// Point sits on (or too close to) the surface where the b-map blows up,
// or the mapped ray degenerates.
struct SingularSurfaceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

LorentzVector dilate(const LorentzVector& x, double theta);

// D(x) = 1 - 2(x.b) + (x.x)(b.b); the map is singular where it vanishes.
double conformal_factor(const LorentzVector& x, const LorentzVector& b);

// x' = (x - b (x.x)) / D. Inverse is the same map with -b.
// Throws SingularSurfaceError near D = 0.
LorentzVector special_conformal(const LorentzVector& x,
                                const LorentzVector& b);

struct ConformalJacobian {
  RankTwoTensor omega;  // mixed matrix, apply_matrix semantics
  double d = 1.0;
};

// Jacobian of the b-map at x. Off the light cone it factorizes through the
// inversion reflections; near the cone the factors blow up individually
// and the Jacobian falls back to finite differences of the regular map.
// Satisfies Omega^T eta Omega = D^-2 eta.
ConformalJacobian conformal_jacobian(const LorentzVector& x,
                                     const LorentzVector& b);

// Composite point map: dilate, then the b-map.
LorentzVector conformal_map(const LorentzVector& x, const ConformalParams& p);

// Pull-back of an all-lower field tensor to the mapped frame: the returned
// tensor is the field at conformal_map(x) such that contracting it with
// two transformed directions reproduces the original contraction pattern.
// Antisymmetry is restored exactly after the matrix products.
RankTwoTensor transform_field(const RankTwoTensor& f, const LorentzVector& x,
                              const ConformalParams& p);

// Pushes a ray direction through the composite Jacobian and renormalizes
// to v0 = 1; the dropped scale is absorbed by the charge multiplier.
LorentzVector transform_ray(const LorentzVector& v, const LorentzVector& x,
                            const ConformalParams& p);

// Scale picked up by the charge multiplier and by eigenvalues of the mixed
// field tensor under the composite map: D^2 e^{-2 theta}.
double multiplier_scale(const LorentzVector& x, const ConformalParams& p);

// Pointwise invariance audit of the massless effective law. Input is an
// admissible state at x: an all-lower field f whose mixed form has the
// real null eigenvector v with eigenvalue lambda. The transformed triple
// must satisfy the same eigenrelation with lambda scaled by
// multiplier_scale; residuals are rounding-level when it does.
struct ConformalAudit {
  double lambda_in = 0.0;
  double lambda_out = 0.0;          // multiplier_scale * lambda_in
  double eigen_residual = 0.0;      // |F'v' - lambda' v'| / (|F'| |v'|)
  double nullity_residual = 0.0;    // |v'.v'| / |v'|^2, Euclidean norm
  double conformality_residual = 0.0;  // |Omega^T eta Omega - D^-2 eta| D^2
};

ConformalAudit audit_massless_invariance(const RankTwoTensor& f,
                                         const LorentzVector& v,
                                         double lambda,
                                         const LorentzVector& x,
                                         const ConformalParams& p);

}  // namespace rrlab
