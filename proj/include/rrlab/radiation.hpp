#pragma once

// Radiated rates and their accumulation along worldlines: the 4D Larmor
// rate, the 6D momentum and angular-momentum rates, mutual Lorentz forces
// and the interference flux/work comparison for charge pairs, and the
// angular-divergence scan around a massless source's forward ray.

#include <array>
#include <functional>
#include <vector>

#include "rrlab/fields.hpp"
#include "rrlab/quadrature.hpp"
#include "rrlab/worldline.hpp"

namespace rrlab {

// Accumulated radiated quantities of a run. p_rad is the per-charge
// self-radiation total; M_rad carries the angular bookkeeping on 6D runs;
// p_int and work_mutual are filled on two-charge runs.
struct RadiatedTotals {
  LorentzVector p_rad;
  RankTwoTensor M_rad;
  LorentzVector p_int;
  std::array<LorentzVector, 2> work_mutual{LorentzVector(4),
                                           LorentzVector(4)};
};

// (2/3) e^2 (a.a) u, the radiated-momentum rate of a massive 4D charge.
// The time component is >= 0: a.a >= 0 for a spacelike acceleration.
LorentzVector larmor_rate_4d(const WorldlinePoint& pt, double e);

// Radiated-momentum rate of a massive 6D charge,
//   e^2 [ (4/5)(da.da) u - (6/35)(a.a) da + (3/7) a d(a.a) + 2 (a.a)^2 u ]
// with d(a.a) = 2 (a.da). Requires jerk data on the point.
LorentzVector sixd_rate(const WorldlinePoint& pt, double e);

// Radiated angular-momentum rate of a massive 6D charge: the orbital wedge
// z ^ sixd_rate plus the intrinsic part
//   e^2 [ (4/5) a ^ da + (64/35)(a.a) u ^ a ],
// all contravariant, antisymmetric.
RankTwoTensor sixd_angular_rate(const WorldlinePoint& pt, double e);

struct VectorQuadrature {
  LorentzVector value;
  double error = 0.0;  // inf-norm Richardson estimate
};

struct TensorQuadrature {
  RankTwoTensor value;
  double error = 0.0;
};

// Composite Simpson of the rate over the knot grid clipped to [tau0, tau1],
// one Richardson halving step per interval for the value update and the
// error estimate. Throws on a non-finite rate.
VectorQuadrature accumulate(
    const Worldline& w,
    const std::function<LorentzVector(const WorldlinePoint&)>& rate,
    double tau0, double tau1);
VectorQuadrature accumulate(
    const Worldline& w,
    const std::function<LorentzVector(const WorldlinePoint&)>& rate);

TensorQuadrature accumulate_tensor(
    const Worldline& w,
    const std::function<RankTwoTensor(const WorldlinePoint&)>& rate,
    double tau0, double tau1);
TensorQuadrature accumulate_tensor(
    const Worldline& w,
    const std::function<RankTwoTensor(const WorldlinePoint&)>& rate);

// Lorentz force of charge b on charge a at proper time tau_a of a:
//   F_ba = e_a f_b(z_a) . u_a  (mixed application of b's retarded field).
// Throws HistoryError when b's history does not cover the retarded root.
LorentzVector mutual_force(const Worldline& wa, const Worldline& wb,
                           double tau_a);

// Two-charge interference bookkeeping over the lab window [t0, t1] and the
// sphere |y| = R: escaped interference momentum vs the summed mutual work.
// When the field configuration is static at both window ends (rest-to-rest
// motion), flux + work[0] + work[1] = 0 up to quadrature error.
struct FluxWorkReport {
  LorentzVector flux;     // time-integrated interference momentum flux
  double flux_error = 0.0;
  std::array<LorentzVector, 2> work{LorentzVector(4), LorentzVector(4)};
  double work_error = 0.0;
};

FluxWorkReport interference_flux_check(const Worldline& wa,
                                       const Worldline& wb, double t0,
                                       double t1, double R, int n_theta = 64,
                                       int n_phi = 128, int n_time = 64);

// One cutoff row of the divergence scan: wavefront-chart integral of the
// T^{0 nu} density over theta >= theta_min on the lab slice t.
struct DivergenceScanRow {
  double theta_min = 0.0;
  double energy = 0.0;
  std::array<double, 3> momentum{0.0, 0.0, 0.0};
  double error = 0.0;  // node-halving estimate, inf-norm over components
};

struct DivergenceScan {
  std::vector<DivergenceScanRow> rows;
  bool no_divergence = false;  // straight line: zero field, finite entries
  // Emission-window invariants the fitted coefficients are checked against:
  // I = integral of a.a ds and V^i = integral of (a.a) v^i ds over [s0, s1].
  double a2_integral = 0.0;
  std::array<double, 3> a2v_integral{0.0, 0.0, 0.0};
  double s0 = 0.0, s1 = 0.0;
};

// Integrates the energy-momentum density of a massless 4D source over its
// wavefront chart at lab time t, once per cutoff. The radial direction is
// sampled in log(1 - cos theta) so the near-ray growth is resolved; phi is
// a trapezoid; the emission parameter s runs over [tau_min, t] with
// Gauss-Legendre nodes. Histories must reach lab time t.
DivergenceScan massless_divergence_scan(const Worldline& w, double t,
                                        const std::vector<double>& theta_min_list,
                                        int n_s = 128, int n_theta = 96,
                                        int n_phi = 32);

// Least-squares fits of the scan rows against the cutoff structure,
// c = 1 - cos(theta_min):
//   energy   E(c) = A + B / (2 c^2)
//   momentum P(c) = A + Bc / c + Bc2 / (2 c^2)
struct EnergyFit {
  double A = 0.0, B = 0.0;
};
struct MomentumFit {
  double A = 0.0, Bc = 0.0, Bc2 = 0.0;
};

EnergyFit fit_divergence_energy(const DivergenceScan& scan);
MomentumFit fit_divergence_momentum(const DivergenceScan& scan, int axis);

}  // namespace rrlab
