#pragma once

// Equations of motion: 4D radiation-reaction dynamics in direct third-order
// and reduced-order form, the 6D higher-derivative equation with its
// rigid-particle branch, the massless eigenvector constraint, and retarded
// two-charge coupling. Every driver emits per-step balance reports.

#include <array>
#include <functional>
#include <vector>

#include "rrlab/fields.hpp"
#include "rrlab/ode.hpp"
#include "rrlab/radiation.hpp"
#include "rrlab/worldline.hpp"

namespace rrlab {

enum class LdMode { direct, reduced };

// Per-accepted-step audit. em_residual is windowed from the run start:
//   [p_part(tau) - p_part(tau0)] + int rate dtau - int F_ext dtau,
// with the integrals accumulated by Simpson on the emitted worldline, so the
// Runge-Kutta path and the quadrature path check each other. am_residual and
// mass_drift are assembly identities (rounding-level when the state is
// consistent); velocity_norm_drift tracks |u.u + 1| (massive) or |u.u|.
struct BalanceReport {
  double tau = 0.0;
  LorentzVector em_residual;
  RankTwoTensor am_residual;
  double mass_drift = 0.0;
  double velocity_norm_drift = 0.0;
  double h = 0.0;
  double step_error = 0.0;
};

// p = m u - (2/3) e^2 a. The scalar m stays constant along solutions.
LorentzVector particle_momentum_4d(const WorldlinePoint& pt, double e,
                                   double m);

// p = m u + mu (-da + (3/2)(a.a) u)
//       + e^2 [ (4/5) dda - (8/5) u d(a.a) - (64/35)(a.a) a ].
LorentzVector particle_momentum_6d(const WorldlinePoint& pt, double e,
                                   double m, double mu);

struct IntegratorSettings {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double h_init = 1e-2;
  double h_min = 1e-13;
  double h_max = 0.5;
  double fd_delta = 1e-4;  // displacement for directional field derivatives
};

// Directional derivative (u.d)F at z by a five-point stencil along u.
RankTwoTensor directional_field_derivative(
    const std::function<RankTwoTensor(const LorentzVector&)>& F,
    const LorentzVector& z, const LorentzVector& u, double delta);

// Reduced-order acceleration: the Lorentz term (e/m) F.u plus the
// radiation-reaction correction with the acceleration derivative replaced
// by the field derivative along the trajectory. Exactly orthogonal to u.
LorentzVector landau_lifshitz_accel(
    const std::function<RankTwoTensor(const LorentzVector&)>& F,
    const LorentzVector& z, const LorentzVector& u, double e, double m,
    double delta);

struct Ld4State {
  double tau = 0.0;
  LorentzVector z, u, a;  // a participates in direct mode only
};

// One accepted adaptive step of the 4D equation. Direct mode integrates the
// third-order system (z, u, a) with the acceleration projected back onto
// the u-orthogonal plane after acceptance; reduced mode integrates (z, u)
// with landau_lifshitz_accel. Throws StepUnderflow on stiffness collapse.
// The optional report audits the single step window.
Ld4State lorentz_dirac_step(const Ld4State& s, double e, double m,
                            const ExternalField& fext, LdMode mode,
                            OdeController& ctl, double fd_delta = 1e-4,
                            BalanceReport* report = nullptr);

struct RunResult {
  Worldline line;
  std::vector<BalanceReport> reports;
  LorentzVector p_rad;           // accumulated radiated momentum
  LorentzVector f_ext_integral;  // accumulated external four-force
  bool underflow = false;        // ended early on step underflow
  double underflow_tau = 0.0;
};

RunResult run_lorentz_dirac(const ParticleProps& props,
                            const LorentzVector& z0, const LorentzVector& u0,
                            const LorentzVector& a0, const ExternalField& fext,
                            LdMode mode, double tau_end,
                            const IntegratorSettings& st = {});

// 6D run from the extended state (z, u, a, da, dda). With charge e != 0 the
// fifth-order chain is closed by solving the balance equation for d(dda),
// whose coefficient is (4/5) e^2. With e = 0, mu != 0 the rigid branch
// solves for d(da); with e = 0, mu = 0 plain m a = F_ext remains.
RunResult run_sixd(const ParticleProps& props, const WorldlinePoint& init,
                   const ExternalField& fext, double tau_end,
                   const IntegratorSettings& st = {});

// Exponential-growth fit over the knots whose invariant acceleration norm
// sqrt(a.a) lies in [accel_floor, accel_ceil]: reports d ln|a| / dtau.
// Non-positive bounds select the adaptive band: a decade trimmed off each
// end of the run's own acceleration range, with no verdict unless the range
// spans at least six e-folds. This catches runaways riding on top of a
// driven acceleration scale as well as ones growing from a tiny seed.
struct RunawayVerdict {
  bool runaway = false;
  double efold_rate = 0.0;
  double tau0 = 0.0, tau1 = 0.0;
  int points = 0;
};

RunawayVerdict detect_runaway(const Worldline& w, double accel_floor = 0.0,
                              double accel_ceil = 0.0);

// Null eigenvector extraction from a 4D field tensor (mixed application).
struct NullEigenPair {
  double lambda = 0.0;
  LorentzVector v;  // normalized to v[0] = 1
};

struct NullEigenReport {
  bool degenerate = false;  // F = 0: every null direction qualifies
  std::vector<NullEigenPair> pairs;  // sorted by eigenvalue descending
};

NullEigenReport find_null_eigenvectors(const RankTwoTensor& F,
                                       double tol = 1e-9);

// Massless charge state: z on a null line, u = (1, vhat), effective charge
// multiplier e evolving by de/dt = q lambda while the ray is admissible.
struct MasslessState {
  double t = 0.0;
  LorentzVector z, u;
  double e = 0.0;
};

struct MasslessStepResult {
  MasslessState state;
  bool admissible = false;
  double lambda = 0.0;   // at the step start
  double residual = 0.0; // ||F.u - lambda u|| / ||F||, Euclidean
};

// Checks that u is a real null eigenvector of the external field along the
// step (tolerance eig_tol); if so advances z along the held ray and updates
// e by Simpson of q lambda. An inadmissible field-velocity pair returns
// with admissible = false and the state unchanged: a physics verdict.
MasslessStepResult massless_step(const MasslessState& s, double q,
                                 const ExternalField& fext, double h,
                                 double eig_tol = 1e-9);

// Retarded two-charge coupling, reduced-order only, shared laboratory-time
// stepping (classical RK4; the retarded delay exceeds the step, so stage
// evaluations read frozen histories). Inertial pre-history guarantees the
// mutual roots exist at startup.
struct TwoChargeSettings {
  double dt = 1e-2;
  double pre_history_span = 20.0;
  double fd_delta = 1e-4;
  bool with_mutual_reaction = true;  // include LL correction of mutual field
};

class TwoChargeRun {
 public:
  TwoChargeRun(const std::array<ParticleProps, 2>& props,
               const std::array<LorentzVector, 2>& z0,
               const std::array<LorentzVector, 2>& u0,
               const TwoChargeSettings& st);

  std::array<BalanceReport, 2> step();
  void advance_to(double t_lab);

  double t() const { return t_; }
  const Worldline& line(int i) const {
    return lines_[static_cast<std::size_t>(i)];
  }
  // Total bookkeeping vector: sum of particle momenta plus accumulated
  // self-radiation integrals minus accumulated mutual-work integrals.
  // Constant along exact solutions; drift audits the run.
  LorentzVector conserved_total() const;

 private:
  LorentzVector accel(int i, const LorentzVector& z,
                      const LorentzVector& u) const;

  std::array<ParticleProps, 2> props_;
  TwoChargeSettings st_;
  std::array<Worldline, 2> lines_;
  std::array<double, 2> tau_;
  std::array<LorentzVector, 2> z_, u_;
  std::array<LorentzVector, 2> larmor_acc_, work_acc_;
  double t_ = 0.0;
};

}  // namespace rrlab
