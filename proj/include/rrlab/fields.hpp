#pragma once

// Retarded Lienard-Wiechert potentials and field strengths for massive 4D,
// massless 4D and massive 6D sources, plus stress-energy assembly with the
// two-source interference piece.
//
// Conventions: E_i = f_{i0}, f_{12} = B_3 (cyclic). All field tensors are
// all-lower; stress-energy tensors are returned contravariant and include
// the 1/4pi factor.

#include <functional>
#include <string>

#include "rrlab/worldline.hpp"

namespace rrlab {

// Field evaluation hit the forward ray of a massless source (r -> 0).
// `ray` is the null direction u(s) of the offending emission point.
struct RaySingularityError : std::runtime_error {
  LorentzVector ray;
  RaySingularityError(const std::string& what, const LorentzVector& ray_)
      : std::runtime_error(what), ray(ray_) {}
};

struct FieldSample {
  LorentzVector y;
  RankTwoTensor f;
  RetardedData retarded;
  int source_id = 0;
};

// Contravariant LW potential at y. 4D: A = e u / r for massive and massless
// sources alike (u normalization enters only through the field strength).
LorentzVector lw_potential(const Worldline& w, const LorentzVector& y);

// Contravariant 6D potential A = e [ a / r^2 + u (1 + r a_k) / r^3 ].
LorentzVector lw_potential_6d(const Worldline& w, const LorentzVector& y);

// Retarded field strength of a 4D source.
//   massive:  f = e [ (u^k)/r^2 + (a^k + a_k u^k)/r ]
//   massless: f = q [ a^k + a_k u^k ] / r     (no near-zone term)
// with x^y the wedge of the lowered vectors. Throws RaySingularityError when
// y lies on the forward ray of a massless line.
FieldSample lw_field_4d(const Worldline& w, const LorentzVector& y,
                        int source_id = 0);

// Assembly step of lw_field_4d for callers that already hold the light-cone
// data of y (chart integrals solve the cone geometrically, not by Newton).
FieldSample lw_field_4d_from_retarded(const Worldline& w,
                                      const LorentzVector& y,
                                      const RetardedData& rd,
                                      int source_id = 0);

// Retarded 6D field strength, the exterior derivative of the 6D potential
// taken analytically through the retarded map s(y):
//   f = e [ (da^k)/r^2 + 3 phi (a^k)/r^3 - (a^u)/r^3
//           + (da_k/r^2 + 3 phi^2/r^4) (u^k) ],  phi = 1 + r a_k.
// The far 1/r^2 part is exactly transverse; the full contraction f.k falls
// off one power faster than f itself.
FieldSample lw_field_6d(const Worldline& w, const LorentzVector& y,
                        int source_id = 0);

// T^{mn} = (1/4pi) [ f^{ml} f^n_l - 1/4 eta^{mn} f.f ], contravariant.
RankTwoTensor stress_energy_tensor(const RankTwoTensor& f);

// 4D only (6D bookkeeping goes through integrated rates, not through T).
RankTwoTensor stress_energy(const FieldSample& sample);

// Cross term: stress_energy(f1 + f2) = T1 + T2 + T_int exactly.
// Throws std::invalid_argument when the samples sit at different points.
RankTwoTensor interference_stress_energy(const FieldSample& s1,
                                         const FieldSample& s2);

// External field: smooth user-supplied F(x), all-lower.
struct ExternalField {
  std::function<RankTwoTensor(const LorentzVector&)> F;
  std::string description;
};

ExternalField zero_field(int dim = 4);
ExternalField uniform_field(const RankTwoTensor& f, std::string description);
// E_i = f_{i0}; dim 4 or 6 (the 6D case embeds E in components 1..3).
ExternalField uniform_electric(const std::array<double, 3>& E, int dim = 4);
ExternalField uniform_magnetic(const std::array<double, 3>& B);
// Null crossed field E = E0 xhat, B = E0 yhat; (1,0,0,1) is a real null
// eigenvector of the mixed tensor with eigenvalue 0.
ExternalField null_crossed_field(double E0);
// Static Coulomb source of the given charge at the spatial origin.
ExternalField coulomb_field(double source_charge, int dim = 4);

}  // namespace rrlab
