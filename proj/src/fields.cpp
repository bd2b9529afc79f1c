#include "rrlab/fields.hpp"

#include <cmath>

namespace rrlab {

LorentzVector lw_potential(const Worldline& w, const LorentzVector& y) {
  const RetardedData rd = retarded_data(w, y);
  if (rd.on_ray) {
    throw RaySingularityError("lw_potential: field point on the forward ray",
                              rd.pt.u);
  }
  return (w.props().charge / rd.r) * rd.pt.u;
}

LorentzVector lw_potential_6d(const Worldline& w, const LorentzVector& y) {
  if (w.props().dim != 6) {
    throw DimensionMismatch("lw_potential_6d: 6D worldline required");
  }
  const RetardedData rd = retarded_data(w, y);
  const double r = rd.r;
  const double phi = 1.0 + r * rd.a_k;
  return w.props().charge *
         ((1.0 / (r * r)) * rd.pt.a + (phi / (r * r * r)) * rd.pt.u);
}

FieldSample lw_field_4d_from_retarded(const Worldline& w,
                                      const LorentzVector& y,
                                      const RetardedData& rd, int source_id) {
  if (w.props().dim != 4) {
    throw DimensionMismatch("lw_field_4d: 4D worldline required");
  }
  FieldSample s;
  s.y = y;
  s.source_id = source_id;
  s.retarded = rd;
  if (rd.on_ray) {
    throw RaySingularityError("lw_field_4d: field point on the forward ray",
                              rd.pt.u);
  }

  const double e = w.props().charge;
  const LorentzVector ul = lowered(rd.pt.u);
  const LorentzVector al = lowered(rd.pt.a);
  const LorentzVector kl = lowered(rd.k);
  const RankTwoTensor uk = wedge(ul, kl);
  const RankTwoTensor ak = wedge(al, kl);
  const double r = rd.r;

  if (w.props().massless) {
    s.f = (e / r) * (ak + rd.a_k * uk);
  } else {
    s.f = (e / (r * r)) * uk + (e / r) * (ak + rd.a_k * uk);
  }
  s.f.antisymmetric = true;
  return s;
}

FieldSample lw_field_4d(const Worldline& w, const LorentzVector& y,
                        int source_id) {
  if (w.props().dim != 4) {
    throw DimensionMismatch("lw_field_4d: 4D worldline required");
  }
  return lw_field_4d_from_retarded(w, y, retarded_data(w, y), source_id);
}

FieldSample lw_field_6d(const Worldline& w, const LorentzVector& y,
                        int source_id) {
  if (w.props().dim != 6) {
    throw DimensionMismatch("lw_field_6d: 6D worldline required");
  }
  FieldSample s;
  s.y = y;
  s.source_id = source_id;
  s.retarded = retarded_data(w, y);
  const RetardedData& rd = s.retarded;

  const double e = w.props().charge;
  const double r = rd.r;
  const double phi = 1.0 + r * rd.a_k;
  const double da_k = minkowski_dot(rd.pt.da, rd.k);

  const LorentzVector ul = lowered(rd.pt.u);
  const LorentzVector al = lowered(rd.pt.a);
  const LorentzVector dal = lowered(rd.pt.da);
  const LorentzVector kl = lowered(rd.k);

  const double r2 = r * r, r3 = r2 * r, r4 = r3 * r;
  s.f = (e / r2) * wedge(dal, kl) + (3.0 * e * phi / r3) * wedge(al, kl) -
        (e / r3) * wedge(al, ul) +
        e * (da_k / r2 + 3.0 * phi * phi / r4) * wedge(ul, kl);
  s.f.antisymmetric = true;
  return s;
}

RankTwoTensor stress_energy_tensor(const RankTwoTensor& f) {
  const int d = f.dim;
  const RankTwoTensor up = raised_from_lower(f);     // f^{ml}
  const RankTwoTensor mixed = mixed_from_lower(f);   // f^n_l
  const double ff = contract(f, f);

  RankTwoTensor t(d);
  const double inv4pi = 1.0 / (4.0 * M_PI);
  for (int m = 0; m < d; ++m) {
    for (int n = 0; n < d; ++n) {
      double s = 0.0;
      for (int l = 0; l < d; ++l) s += up.at(m, l) * mixed.at(n, l);
      double eta_up = 0.0;
      if (m == n) eta_up = (m == 0) ? -1.0 : 1.0;
      t.at(m, n) = inv4pi * (s - 0.25 * eta_up * ff);
    }
  }
  return t;
}

RankTwoTensor stress_energy(const FieldSample& sample) {
  if (sample.f.dim != 4) {
    throw DimensionMismatch(
        "stress_energy: 4D only; 6D bookkeeping uses integrated rates");
  }
  return stress_energy_tensor(sample.f);
}

RankTwoTensor interference_stress_energy(const FieldSample& s1,
                                         const FieldSample& s2) {
  if (s1.f.dim != 4 || s2.f.dim != 4) {
    throw DimensionMismatch("interference_stress_energy: 4D only");
  }
  const double scale = inf_norm(s1.y) + inf_norm(s2.y);
  if (inf_norm(s1.y - s2.y) > 1e-12 * std::max(scale, 1.0)) {
    throw std::invalid_argument(
        "interference_stress_energy: samples at different points");
  }

  const RankTwoTensor up1 = raised_from_lower(s1.f);
  const RankTwoTensor up2 = raised_from_lower(s2.f);
  const RankTwoTensor mx1 = mixed_from_lower(s1.f);
  const RankTwoTensor mx2 = mixed_from_lower(s2.f);
  const double cross = contract(s1.f, s2.f);

  RankTwoTensor t(4);
  const double inv4pi = 1.0 / (4.0 * M_PI);
  for (int m = 0; m < 4; ++m) {
    for (int n = 0; n < 4; ++n) {
      double s = 0.0;
      for (int l = 0; l < 4; ++l)
        s += up1.at(m, l) * mx2.at(n, l) + up2.at(m, l) * mx1.at(n, l);
      double eta_up = 0.0;
      if (m == n) eta_up = (m == 0) ? -1.0 : 1.0;
      t.at(m, n) = inv4pi * (s - 0.5 * eta_up * cross);
    }
  }
  return t;
}

ExternalField zero_field(int dim) {
  check_dim(dim);
  RankTwoTensor f(dim, true);
  return {[f](const LorentzVector&) { return f; }, "zero field"};
}

ExternalField uniform_field(const RankTwoTensor& f, std::string description) {
  return {[f](const LorentzVector&) { return f; }, std::move(description)};
}

ExternalField uniform_electric(const std::array<double, 3>& E, int dim) {
  RankTwoTensor f(dim, true);
  for (int i = 0; i < 3; ++i) {
    f.at(i + 1, 0) = E[i];
    f.at(0, i + 1) = -E[i];
  }
  return uniform_field(f, "uniform electric field");
}

ExternalField uniform_magnetic(const std::array<double, 3>& B) {
  RankTwoTensor f(4, true);
  f.at(1, 2) = B[2];
  f.at(2, 1) = -B[2];
  f.at(2, 3) = B[0];
  f.at(3, 2) = -B[0];
  f.at(3, 1) = B[1];
  f.at(1, 3) = -B[1];
  return uniform_field(f, "uniform magnetic field");
}

ExternalField null_crossed_field(double E0) {
  RankTwoTensor f(4, true);
  f.at(1, 0) = E0;
  f.at(0, 1) = -E0;
  f.at(3, 1) = E0;  // B_y = f_{31}
  f.at(1, 3) = -E0;
  return uniform_field(f, "null crossed field E = E0 x, B = E0 y");
}

ExternalField coulomb_field(double source_charge, int dim) {
  check_dim(dim);
  auto F = [source_charge, dim](const LorentzVector& x) {
    double R2 = 0.0;
    for (int i = 1; i < dim; ++i) R2 += x[i] * x[i];
    const double R = std::sqrt(R2);
    if (R == 0.0) {
      throw SingularPointError("coulomb_field: evaluation at the source");
    }
    // E = e rhat / R^2 in 4D, E = 3 e rhat / R^4 in 6D.
    const double mag = (dim == 4) ? source_charge / (R2 * R)
                                  : 3.0 * source_charge / (R2 * R2 * R);
    RankTwoTensor f(dim, true);
    for (int i = 1; i < dim; ++i) {
      f.at(i, 0) = mag * x[i];
      f.at(0, i) = -mag * x[i];
    }
    return f;
  };
  return {F, "static Coulomb source at the origin"};
}

}  // namespace rrlab
