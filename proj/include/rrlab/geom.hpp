#pragma once

// Minkowski vector/tensor algebra in d = 4 or 6, mostly-plus metric
// diag(-1, +1, ..., +1). Component 0 is time. Geometric units c = 1.
//
// Conventions used throughout the library:
//   * LorentzVector components are contravariant (upper index).
//   * RankTwoTensor components are all-lower (both indices down) unless a
//     function says otherwise. Rotations and Jacobians are stored in the same
//     container but act componentwise; use apply_matrix for those and
//     apply_tensor for genuine two-forms.
//   * Raising or lowering one index flips the sign of its 0-components only,
//     since eta^-1 = eta.

#include <array>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace rrlab {

inline constexpr int kMaxDim = 6;

struct DimensionMismatch : std::invalid_argument {
  explicit DimensionMismatch(const std::string& what)
      : std::invalid_argument(what) {}
};

void check_dim(int dim);

struct LorentzVector {
  int dim = 4;
  std::array<double, kMaxDim> c{};  // unused tail stays zero

  LorentzVector() = default;
  explicit LorentzVector(int d) : dim(d) { check_dim(d); }
  LorentzVector(std::initializer_list<double> xs);

  double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  LorentzVector& operator+=(const LorentzVector& o);
  LorentzVector& operator-=(const LorentzVector& o);
  LorentzVector& operator*=(double s);
};

LorentzVector operator+(LorentzVector a, const LorentzVector& b);
LorentzVector operator-(LorentzVector a, const LorentzVector& b);
LorentzVector operator*(double s, LorentzVector v);
LorentzVector operator*(LorentzVector v, double s);
LorentzVector operator-(LorentzVector v);

// eta_{ab} x^a y^b. Throws DimensionMismatch when dims differ.
double minkowski_dot(const LorentzVector& a, const LorentzVector& b);

// Componentwise index flip: returns x_mu from x^mu (and vice versa).
LorentzVector lowered(const LorentzVector& v);

double inf_norm(const LorentzVector& v);
// Euclidean norm of the spatial part.
double spatial_norm(const LorentzVector& v);

struct RankTwoTensor {
  int dim = 4;
  bool antisymmetric = false;
  std::array<std::array<double, kMaxDim>, kMaxDim> m{};

  RankTwoTensor() = default;
  explicit RankTwoTensor(int d, bool antisym = false)
      : dim(d), antisymmetric(antisym) {
    check_dim(d);
  }

  double at(int i, int j) const {
    return m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  double& at(int i, int j) {
    return m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }

  static RankTwoTensor identity(int dim);

  RankTwoTensor& operator+=(const RankTwoTensor& o);
  RankTwoTensor& operator-=(const RankTwoTensor& o);
  RankTwoTensor& operator*=(double s);
};

RankTwoTensor operator+(RankTwoTensor a, const RankTwoTensor& b);
RankTwoTensor operator-(RankTwoTensor a, const RankTwoTensor& b);
RankTwoTensor operator*(double s, RankTwoTensor t);

// (x ^ y)_{mn} = x_m y_n - x_n y_m, componentwise on the arguments.
// Pass lowered vectors to obtain an all-lower two-form.
RankTwoTensor wedge(const LorentzVector& x, const LorentzVector& y);

// F^{kl} G_{kl} for two all-lower tensors.
double contract(const RankTwoTensor& f, const RankTwoTensor& g);

// Mixed form M^m_n = eta^{mk} F_{kn} of an all-lower tensor (row 0 negated).
RankTwoTensor mixed_from_lower(const RankTwoTensor& f);

// Both indices raised: F^{mn} (row 0 and column 0 negated).
RankTwoTensor raised_from_lower(const RankTwoTensor& f);

// w^m = eta^{mk} F_{kn} v^n for an all-lower F and contravariant v.
// For the electromagnetic field this is the per-charge Lorentz force on a
// unit charge: with E_i = f_{i0}, a static source gives w = (0, E).
LorentzVector apply_tensor(const RankTwoTensor& f, const LorentzVector& v);

// Plain matrix action w^m = M^m_n v^n (rotations, Jacobians).
LorentzVector apply_matrix(const RankTwoTensor& mat, const LorentzVector& v);

// Plain matrix product (A B)^m_n.
RankTwoTensor matmul(const RankTwoTensor& a, const RankTwoTensor& b);

RankTwoTensor transpose(const RankTwoTensor& t);

double inf_norm(const RankTwoTensor& t);

// u = gamma (1, beta) with |beta| < 1; dim = beta.size() + 1.
LorentzVector four_velocity_from_beta(const std::array<double, 3>& beta,
                                      int dim = 4);

// 4D lab-frame spatial rotation mapping z-hat onto vhat, embedded with an
// identity time row/column. Plain-matrix storage (use apply_matrix).
// vhat need not be normalized; the antipodal case -z maps via a half-turn
// about the x-axis (fixed tie-break).
RankTwoTensor rotation_to_axis(const std::array<double, 3>& vhat);

}  // namespace rrlab
