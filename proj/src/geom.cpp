#include "rrlab/geom.hpp"

#include <cmath>

namespace rrlab {

void check_dim(int dim) {
  if (dim != 4 && dim != 6) {
    throw DimensionMismatch("dimension must be 4 or 6, got " +
                            std::to_string(dim));
  }
}

static void check_same(int a, int b, const char* where) {
  if (a != b) {
    throw DimensionMismatch(std::string(where) + ": dimension mismatch " +
                            std::to_string(a) + " vs " + std::to_string(b));
  }
}

LorentzVector::LorentzVector(std::initializer_list<double> xs) {
  dim = static_cast<int>(xs.size());
  check_dim(dim);
  int i = 0;
  for (double x : xs) c[static_cast<std::size_t>(i++)] = x;
}

LorentzVector& LorentzVector::operator+=(const LorentzVector& o) {
  check_same(dim, o.dim, "LorentzVector +=");
  for (int i = 0; i < dim; ++i) (*this)[i] += o[i];
  return *this;
}

LorentzVector& LorentzVector::operator-=(const LorentzVector& o) {
  check_same(dim, o.dim, "LorentzVector -=");
  for (int i = 0; i < dim; ++i) (*this)[i] -= o[i];
  return *this;
}

LorentzVector& LorentzVector::operator*=(double s) {
  for (int i = 0; i < dim; ++i) (*this)[i] *= s;
  return *this;
}

LorentzVector operator+(LorentzVector a, const LorentzVector& b) {
  a += b;
  return a;
}
LorentzVector operator-(LorentzVector a, const LorentzVector& b) {
  a -= b;
  return a;
}
LorentzVector operator*(double s, LorentzVector v) {
  v *= s;
  return v;
}
LorentzVector operator*(LorentzVector v, double s) {
  v *= s;
  return v;
}
LorentzVector operator-(LorentzVector v) {
  v *= -1.0;
  return v;
}

double minkowski_dot(const LorentzVector& a, const LorentzVector& b) {
  check_same(a.dim, b.dim, "minkowski_dot");
  double s = -a[0] * b[0];
  for (int i = 1; i < a.dim; ++i) s += a[i] * b[i];
  return s;
}

LorentzVector lowered(const LorentzVector& v) {
  LorentzVector r = v;
  r[0] = -r[0];
  return r;
}

double inf_norm(const LorentzVector& v) {
  double m = 0.0;
  for (int i = 0; i < v.dim; ++i) m = std::max(m, std::fabs(v[i]));
  return m;
}

double spatial_norm(const LorentzVector& v) {
  double s = 0.0;
  for (int i = 1; i < v.dim; ++i) s += v[i] * v[i];
  return std::sqrt(s);
}

RankTwoTensor RankTwoTensor::identity(int dim) {
  RankTwoTensor t(dim);
  for (int i = 0; i < dim; ++i) t.at(i, i) = 1.0;
  return t;
}

RankTwoTensor& RankTwoTensor::operator+=(const RankTwoTensor& o) {
  check_same(dim, o.dim, "RankTwoTensor +=");
  antisymmetric = antisymmetric && o.antisymmetric;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) at(i, j) += o.at(i, j);
  return *this;
}

RankTwoTensor& RankTwoTensor::operator-=(const RankTwoTensor& o) {
  check_same(dim, o.dim, "RankTwoTensor -=");
  antisymmetric = antisymmetric && o.antisymmetric;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) at(i, j) -= o.at(i, j);
  return *this;
}

RankTwoTensor& RankTwoTensor::operator*=(double s) {
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) at(i, j) *= s;
  return *this;
}

RankTwoTensor operator+(RankTwoTensor a, const RankTwoTensor& b) {
  a += b;
  return a;
}
RankTwoTensor operator-(RankTwoTensor a, const RankTwoTensor& b) {
  a -= b;
  return a;
}
RankTwoTensor operator*(double s, RankTwoTensor t) {
  t *= s;
  return t;
}

RankTwoTensor wedge(const LorentzVector& x, const LorentzVector& y) {
  check_same(x.dim, y.dim, "wedge");
  RankTwoTensor t(x.dim, /*antisym=*/true);
  for (int i = 0; i < x.dim; ++i)
    for (int j = 0; j < x.dim; ++j) t.at(i, j) = x[i] * y[j] - x[j] * y[i];
  return t;
}

double contract(const RankTwoTensor& f, const RankTwoTensor& g) {
  check_same(f.dim, g.dim, "contract");
  // Raising both indices of f negates row 0 and column 0; diagonal 00 entry
  // keeps its sign.
  double s = 0.0;
  for (int i = 0; i < f.dim; ++i) {
    for (int j = 0; j < f.dim; ++j) {
      double sign = ((i == 0) ? -1.0 : 1.0) * ((j == 0) ? -1.0 : 1.0);
      s += sign * f.at(i, j) * g.at(i, j);
    }
  }
  return s;
}

RankTwoTensor mixed_from_lower(const RankTwoTensor& f) {
  RankTwoTensor t = f;
  t.antisymmetric = false;
  for (int j = 0; j < f.dim; ++j) t.at(0, j) = -t.at(0, j);
  return t;
}

RankTwoTensor raised_from_lower(const RankTwoTensor& f) {
  RankTwoTensor t = f;
  for (int j = 0; j < f.dim; ++j) t.at(0, j) = -t.at(0, j);
  for (int i = 0; i < f.dim; ++i) t.at(i, 0) = -t.at(i, 0);
  return t;
}

LorentzVector apply_tensor(const RankTwoTensor& f, const LorentzVector& v) {
  check_same(f.dim, v.dim, "apply_tensor");
  LorentzVector w(v.dim);
  for (int i = 0; i < v.dim; ++i) {
    double s = 0.0;
    for (int j = 0; j < v.dim; ++j) s += f.at(i, j) * v[j];
    w[i] = (i == 0) ? -s : s;
  }
  return w;
}

LorentzVector apply_matrix(const RankTwoTensor& mat, const LorentzVector& v) {
  check_same(mat.dim, v.dim, "apply_matrix");
  LorentzVector w(v.dim);
  for (int i = 0; i < v.dim; ++i) {
    double s = 0.0;
    for (int j = 0; j < v.dim; ++j) s += mat.at(i, j) * v[j];
    w[i] = s;
  }
  return w;
}

RankTwoTensor matmul(const RankTwoTensor& a, const RankTwoTensor& b) {
  check_same(a.dim, b.dim, "matmul");
  RankTwoTensor t(a.dim);
  for (int i = 0; i < a.dim; ++i) {
    for (int j = 0; j < a.dim; ++j) {
      double s = 0.0;
      for (int k = 0; k < a.dim; ++k) s += a.at(i, k) * b.at(k, j);
      t.at(i, j) = s;
    }
  }
  return t;
}

RankTwoTensor transpose(const RankTwoTensor& t) {
  RankTwoTensor r(t.dim, t.antisymmetric);
  for (int i = 0; i < t.dim; ++i)
    for (int j = 0; j < t.dim; ++j) r.at(i, j) = t.at(j, i);
  return r;
}

double inf_norm(const RankTwoTensor& t) {
  double m = 0.0;
  for (int i = 0; i < t.dim; ++i)
    for (int j = 0; j < t.dim; ++j) m = std::max(m, std::fabs(t.at(i, j)));
  return m;
}

LorentzVector four_velocity_from_beta(const std::array<double, 3>& beta,
                                      int dim) {
  check_dim(dim);
  double b2 = 0.0;
  for (double b : beta) b2 += b * b;
  if (b2 >= 1.0) {
    throw std::domain_error("four_velocity_from_beta: |beta| >= 1");
  }
  double gamma = 1.0 / std::sqrt(1.0 - b2);
  LorentzVector u(dim);
  u[0] = gamma;
  for (int i = 0; i < 3 && i + 1 < dim; ++i) u[i + 1] = gamma * beta[i];
  return u;
}

RankTwoTensor rotation_to_axis(const std::array<double, 3>& vhat) {
  double n = std::sqrt(vhat[0] * vhat[0] + vhat[1] * vhat[1] +
                       vhat[2] * vhat[2]);
  if (n == 0.0) {
    throw std::domain_error("rotation_to_axis: zero direction");
  }
  const double vx = vhat[0] / n, vy = vhat[1] / n, vz = vhat[2] / n;

  RankTwoTensor r(4);
  r.at(0, 0) = 1.0;

  // Rodrigues with axis = zhat x vhat, angle = acos(vz). sin(theta) equals
  // |zhat x vhat|, so the formula below is division-free.
  const double cx = -vy, cy = vx;  // zhat x v
  const double s2 = cx * cx + cy * cy;
  if (s2 < 1e-30) {
    if (vz > 0.0) {
      for (int i = 1; i < 4; ++i) r.at(i, i) = 1.0;
    } else {
      // Antipodal: half-turn about the x-axis.
      r.at(1, 1) = 1.0;
      r.at(2, 2) = -1.0;
      r.at(3, 3) = -1.0;
    }
    return r;
  }
  // R = I + [c]_x + [c]_x^2 (1 - cos)/sin^2 with c = zhat x v, cos = vz.
  const double k = (1.0 - vz) / s2;
  const double m3[3][3] = {
      {1.0 - k * cy * cy, k * cx * cy, cy},
      {k * cx * cy, 1.0 - k * cx * cx, -cx},
      {-cy, cx, vz},
  };
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r.at(i + 1, j + 1) = m3[i][j];
  return r;
}

}  // namespace rrlab
