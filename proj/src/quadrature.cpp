#include "rrlab/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rrlab {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-based initial guess for the i-th positive root.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Legendre recurrence up to P_n and its derivative at z.
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = -p0 / pp;
      z += dz;
      if (std::abs(dz) < 1e-15) break;
    }
    // Roots come out descending in z; store ascending from both ends.
    x[i] = -z;
    x[n - 1 - i] = z;
    const double wi = 2.0 / ((1.0 - z * z) * pp * pp);
    w[i] = wi;
    w[n - 1 - i] = wi;
  }
}

namespace {

LorentzVector flux_pass(
    const std::function<RankTwoTensor(const LorentzVector&)>& stress,
    double R, double t, int n_theta, int n_phi) {
  std::vector<double> mu, wmu;
  gauss_legendre(n_theta, mu, wmu);
  const double wphi = 2.0 * std::numbers::pi / n_phi;
  LorentzVector flux(4);
  for (int it = 0; it < n_theta; ++it) {
    const double ct = mu[it];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int ip = 0; ip < n_phi; ++ip) {
      const double phi = wphi * ip;
      const double nhat[3] = {st * std::cos(phi), st * std::sin(phi), ct};
      LorentzVector y({t, R * nhat[0], R * nhat[1], R * nhat[2]});
      const RankTwoTensor T = stress(y);
      const double wt = wmu[it] * wphi * R * R;
      for (int nu = 0; nu < 4; ++nu) {
        double Tn = 0.0;
        for (int i = 0; i < 3; ++i) Tn += T.at(i + 1, nu) * nhat[i];
        flux.c[nu] += wt * Tn;
      }
    }
  }
  return flux;
}

}  // namespace

LorentzVector sphere_flux(
    const std::function<RankTwoTensor(const LorentzVector&)>& stress,
    double R, double t, int n_theta, int n_phi, double* err) {
  if (n_theta < 2 || n_phi < 2)
    throw std::invalid_argument("sphere_flux: too few nodes");
  const LorentzVector fine = flux_pass(stress, R, t, n_theta, n_phi);
  if (err) {
    const LorentzVector coarse =
        flux_pass(stress, R, t, n_theta / 2, n_phi / 2);
    *err = inf_norm(fine - coarse);
  }
  return fine;
}

}  // namespace rrlab
