#pragma once

// Quadrature building blocks: Gauss-Legendre nodes and a product-rule
// momentum-flux integral over lab spheres.

#include <functional>
#include <vector>

#include "rrlab/geom.hpp"

namespace rrlab {

// Nodes and weights on [-1, 1], ascending nodes.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

// Momentum flux through the sphere |y| = R on the lab slice t:
//   flux^n = R^2 * integral of T^{in}(t, R nhat) nhat_i dOmega,
// with T contravariant. Gauss-Legendre in cos(theta), trapezoid in phi
// (spectrally accurate for the periodic direction). When err is non-null it
// receives an inf-norm node-halving estimate (costs one extra pass).
LorentzVector sphere_flux(
    const std::function<RankTwoTensor(const LorentzVector&)>& stress,
    double R, double t, int n_theta, int n_phi, double* err = nullptr);

}  // namespace rrlab
