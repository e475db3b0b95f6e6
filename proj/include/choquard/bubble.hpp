#pragma once

#include "choquard/common.hpp"

namespace choquard {

/// w_{mu,xi}(x) = 3^{1/4} (mu / (mu^2 + |x - xi|^2))^{1/2}, with the Riesz
/// exponent alpha it is paired with.
struct Bubble {
  double mu = 1.0;
  Vec3 xi{0.0, 0.0, 0.0};
  double alpha = 1.0;

  Bubble() = default;
  Bubble(double mu, Vec3 xi, double alpha);
};

double bubble_eval(const Bubble& b, const Vec3& x);
/// Centred profile as a function of the radius.
double bubble_radial(double mu, double r);
/// d/dr of the centred profile.
double bubble_radial_dr(double mu, double r);

/// Members of the kernel of the linearized operator at x.
struct KernelBasis {
  double d_mu = 0.0;
  Vec3 d_xi{0.0, 0.0, 0.0};
};
KernelBasis bubble_derivatives(const Bubble& b, const Vec3& x);
/// Dilation derivative of the centred profile at radius r.
double bubble_dmu_radial(double mu, double r);

/// Full-space Riesz potential of w^{6-alpha} at x.
double riesz_potential_bubble(const Bubble& b, const Vec3& x, double tol = 1e-10);

/// The constant a_hl for which -Delta w = a_hl (|x|^{-alpha} * w^{6-alpha}) w^{5-alpha}.
struct Normalization {
  double alpha = 1.0;
  double a_hl = 0.0;
  double spread = 0.0;  // relative spread of the sampled ratios
};
Normalization compute_normalization(double alpha);
/// Memoized compute_normalization, shared read-only.
const Normalization& normalization(double alpha);

}  // namespace choquard
