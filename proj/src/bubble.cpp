#include "choquard/bubble.hpp"

#include <map>
#include <mutex>

#include "choquard/riesz.hpp"

namespace choquard {

Bubble::Bubble(double mu_, Vec3 xi_, double alpha_) : mu(mu_), xi(xi_), alpha(alpha_) {
  if (!(mu > 0)) throw Error("invalid-bubble", "mu must be positive");
  if (!(alpha > 0 && alpha < 3)) throw Error("invalid-bubble", "alpha must lie in (0,3)");
}

double bubble_radial(double mu, double r) { return kC3 * std::sqrt(mu / (mu * mu + r * r)); }

double bubble_radial_dr(double mu, double r) {
  double q = mu * mu + r * r;
  return -kC3 * std::sqrt(mu) * r / (q * std::sqrt(q));
}

double bubble_dmu_radial(double mu, double r) {
  double q = mu * mu + r * r;
  return 0.5 * kC3 * (r * r - mu * mu) / (std::sqrt(mu) * q * std::sqrt(q));
}

double bubble_eval(const Bubble& b, const Vec3& x) { return bubble_radial(b.mu, dist(x, b.xi)); }

KernelBasis bubble_derivatives(const Bubble& b, const Vec3& x) {
  double r = dist(x, b.xi);
  double q = b.mu * b.mu + r * r;
  double q32 = q * std::sqrt(q);
  KernelBasis k;
  k.d_mu = bubble_dmu_radial(b.mu, r);
  for (int i = 0; i < 3; ++i) k.d_xi[i] = kC3 * std::sqrt(b.mu) * (x[i] - b.xi[i]) / q32;
  return k;
}

double riesz_potential_bubble(const Bubble& b, const Vec3& x, double tol) {
  // computed for mu = 1 and rescaled: the potential of w_mu^{6-alpha} at r is
  // mu^{-alpha/2} times that of w_1^{6-alpha} at r/mu.
  const double p = 6.0 - b.alpha;
  auto f = [p](double s) { return std::pow(kC3, p) * std::pow(1.0 + s * s, -0.5 * p); };
  double r = dist(x, b.xi) / b.mu;
  return std::pow(b.mu, -0.5 * b.alpha) * riesz_radial(f, r, b.alpha, 50.0, tol);
}

Normalization compute_normalization(double alpha) {
  if (!(alpha > 0 && alpha < 3)) throw Error("invalid-alpha", "alpha must lie in (0,3)");
  static const double samples[] = {0.0, 0.5, 1.0, 2.0, 5.0};
  Bubble b(1.0, {0, 0, 0}, alpha);
  double lo = 1e300, hi = -1e300, sum = 0;
  for (double s : samples) {
    Vec3 x{s, 0, 0};
    double ratio = std::pow(bubble_eval(b, x), alpha) / riesz_potential_bubble(b, x);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    sum += ratio;
  }
  Normalization n;
  n.alpha = alpha;
  n.a_hl = sum / std::size(samples);
  n.spread = (hi - lo) / n.a_hl;
  if (n.spread > 1e-5) throw Error("ratio-not-constant", "Riesz ratio spread " + std::to_string(n.spread));
  return n;
}

const Normalization& normalization(double alpha) {
  static std::mutex mtx;
  static std::map<double, Normalization> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(alpha);
  if (it != cache.end()) return it->second;
  return cache.emplace(alpha, compute_normalization(alpha)).first->second;
}

}  // namespace choquard
