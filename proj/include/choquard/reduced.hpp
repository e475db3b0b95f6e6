#pragma once

#include <functional>
#include <optional>

#include "choquard/green.hpp"

namespace choquard {

struct ReducedConfig {
  Kind kind = Kind::Dirichlet;
  double lambda0 = 0.0;
  double lambda = 0.0;
  double delta = 0.1;
  double A = 0.0;
  double alpha = 1.0;
  int nodes = 1024;                  // grid for psi_exact
  std::optional<RobinTable> table;   // replaces the ball series when present

  /// Threshold from lambda_star, A = |g'(lambda0)| / 2.
  static ReducedConfig make(Kind kind, double lambda, double alpha = 1.0);
  void validate() const;
  double robin(const Vec3& xi) const;
};

double mu_of(const ReducedConfig& cfg, double Lambda, const Vec3& xi);

/// {xi : g < -(A/2)(lambda - lambda0)} (Dirichlet) or {xi : g > (A/2)(lambda - lambda0)}
/// (Neumann); on the ball a centred open ball of radius `radius`.
struct Region {
  double radius = 0.0;
  double threshold = 0.0;  // the level g is compared against
  bool contains(const Vec3& xi) const { return norm(xi) < radius; }
};
Region shrinking_region(const ReducedConfig& cfg);

/// Expansion surrogate of the reduced functional.
double psi(const ReducedConfig& cfg, double Lambda, const Vec3& xi);
/// Energy of the true ansatz U_{mu,0}, mu = mu_of(cfg, Lambda, 0).
double psi_exact(const ReducedConfig& cfg, double Lambda);

struct ReducedPoint {
  double Lambda = 0.0;
  Vec3 xi{0, 0, 0};
  double mu = 0.0;
  double psi_value = 0.0;
  double gradient_norm = 0.0;
  bool in_region = false;
};
ReducedPoint critical_point(const ReducedConfig& cfg, bool exact = false);

struct BlowupPrediction {
  Vec3 xi{0, 0, 0};
  double mu = 0.0;
  ReducedPoint point;
  double operator()(const Vec3& x) const;
};
BlowupPrediction predict_blowup(const ReducedConfig& cfg, bool exact = false);

}  // namespace choquard
