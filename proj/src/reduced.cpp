#include "choquard/reduced.hpp"

#include <boost/math/tools/minima.hpp>

#include "choquard/ansatz.hpp"
#include "choquard/bubble.hpp"
#include "choquard/energy.hpp"

namespace choquard {

ReducedConfig ReducedConfig::make(Kind kind, double lambda, double alpha) {
  ReducedConfig c;
  c.kind = kind;
  c.lambda0 = lambda_star(kind);
  c.lambda = lambda;
  c.alpha = alpha;
  c.A = 0.5 * std::abs(robin_center_slope(kind, c.lambda0));
  return c;
}

void ReducedConfig::validate() const {
  if (!(lambda > lambda0)) throw Error("invalid-config", "lambda must exceed lambda0");
  if (!(delta > 0 && delta < 1)) throw Error("invalid-config", "delta must lie in (0,1)");
  if (!(A > 0)) throw Error("invalid-config", "A must be positive");
}

double ReducedConfig::robin(const Vec3& xi) const {
  if (table) return (*table)(xi);
  return RobinEvaluator(kind, lambda).robin(xi);
}

double mu_of(const ReducedConfig& cfg, double Lambda, const Vec3& xi) {
  const double g = cfg.robin(xi);
  const double gamma = cached_coefficients(cfg.alpha).gamma();
  if (cfg.kind == Kind::Dirichlet ? !(g < 0) : !(g > 0))
    throw Error("wrong-sign-robin", "Robin value " + std::to_string(g) + " has the wrong sign");
  return gamma * std::abs(g) * Lambda / cfg.lambda;
}

Region shrinking_region(const ReducedConfig& cfg) {
  cfg.validate();
  const double level = 0.5 * cfg.A * (cfg.lambda - cfg.lambda0);
  const bool dir = cfg.kind == Kind::Dirichlet;
  // inside iff excess(xi) > 0
  auto excess = [&](double rho) {
    double g = cfg.robin({rho, 0, 0});
    return dir ? -level - g : g - level;
  };
  Region reg;
  reg.threshold = dir ? -level : level;
  if (!(excess(0.0) > 0)) throw Error("empty-region", "the centre violates the region inequality");
  if (cfg.table) {
    // radius of the largest centred ball whose table nodes all qualify
    double r = 1.0;
    for (size_t i = 0; i < cfg.table->points.size(); ++i) {
      double v = cfg.table->values[i];
      bool in = dir ? v < -level : v > level;
      if (!in) r = std::min(r, norm(cfg.table->points[i]));
    }
    reg.radius = r;
    return reg;
  }
  double lo = 0.0, hi = 0.9;
  if (excess(hi) > 0) {
    reg.radius = hi;
    return reg;
  }
  while (hi - lo > 1e-10) {
    double mid = 0.5 * (lo + hi);
    (excess(mid) > 0 ? lo : hi) = mid;
  }
  reg.radius = 0.5 * (lo + hi);
  return reg;
}

namespace {
double surrogate(const ReducedConfig& cfg, double mu, double g) {
  const EnergyCoefficients& c = cached_coefficients(cfg.alpha);
  const double s2 = cfg.kind == Kind::Dirichlet ? 1.0 : -1.0;
  return c.a0 + c.a1 * mu * g + s2 * c.a2 * cfg.lambda * mu * mu - c.a3 * mu * mu * g * g;
}
}  // namespace

double psi(const ReducedConfig& cfg, double Lambda, const Vec3& xi) {
  return surrogate(cfg, mu_of(cfg, Lambda, xi), cfg.robin(xi));
}

double psi_exact(const ReducedConfig& cfg, double Lambda) {
  const double mu = mu_of(cfg, Lambda, {0, 0, 0});
  CorrectionField c = solve_correction(cfg.kind, mu, cfg.lambda, cfg.alpha, cfg.nodes);
  return functional(ansatz(c), cfg.lambda, cfg.kind, cfg.alpha).value;
}

ReducedPoint critical_point(const ReducedConfig& cfg, bool exact) {
  cfg.validate();
  Region reg = shrinking_region(cfg);
  const bool dir = cfg.kind == Kind::Dirichlet;

  // xi: on the ball the centre, by symmetry; with a table the node that
  // extremizes the Robin value inside the region
  Vec3 xi{0, 0, 0};
  if (cfg.table) {
    double best = dir ? 1e300 : -1e300;
    for (size_t i = 0; i < cfg.table->points.size(); ++i) {
      if (!reg.contains(cfg.table->points[i])) continue;
      double v = cfg.table->values[i];
      if (dir ? v < best : v > best) {
        best = v;
        xi = cfg.table->points[i];
      }
    }
  }
  const double g = cfg.robin(xi);
  const EnergyCoefficients& c = cached_coefficients(cfg.alpha);
  const double unit = mu_of(cfg, 1.0, xi);  // mu per unit Lambda

  double Lambda;
  if (!exact) {
    // d/dmu (a0 + a1 g mu + q mu^2) = 0
    const double q = (dir ? 1.0 : -1.0) * c.a2 * cfg.lambda - c.a3 * g * g;
    Lambda = -c.a1 * g / (2.0 * q) / unit;
  } else {
    // Dirichlet: minimum in Lambda; Neumann: maximum
    auto f = [&](double L) { return (dir ? 1.0 : -1.0) * psi_exact(cfg, L); };
    double lo = std::max(cfg.delta, 0.5), hi = std::min(1.0 / cfg.delta, 2.0);
    if (0.5 / unit > 0) hi = std::min(hi, 0.5 / unit);  // mu stays in the solver's range
    auto r = boost::math::tools::brent_find_minima(f, lo, hi, 30);
    Lambda = r.first;
  }
  if (!(Lambda > cfg.delta && Lambda < 1.0 / cfg.delta))
    throw Error("no-critical-point", "Lambda root " + std::to_string(Lambda) + " outside (delta, 1/delta)");

  ReducedPoint p;
  p.Lambda = Lambda;
  p.xi = xi;
  p.mu = unit * Lambda;
  p.psi_value = exact ? psi_exact(cfg, Lambda) : psi(cfg, Lambda, xi);
  p.in_region = reg.contains(xi);
  if (!exact) {
    const double h = 1e-3;
    double dL = (psi(cfg, Lambda + h, xi) - psi(cfg, Lambda - h, xi)) / (2 * h);
    double dx = 0;
    if (!cfg.table) dx = (psi(cfg, Lambda, {h, 0, 0}) - psi(cfg, Lambda, {-h, 0, 0})) / (2 * h);
    p.gradient_norm = std::hypot(dL, dx);
  }
  return p;
}

double BlowupPrediction::operator()(const Vec3& x) const {
  Bubble b(mu, xi, 1.0);
  return bubble_eval(b, x);
}

BlowupPrediction predict_blowup(const ReducedConfig& cfg, bool exact) {
  BlowupPrediction out;
  out.point = critical_point(cfg, exact);
  out.xi = out.point.xi;
  out.mu = out.point.mu;
  return out;
}

}  // namespace choquard
