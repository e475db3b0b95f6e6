#include "choquard/energy.hpp"

#include <mutex>

#include "choquard/ansatz.hpp"
#include "choquard/bubble.hpp"
#include "choquard/green.hpp"
#include "choquard/quad.hpp"

namespace choquard {

namespace {

// 4 pi int_0^inf r^2 f(r) dr for the algebraically decaying profiles below
double volume_integral(const Fn& f, double* err) {
  auto g = [&](double r) { return 4.0 * kPi * r * r * f(r); };
  double e1 = 0, e2 = 0;
  double v = integrate_gk(g, 0.0, 50.0, 1e-10, &e1) + integrate_tail(g, 50.0, 1e-10, &e2);
  if (err) *err = e1 + e2;
  return v;
}

double w1(double r) { return bubble_radial(1.0, r); }

}  // namespace

EnergyCoefficients coefficients(double alpha, double a3_radius) {
  if (!(alpha > 0 && alpha < 3)) throw Error("invalid-alpha", "alpha must lie in (0,3)");
  EnergyCoefficients c;
  c.alpha = alpha;
  c.a3_radius = a3_radius;

  double e = 0;
  c.a1 = 2.0 * kPi * kC3 * volume_integral([](double r) { return std::pow(w1(r), 5); }, &e);
  c.error[1] = 2.0 * kPi * kC3 * e;

  auto bracket = [](double r) {
    double q = std::sqrt(1.0 + r * r);
    // 1/r - 1/q = (q - r)/(r q), with q - r = 1/(q + r)
    double d = 1.0 / (r * q * (q + r));
    return w1(r) * d + 0.5 * r * std::pow(w1(r), 5);
  };
  auto bracket_r2 = [&](double r) { return r > 0 ? bracket(r) : 0.0; };
  c.a2 = 0.5 * kC3 * volume_integral(bracket_r2, &e);
  c.error[2] = 0.5 * kC3 * e;

  const double na = normalization(alpha).a_hl;
  auto w4 = [](double r) { return 4.0 * kPi * r * r * std::pow(w1(r), 4); };
  auto f5 = [alpha](double s) { return std::pow(w1(s), 5.0 - alpha); };
  const double hls55 = hls_energy_full(f5, f5, alpha, 1e-9);
  const double pref = 8.0 * kPi * kPi * std::sqrt(3.0);
  auto a3_at = [&](double R, double* err) {
    double ew = 0;
    double v = integrate_gk(w4, 0.0, R, 1e-12, &ew);
    if (err) *err = pref * (5.0 - alpha) * ew + pref * (6.0 - alpha) * na * 1e-9;
    return pref * (5.0 - alpha) * v + pref * (6.0 - alpha) * na * hls55;
  };
  c.a3 = a3_at(a3_radius, &c.error[3]);
  for (double R : {0.5, 1.0, 2.0}) c.a3_sensitivity[R] = a3_at(R, nullptr);

  const double S = sharp_constant_shl(alpha, true);
  c.a0 = (5.0 - alpha) / (2.0 * (6.0 - alpha)) * std::pow(S, (6.0 - alpha) / (5.0 - alpha));
  c.error[0] = c.a0 * 1e-9;
  return c;
}

const EnergyCoefficients& cached_coefficients(double alpha) {
  static std::mutex mtx;
  static std::map<double, EnergyCoefficients> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(alpha);
  if (it != cache.end()) return it->second;
  return cache.emplace(alpha, coefficients(alpha)).first->second;
}

EnergyValue functional(const RadialField& u, double lambda, Kind kind, const RieszMatrix& m) {
  const auto& g = *u.grid;
  if (u.grid != m.grid && (g.size() != m.grid->size() || (g.r() - m.grid->r()).norm() != 0.0))
    throw Error("grid-mismatch", "field grid differs from matrix grid");
  const double alpha = m.alpha;
  Eigen::VectorXd du = g.derivative(u.values);
  Eigen::VectorXd p = u.values.cwiseMax(0.0).array().pow(6.0 - alpha).matrix();
  EnergyValue e;
  e.gradient_term = 0.5 * g.integrate_volume(du.cwiseAbs2());
  const double sgn = kind == Kind::Dirichlet ? -1.0 : 1.0;
  e.mass_term = sgn * 0.5 * lambda * g.integrate_volume(u.values.cwiseAbs2());
  e.interaction_term = -normalization(alpha).a_hl / (2.0 * (6.0 - alpha)) * hls_energy(m, p, p);
  e.value = e.gradient_term + e.mass_term + e.interaction_term;
  return e;
}

EnergyValue functional(const RadialField& u, double lambda, Kind kind, double alpha) {
  return functional(u, lambda, kind, build_riesz_matrix(u.grid, alpha));
}

ExpansionReport energy_expansion_check(double alpha, double lambda, const std::vector<double>& mu_list, Kind kind,
                                       bool drop_linear, int nodes) {
  if (mu_list.size() < 2) throw Error("invalid-mu", "need at least two mu samples");
  for (size_t i = 0; i < mu_list.size(); ++i) {
    if (!(mu_list[i] > 0 && mu_list[i] <= 0.05)) throw Error("invalid-mu", "mu samples must lie in (0, 0.05]");
    if (i > 0 && !(mu_list[i] < mu_list[i - 1])) throw Error("invalid-mu", "mu samples must decrease");
  }
  const EnergyCoefficients& c = cached_coefficients(alpha);
  const double g = RobinEvaluator(kind, lambda).robin({0, 0, 0});
  const double s2 = kind == Kind::Dirichlet ? 1.0 : -1.0;
  ExpansionReport rep;
  rep.kind = kind;
  rep.alpha = alpha;
  rep.lambda = lambda;
  for (double mu : mu_list) {
    CorrectionField corr = solve_correction(kind, mu, lambda, alpha, nodes);
    double J = functional(ansatz(corr), lambda, kind, alpha).value;
    double model = c.a0 + (drop_linear ? 0.0 : c.a1 * mu * g) + s2 * c.a2 * lambda * mu * mu - c.a3 * mu * mu * g * g;
    rep.mu.push_back(mu);
    rep.residual.push_back(std::abs(J - model));
  }
  rep.fitted_order = fitted_slope(rep.mu, rep.residual);
  return rep;
}

}  // namespace choquard
