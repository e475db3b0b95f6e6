#include "choquard/ansatz.hpp"

#include "choquard/green.hpp"
#include "choquard/quad.hpp"
#include "choquard/riesz.hpp"

namespace choquard {

double exterior_tail(const Bubble& b, double r, double tol) {
  if (b.xi != Vec3{0, 0, 0}) throw Error("invalid-center", "exterior tail is radial about the origin");
  if (!(r >= 0 && r <= 1)) throw Error("out-of-range", "radius must lie in [0,1]");
  const double p = 6.0 - b.alpha, mu = b.mu;
  auto f = [p, mu](double s) { return std::pow(bubble_radial(mu, s), p); };
  const double gap = 1.0 - r;
  const double R_max = 50.0;
  auto near = [&](double s, double d) { return riesz_kernel(r, s, d + gap, b.alpha) * f(s); };
  auto far = [&](double s) { return riesz_kernel(r, s, s - r, b.alpha) * f(s); };
  double v = integrate_endpoint(near, 1.0, R_max, true, 0.5 * tol) + integrate_tail(far, R_max, 0.5 * tol);
  if (v < -tol) throw Error("negative-result", "exterior Riesz tail " + std::to_string(v));
  return std::max(v, 0.0);
}

Eigen::VectorXd exterior_tail(const Bubble& b, const Grid& grid) {
  // the tail is tiny for small mu; an absolute target relative to its scale
  const double scale = std::pow(b.mu, 0.5 * (6.0 - b.alpha));
  Eigen::VectorXd t(grid.size());
  for (int i = 0; i < grid.size(); ++i) t[i] = exterior_tail(b, grid.r()[i], 1e-13 * std::max(scale, 1e-30) + 1e-300);
  return t;
}

GridPtr bubble_grid(double mu, int nodes) { return Grid::graded(nodes, mu / 20.0); }

Eigen::VectorXd correction_rhs(Kind kind, double mu, double lambda, double alpha, const Grid& grid) {
  const double a = normalization(alpha).a_hl;
  Eigen::VectorXd tail = exterior_tail(Bubble(mu, {0, 0, 0}, alpha), grid);
  Eigen::VectorXd f(grid.size());
  const double sgn = kind == Kind::Dirichlet ? 1.0 : -1.0;
  for (int i = 0; i < grid.size(); ++i) {
    double w = bubble_radial(mu, grid.r()[i]);
    f[i] = sgn * lambda * w - a * tail[i] * std::pow(w, 5.0 - alpha);
  }
  return f;
}

CorrectionField solve_correction(Kind kind, double mu, double lambda, double alpha, GridPtr grid) {
  if (!(mu > 0 && mu <= 0.5)) throw Error("invalid-mu", "need 0 < mu <= 0.5");
  if (kind == Kind::Dirichlet && lambda >= kPi * kPi)
    throw Error("indefinite-operator", "Dirichlet correction needs lambda < pi^2");
  RadialGreen G(kind, lambda, grid);
  Eigen::VectorXd f = correction_rhs(kind, mu, lambda, alpha, *grid);
  Eigen::VectorXd u = G.apply(f);
  if (kind == Kind::Dirichlet)
    u += -bubble_radial(mu, 1.0) * G.lift();
  else
    u += -bubble_radial_dr(mu, 1.0) * G.lift();

  CorrectionField c;
  c.kind = kind;
  c.mu = mu;
  c.lambda = lambda;
  c.alpha = alpha;
  c.values = RadialField(grid, u);
  const double sgn = kind == Kind::Dirichlet ? -1.0 : 1.0;
  // flux form  -x^2 u'(x) + int_0^x s^2 (sgn lambda u - f) ds, which needs one
  // derivative only; the pointwise Laplacian on the innermost panels is
  // dominated by roundoff
  const Eigen::VectorXd r2 = grid->r().cwiseAbs2();
  Eigen::VectorXd res =
      -r2.cwiseProduct(grid->derivative(u)) + grid->cumulative(r2.cwiseProduct(sgn * lambda * u - f));
  c.residual = res.lpNorm<Eigen::Infinity>() / grid->cumulative(r2.cwiseProduct(f.cwiseAbs())).maxCoeff();
  return c;
}

CorrectionField solve_correction(Kind kind, double mu, double lambda, double alpha, int nodes) {
  return solve_correction(kind, mu, lambda, alpha, bubble_grid(mu, nodes));
}

RadialField ansatz(const CorrectionField& c) {
  const auto& g = c.values.grid;
  Eigen::VectorXd w = g->sample([&](double r) { return bubble_radial(c.mu, r); });
  return RadialField(g, w + c.values.values);
}

Eigen::VectorXd ansatz_laplacian(const CorrectionField& c) {
  // -Delta U = w^5 +- lambda U - a_hl tail w^{5-alpha}
  const auto& g = *c.values.grid;
  const double a = normalization(c.alpha).a_hl;
  Eigen::VectorXd tail = exterior_tail(Bubble(c.mu, {0, 0, 0}, c.alpha), g);
  const double sgn = c.kind == Kind::Dirichlet ? 1.0 : -1.0;
  Eigen::VectorXd out(g.size());
  for (int i = 0; i < g.size(); ++i) {
    double w = bubble_radial(c.mu, g.r()[i]);
    double U = w + c.values.values[i];
    out[i] = std::pow(w, 5) + sgn * c.lambda * U - a * tail[i] * std::pow(w, 5.0 - c.alpha);
  }
  return out;
}

const std::vector<double>& expansion_radii() {
  static const std::vector<double> radii{0.0, 0.1, 0.25, 0.5, 0.75};
  return radii;
}

ExpansionReport ansatz_expansion_check(Kind kind, double lambda, double alpha, const std::vector<double>& mu_list,
                                       bool with_d0, int nodes) {
  if (mu_list.size() < 2) throw Error("invalid-mu", "need at least two mu samples");
  for (size_t i = 0; i < mu_list.size(); ++i) {
    if (!(mu_list[i] > 0 && mu_list[i] <= 0.1)) throw Error("invalid-mu", "mu samples must lie in (0, 0.1]");
    if (i > 0 && !(mu_list[i] < mu_list[i - 1])) throw Error("invalid-mu", "mu samples must decrease");
  }
  RobinEvaluator H(kind, lambda);
  D0Profile D = d0(lambda);
  const double sgn = kind == Kind::Dirichlet ? 1.0 : -1.0;
  std::vector<double> href;
  for (double r : expansion_radii()) href.push_back(-4.0 * kPi * kC3 * H.regular_part({r, 0, 0}, {0, 0, 0}));

  ExpansionReport rep;
  rep.kind = kind;
  rep.alpha = alpha;
  rep.lambda = lambda;
  for (double mu : mu_list) {
    CorrectionField c = solve_correction(kind, mu, lambda, alpha, nodes);
    double worst = 0;
    for (size_t k = 0; k < expansion_radii().size(); ++k) {
      double r = expansion_radii()[k];
      double model = href[k] + (with_d0 ? sgn * mu * D(r / mu) : 0.0);
      worst = std::max(worst, std::abs(c.values(r) / std::sqrt(mu) - model));
    }
    rep.mu.push_back(mu);
    rep.residual.push_back(worst);
  }
  rep.fitted_order = fitted_slope(rep.mu, rep.residual);
  return rep;
}

}  // namespace choquard
