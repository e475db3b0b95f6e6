#include <doctest.h>

#include "choquard/ansatz.hpp"
#include "choquard/green.hpp"
#include "choquard/riesz.hpp"

using namespace choquard;

TEST_CASE("exterior tail equals full minus ball potential") {
  for (double a : {1.0, 2.0}) {
    Bubble b(1.0, {0, 0, 0}, a);
    auto f = [a](double s) { return std::pow(bubble_radial(1.0, s), 6 - a); };
    for (double r : {0.0, 0.5, 0.9}) {
      double full = riesz_potential_bubble(b, {r, 0, 0});
      double ball = riesz_radial_ball(f, r, a);
      CHECK(exterior_tail(b, r) == doctest::Approx(full - ball).epsilon(1e-9));
    }
  }
  GridPtr g = Grid::graded(128, 0.001);
  Eigen::VectorXd t = exterior_tail(Bubble(0.01, {0, 0, 0}, 1.0), *g);
  CHECK(t.minCoeff() > 0);
}

TEST_CASE("exterior forcing decays at least like mu^{(6-alpha)/2}") {
  // L^{6/5} norm over the ball of a_hl * tail * w^{5-alpha}, which bounds the H^{-1} norm
  const double a = 1.0;
  std::vector<double> mus{0.04, 0.02, 0.01, 0.005}, norms;
  for (double mu : mus) {
    GridPtr g = bubble_grid(mu, 512);
    Eigen::VectorXd t = exterior_tail(Bubble(mu, {0, 0, 0}, a), *g);
    Eigen::VectorXd f(g->size());
    for (int i = 0; i < g->size(); ++i)
      f[i] = std::pow(normalization(a).a_hl * t[i] * std::pow(bubble_radial(mu, g->r()[i]), 5 - a), 1.2);
    norms.push_back(std::pow(g->integrate_volume(f), 1 / 1.2));
  }
  double order = fitted_slope(mus, norms);
  MESSAGE("forcing order " << order);
  CHECK(order > (6 - a) / 2 - 0.2);
}

TEST_CASE("correction boundary conditions and residual") {
  const double mu = 0.01;
  CorrectionField d = solve_correction(Kind::Dirichlet, mu, 2.5, 1.0, 512);
  CHECK(d.values(1.0) == doctest::Approx(-bubble_radial(mu, 1.0)).epsilon(1e-9));
  CHECK(d.residual < 1e-8);
  CorrectionField n = solve_correction(Kind::Neumann, mu, 1.5, 1.0, 512);
  const Grid& g = *n.values.grid;
  Eigen::VectorXd du = g.derivative(n.values.values);
  CHECK(g.interpolate(du, 1.0) == doctest::Approx(-bubble_radial_dr(mu, 1.0)).epsilon(1e-7));
  CHECK(n.residual < 1e-8);
  // the Dirichlet correction matches -w near the boundary
  CHECK(d.values(0.95) < 0);
  CHECK(ansatz(d)(1.0) == doctest::Approx(0.0).scale(1e-6));
}

TEST_CASE("resolution independence") {
  CorrectionField c1 = solve_correction(Kind::Dirichlet, 0.02, 2.0, 1.0, 512);
  CorrectionField c2 = solve_correction(Kind::Dirichlet, 0.02, 2.0, 1.0, 1024);
  for (double r : {0.0, 0.1, 0.5, 0.9}) CHECK(c1.values(r) == doctest::Approx(c2.values(r)).epsilon(1e-9));
}

TEST_CASE("leading term of the correction") {
  // mu^{-1/2} pi -> -4 pi 3^{1/4} H(x, 0) at r = 0.5
  for (Kind k : {Kind::Dirichlet, Kind::Neumann}) {
    double lam = k == Kind::Dirichlet ? 2.5 : 1.5;
    RobinEvaluator ev(k, lam);
    double lead = -4 * kPi * kC3 * ev.regular_part({0.5, 0, 0}, {0, 0, 0});
    double e1 = std::abs(solve_correction(k, 0.01, lam, 1.0, 512).values(0.5) / std::sqrt(0.01) - lead);
    double e2 = std::abs(solve_correction(k, 0.005, lam, 1.0, 512).values(0.5) / std::sqrt(0.005) - lead);
    CHECK(e2 < 0.6 * e1);
    CHECK(e2 < 0.02 * std::abs(lead));
  }
}

TEST_CASE("expansion orders with and without the second-order profile") {
  const std::vector<double> mus{0.04, 0.02, 0.01, 0.005};
  auto d = ansatz_expansion_check(Kind::Dirichlet, 2.5, 1.0, mus, true, 512);
  auto n = ansatz_expansion_check(Kind::Neumann, 1.5, 1.0, mus, true, 512);
  auto d0 = ansatz_expansion_check(Kind::Dirichlet, 2.5, 1.0, mus, false, 512);
  MESSAGE("orders " << d.fitted_order << " " << n.fitted_order << " ablated " << d0.fitted_order);
  CHECK(d.fitted_order >= 1.8);
  CHECK(n.fitted_order >= 1.8);
  CHECK(d0.fitted_order < 1.5);
  CHECK(d0.fitted_order == doctest::Approx(1.0).epsilon(0.2));
  CHECK_THROWS_AS(ansatz_expansion_check(Kind::Dirichlet, 2.5, 1.0, {0.01, 0.02}), Error);
}

TEST_CASE("invalid solves") {
  CHECK_THROWS_WITH_AS(solve_correction(Kind::Dirichlet, 0.01, 10.0, 1.0, 256), doctest::Contains("indefinite-operator"),
                       Error);
  CHECK_THROWS_AS(solve_correction(Kind::Dirichlet, 0.9, 2.0, 1.0, 256), Error);
}
