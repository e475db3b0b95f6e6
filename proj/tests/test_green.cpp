#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "choquard/acceptance.hpp"
#include "choquard/green.hpp"

using namespace choquard;

TEST_CASE("centre value against radial shooting") {
  for (double lam : {0.6, 1.0, 2.467, 4.0, 8.5}) {
    CHECK(RobinEvaluator(Kind::Dirichlet, lam).robin({0, 0, 0}) ==
          doctest::Approx(shooting_robin_center(Kind::Dirichlet, lam)).epsilon(1e-10));
    CHECK(RobinEvaluator(Kind::Neumann, lam).robin({0, 0, 0}) ==
          doctest::Approx(shooting_robin_center(Kind::Neumann, lam)).epsilon(1e-10));
    double k = std::sqrt(lam);
    CHECK(robin_center(Kind::Dirichlet, lam) == doctest::Approx(k / std::tan(k) / (4 * kPi)).epsilon(1e-13));
  }
}

TEST_CASE("small lambda approaches the harmonic Robin function of the ball") {
  RobinEvaluator ev(Kind::Dirichlet, 1e-7);
  for (double rho : {0.0, 0.3, 0.6, 0.85})
    CHECK(ev.robin({0, rho, 0}) == doctest::Approx(1.0 / (4 * kPi * (1 - rho * rho))).epsilon(1e-6));
}

TEST_CASE("regular part is symmetric and rotation invariant") {
  for (Kind k : {Kind::Dirichlet, Kind::Neumann}) {
    RobinEvaluator ev(k, 2.0);
    Vec3 x{0.3, -0.1, 0.2}, y{-0.4, 0.25, 0.1};
    CHECK(ev.regular_part(x, y) == doctest::Approx(ev.regular_part(y, x)).epsilon(1e-10));
    CHECK(ev.robin({0.5, 0, 0}) == doctest::Approx(ev.robin({0, 0, -0.5})).epsilon(1e-12));
    CHECK(ev.robin({0.5, 0, 0}) == doctest::Approx(ev.regular_part({0.5, 0, 0}, {0.5, 0, 0})).epsilon(1e-12));
  }
}

TEST_CASE("thresholds") {
  CHECK(lambda_star(Kind::Dirichlet) == doctest::Approx(kPi * kPi / 4).epsilon(1e-10));
  CHECK(lambda_star(Kind::Neumann) == doctest::Approx(neumann_threshold_oracle()).epsilon(1e-10));
  CHECK(neumann_threshold_oracle() == doctest::Approx(1.43922883989064515).epsilon(1e-12));
  // frozen slopes
  CHECK(robin_center_slope(Kind::Dirichlet, kPi * kPi / 4) == doctest::Approx(-1.0 / (8 * kPi)).epsilon(1e-10));
  CHECK(robin_center_slope(Kind::Neumann, neumann_threshold_oracle()) == doctest::Approx(0.1303764481).epsilon(1e-8));
  // sign conventions: g < 0 above the Dirichlet threshold, g > 0 above the Neumann one
  CHECK(robin_center(Kind::Dirichlet, 2.6) < 0);
  CHECK(robin_center(Kind::Neumann, 1.5) > 0);
}

TEST_CASE("series errors") {
  CHECK_THROWS_WITH_AS(RobinEvaluator(Kind::Dirichlet, kPi * kPi), doctest::Contains("resonance"), Error);
  CHECK_THROWS_WITH_AS(RobinEvaluator(Kind::Dirichlet, -1.0), doctest::Contains("invalid-lambda"), Error);
  RobinEvaluator ev(Kind::Dirichlet, 2.0, 20);
  CHECK_THROWS_WITH_AS(ev.robin({0.95, 0, 0}), doctest::Contains("series-not-converged"), Error);
  CHECK(RobinEvaluator(Kind::Dirichlet, 2.0, 400).robin({0.95, 0, 0}) > 0);
}

TEST_CASE("D0 profile against its closed form") {
  for (double lam : {1.0, 2.5}) {
    D0Profile p = d0(lam);
    for (double z : {0.0, 0.5, 3.0, 40.0, 1e4})
      CHECK(std::abs(p(z) - d0_exact(lam, z)) < 1e-9 * std::max(1.0, std::abs(d0_exact(lam, 0.0))));
  }
  CHECK_THROWS_AS(d0(0.0), Error);
}

TEST_CASE("radial Green operator inverts -Delta -+ lambda") {
  GridPtr g = Grid::graded(256, 0.01);
  const double lam = 2.0, k = std::sqrt(lam);
  Eigen::VectorXd one = Eigen::VectorXd::Ones(g->size());
  // Dirichlet: u = (sin(kr) / (r sin k) - 1) / lambda
  Eigen::VectorXd ud = RadialGreen(Kind::Dirichlet, lam, g).apply(one);
  // Neumann: -Delta u + lambda u = 1, u'(1) = 0 gives u = 1/lambda
  Eigen::VectorXd un = RadialGreen(Kind::Neumann, lam, g).apply(one);
  for (int i = 0; i < g->size(); i += 37) {
    double r = g->r()[i];
    CHECK(ud[i] == doctest::Approx((std::sin(k * r) / (r * std::sin(k)) - 1) / lam).epsilon(1e-11));
    CHECK(un[i] == doctest::Approx(1 / lam).epsilon(1e-11));
  }
  RadialGreen G(Kind::Dirichlet, lam, g);
  Eigen::VectorXd f = g->sample([](double r) { return std::exp(-r); });
  CHECK((G.matrix() * f - G.apply(f)).norm() < 1e-12 * G.apply(f).norm());
  CHECK(G.lift_at(1.0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK_THROWS_AS(RadialGreen(Kind::Dirichlet, 10.0, g), Error);
}

TEST_CASE("Robin table ingestion") {
  auto path = std::filesystem::temp_directory_path() / "choquard_robin_table.csv";
  {
    std::ofstream f(path);
    f << "xi_1,xi_2,xi_3,g_value\n0,0,0,-0.01\n0.5,0,0,0.2\n0,0.5,0,0.2\n";
  }
  RobinTable t = load_robin_table(path.string());
  CHECK(t.points.size() == 3);
  CHECK(t({0, 0, 0}) == doctest::Approx(-0.01));
  CHECK(t({0.5, 0, 0}) == doctest::Approx(0.2));
  double mid = t({0.1, 0.1, 0});
  CHECK(mid > -0.01);
  CHECK(mid < 0.2);
  {
    std::ofstream f(path);
    f << "xi_1,xi_2,xi_3,g_value\n0,0,zero,1\n";
  }
  CHECK_THROWS_WITH_AS(load_robin_table(path.string()), doctest::Contains("bad-table"), Error);
  CHECK_THROWS_AS(load_robin_table("/nonexistent/table.csv"), Error);
  std::filesystem::remove(path);
}
