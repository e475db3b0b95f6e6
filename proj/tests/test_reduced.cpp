#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "choquard/energy.hpp"
#include "choquard/green.hpp"
#include "choquard/reduced.hpp"

using namespace choquard;

TEST_CASE("configuration and the dilation law") {
  const double l0 = kPi * kPi / 4;
  ReducedConfig cfg = ReducedConfig::make(Kind::Dirichlet, l0 + 0.05);
  CHECK(cfg.lambda0 == doctest::Approx(l0).epsilon(1e-10));
  CHECK(cfg.A == doctest::Approx(0.5 / (8 * kPi)).epsilon(1e-8));
  double g = robin_center(Kind::Dirichlet, cfg.lambda);
  CHECK(mu_of(cfg, 1.0, {0, 0, 0}) == doctest::Approx(-4 * g / cfg.lambda).epsilon(1e-8));
  CHECK(mu_of(cfg, 2.0, {0, 0, 0}) == doctest::Approx(2 * mu_of(cfg, 1.0, {0, 0, 0})).epsilon(1e-12));
  ReducedConfig below = cfg;
  below.lambda = l0 - 0.01;
  CHECK_THROWS_WITH_AS(below.validate(), doctest::Contains("invalid-config"), Error);
  CHECK_THROWS_WITH_AS(mu_of(ReducedConfig::make(Kind::Dirichlet, 2.0), 1.0, {0, 0, 0}),
                       doctest::Contains("wrong-sign-robin"), Error);
}

TEST_CASE("region shrinks toward the threshold") {
  const double l0 = kPi * kPi / 4;
  Region far = shrinking_region(ReducedConfig::make(Kind::Dirichlet, l0 + 0.2));
  Region near = shrinking_region(ReducedConfig::make(Kind::Dirichlet, l0 + 0.02));
  CHECK(far.contains({0, 0, 0}));
  CHECK(near.radius < far.radius);
  CHECK(near.radius > 0);
  Region nr = shrinking_region(ReducedConfig::make(Kind::Neumann, 1.5));
  CHECK(nr.radius > 0);
}

TEST_CASE("critical point at the centre") {
  for (Kind k : {Kind::Dirichlet, Kind::Neumann}) {
    double lam = lambda_star(k) + 0.05;
    ReducedConfig cfg = ReducedConfig::make(k, lam);
    ReducedPoint p = critical_point(cfg);
    CHECK(norm(p.xi) < 1e-8);
    CHECK(p.Lambda == doctest::Approx(1.0).epsilon(0.05));
    CHECK(p.in_region);
    CHECK(p.gradient_norm < 1e-8);
    ReducedPoint ex = critical_point(cfg, true);
    CHECK(ex.mu == doctest::Approx(p.mu).epsilon(0.25));
    BlowupPrediction bp = predict_blowup(cfg);
    CHECK(bp.mu == doctest::Approx(p.mu));
    CHECK(bp({0, 0, 0}) == doctest::Approx(kC3 / std::sqrt(bp.mu)));
  }
}

TEST_CASE("reduced functional from a tabulated Robin function") {
  auto path = std::filesystem::temp_directory_path() / "choquard_reduce_table.csv";
  const double lam = kPi * kPi / 4 + 0.05;
  RobinEvaluator ev(Kind::Dirichlet, lam);
  {
    std::ofstream f(path);
    f << "xi_1,xi_2,xi_3,g_value\n";
    f.precision(16);
    for (double x : {-0.2, -0.1, 0.0, 0.1, 0.2})
      for (double y : {-0.2, -0.1, 0.0, 0.1, 0.2})
        for (double z : {-0.2, -0.1, 0.0, 0.1, 0.2}) f << x << ',' << y << ',' << z << ',' << ev.robin({x, y, z}) << '\n';
  }
  ReducedConfig cfg = ReducedConfig::make(Kind::Dirichlet, lam);
  double mu_ball = predict_blowup(cfg).mu;
  cfg.table = load_robin_table(path.string());
  BlowupPrediction bp = predict_blowup(cfg);
  CHECK(norm(bp.xi) < 0.05);
  CHECK(bp.mu == doctest::Approx(mu_ball).epsilon(1e-6));
  std::filesystem::remove(path);
}
