#include <doctest.h>

#include <gsl/gsl_sf_gamma.h>

#include "choquard/ansatz.hpp"
#include "choquard/bubble.hpp"
#include "choquard/energy.hpp"

using namespace choquard;

namespace {
// int_{R^3} w^6 = 4 pi 3^{3/2} B(3/2, 3/2) / 2; the bubble energy is (5-alpha)/(2(6-alpha)) of it
double a0_oracle(double a) {
  return (5 - a) / (2 * (6 - a)) * 2 * kPi * std::pow(3.0, 1.5) * gsl_sf_beta(1.5, 1.5);
}
}  // namespace

TEST_CASE("coefficients against closed forms") {
  for (double a : {0.5, 1.0, 2.0, 2.5}) {
    const EnergyCoefficients& c = cached_coefficients(a);
    CHECK(c.a0 == doctest::Approx(a0_oracle(a)).epsilon(1e-9));
    CHECK(c.a1 == doctest::Approx(4 * kPi * kPi * std::pow(3.0, 1.5) * gsl_sf_beta(1.5, 1.0)).epsilon(1e-9));
    CHECK(c.a2 == doctest::Approx(kPi * kPi * std::sqrt(3.0)).epsilon(1e-9));
    CHECK(c.gamma() == doctest::Approx(4.0).epsilon(1e-9));
  }
}

TEST_CASE("frozen alpha = 1 values") {
  const EnergyCoefficients& c = cached_coefficients(1.0);
  CHECK(c.a0 == doctest::Approx(5.128396881988).epsilon(1e-11));
  CHECK(c.a1 == doctest::Approx(136.757250186337).epsilon(1e-12));
  CHECK(c.a2 == doctest::Approx(17.094656273292).epsilon(1e-12));
  CHECK(c.a3 == doctest::Approx(18127.387411).epsilon(1e-9));
  CHECK(c.a3_radius == 1.0);
  CHECK(c.a3_sensitivity.at(0.5) == doctest::Approx(15840.86).epsilon(1e-6));
  CHECK(c.a3_sensitivity.at(2.0) == doctest::Approx(22476.16).epsilon(1e-6));
}

TEST_CASE("reproducible coefficients") {
  EnergyCoefficients a = coefficients(1.3), b = coefficients(1.3);
  CHECK(a.a3 == b.a3);
  CHECK(std::abs(a.a0 - cached_coefficients(1.3).a0) <= a.error[0]);
}

TEST_CASE("energy of a concentrated bubble tends to a0") {
  GridPtr g = bubble_grid(1e-4, 512);
  RadialField w(g, g->sample([](double r) { return bubble_radial(1e-4, r); }));
  EnergyValue e = functional(w, 0.0, Kind::Dirichlet, 1.0);
  CHECK(e.value == doctest::Approx(cached_coefficients(1.0).a0).epsilon(1e-3));
  CHECK(e.value == doctest::Approx(e.gradient_term + e.mass_term + e.interaction_term));
  EnergyValue en = functional(w, 1.0, Kind::Neumann, 1.0);
  CHECK(en.mass_term > 0);
  EnergyValue ed = functional(w, 1.0, Kind::Dirichlet, 1.0);
  CHECK(ed.mass_term < 0);
}

TEST_CASE("energy expansion orders") {
  const std::vector<double> mus{0.02, 0.01, 0.005, 0.0025};
  for (double a : {0.5, 2.0}) {
    auto d = energy_expansion_check(a, 2.5, mus, Kind::Dirichlet);
    auto n = energy_expansion_check(a, 1.45, mus, Kind::Neumann);
    CHECK(d.fitted_order >= 2.3);
    CHECK(n.fitted_order >= 2.3);
  }
  // without the linear term the residual is O(mu)
  auto ab = energy_expansion_check(1.0, 2.5, mus, Kind::Dirichlet, true);
  CHECK(ab.fitted_order < 1.5);
  CHECK_THROWS_AS(energy_expansion_check(1.0, 2.5, {0.1, 0.05}, Kind::Dirichlet), Error);
}
