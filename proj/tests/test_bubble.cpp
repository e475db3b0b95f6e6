#include <doctest.h>

#include <random>

#include "choquard/bubble.hpp"

using namespace choquard;

namespace {
double a_hl_closed(double a) {
  return std::tgamma(3 - a / 2) / (std::pow(3.0, (3 - a) / 2) * std::pow(kPi, 1.5) * std::tgamma((3 - a) / 2));
}
}  // namespace

TEST_CASE("peak height and dilation scaling") {
  for (double mu : {1e-3, 0.1, 2.0}) {
    CHECK(bubble_radial(mu, 0.0) == doctest::Approx(kC3 / std::sqrt(mu)).epsilon(1e-15));
    for (double r : {0.0, 0.3, 4.0})
      CHECK(bubble_radial(mu, r) == doctest::Approx(bubble_radial(1.0, r / mu) / std::sqrt(mu)).epsilon(1e-14));
  }
}

TEST_CASE("bubble solves -Delta w = w^5") {
  const double mu = 0.7, h = 1e-4;
  for (double r : {0.2, 0.9, 3.0}) {
    double wpp = (bubble_radial(mu, r + h) - 2 * bubble_radial(mu, r) + bubble_radial(mu, r - h)) / (h * h);
    double lap = wpp + 2 * bubble_radial_dr(mu, r) / r;
    CHECK(-lap == doctest::Approx(std::pow(bubble_radial(mu, r), 5)).epsilon(1e-6));
  }
}

TEST_CASE("kernel derivatives match finite differences") {
  Bubble b(0.3, {0.1, -0.2, 0.05}, 1.0);
  Vec3 x{0.4, 0.1, -0.3};
  KernelBasis k = bubble_derivatives(b, x);
  const double h = 1e-6;
  Bubble bp = b, bm = b;
  bp.mu += h;
  bm.mu -= h;
  CHECK(k.d_mu == doctest::Approx((bubble_eval(bp, x) - bubble_eval(bm, x)) / (2 * h)).epsilon(1e-7));
  for (int i = 0; i < 3; ++i) {
    bp = b;
    bm = b;
    bp.xi[i] += h;
    bm.xi[i] -= h;
    CHECK(k.d_xi[i] == doctest::Approx((bubble_eval(bp, x) - bubble_eval(bm, x)) / (2 * h)).epsilon(1e-7));
  }
}

TEST_CASE("normalization constant against the Gamma-function form") {
  for (double a : {0.5, 1.0, 1.7, 2.0, 2.5}) {
    Normalization n = compute_normalization(a);
    CHECK(n.a_hl == doctest::Approx(a_hl_closed(a)).epsilon(1e-10));
    CHECK(n.spread < 1e-10);
  }
  CHECK(normalization(1.0).a_hl == doctest::Approx(1.0 / (4 * kPi)).epsilon(1e-12));
  // frozen
  CHECK(normalization(0.5).a_hl == doctest::Approx(0.080711542332).epsilon(1e-10));
  CHECK(normalization(2.0).a_hl == doctest::Approx(0.058497812651).epsilon(1e-10));
  CHECK(normalization(2.5).a_hl == doctest::Approx(0.034590661000).epsilon(1e-9));
}

TEST_CASE("Monte Carlo potential at the centre, alpha = 1") {
  // int w^5(y) / |y| dy = 4 pi int_0^inf r w^5 dr, sampled with r = tan(theta)
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, kPi / 2);
  const int n = 400000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    double t = u(rng), r = std::tan(t), c = 1.0 / std::cos(t);
    double v = 4 * kPi * r * std::pow(bubble_radial(1.0, r), 5) * c * c * (kPi / 2);
    sum += v;
    sum2 += v * v;
  }
  double mean = sum / n, se = std::sqrt((sum2 / n - mean * mean) / n);
  double pot = riesz_potential_bubble(Bubble(1.0, {0, 0, 0}, 1.0), {0, 0, 0});
  CHECK(std::abs(mean - pot) < 5 * se);
  CHECK(bubble_radial(1.0, 0.0) / mean == doctest::Approx(1.0 / (4 * kPi)).epsilon(5 * se / mean));
}

TEST_CASE("Riesz potential of the bubble power is a multiple of w^alpha off the centre") {
  for (double a : {0.5, 2.0}) {
    Bubble b(0.2, {0.3, 0.0, 0.0}, a);
    for (Vec3 x : {Vec3{0.3, 0, 0}, Vec3{1.0, 0.5, -0.2}, Vec3{-4, 2, 1}})
      CHECK(normalization(a).a_hl * riesz_potential_bubble(b, x) ==
            doctest::Approx(std::pow(bubble_eval(b, x), a)).epsilon(1e-9));
  }
}

TEST_CASE("invalid parameters") {
  CHECK_THROWS_AS(Bubble(0.0, {0, 0, 0}, 1.0), Error);
  CHECK_THROWS_AS(Bubble(1.0, {0, 0, 0}, 3.0), Error);
  CHECK_THROWS_AS(compute_normalization(-1.0), Error);
}
