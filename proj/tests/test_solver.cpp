#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "choquard/ansatz.hpp"
#include "choquard/reduced.hpp"
#include "choquard/solver.hpp"

using namespace choquard;

namespace {
DiscreteState seed(const Problem& P, double lambda, double mu_factor = 1.0) {
  double mu = mu_factor * mu_of(ReducedConfig::make(P.kind, lambda, P.alpha), 1.0, {0, 0, 0});
  DiscreteState s;
  s.u = ansatz(solve_correction(P.kind, mu, lambda, P.alpha, P.grid));
  s.lambda = lambda;
  s.kind = P.kind;
  return s;
}
}  // namespace

TEST_CASE("Jacobian against finite differences") {
  std::mt19937 rng(3);
  std::normal_distribution<double> nd;
  for (Kind k : {Kind::Dirichlet, Kind::Neumann}) {
    for (double a : {0.7, 2.0}) {
      GridPtr g = bubble_grid(0.02, 256);
      Problem P = Problem::make(k, a, g);
      double lam = k == Kind::Dirichlet ? 2.5 : 1.5;
      Eigen::VectorXd U = ansatz(solve_correction(k, 0.02, lam, a, g)).values;
      Eigen::VectorXd v(U.size());
      for (int i = 0; i < v.size(); ++i) v[i] = nd(rng) * U[i];
      const double h = 1e-6;
      Eigen::VectorXd fd = (fixed_point_residual(P, lam, U + h * v) - fixed_point_residual(P, lam, U - h * v)) / (2 * h);
      CHECK((jacobian(P, lam, U) * v - fd).norm() < 1e-7 * fd.norm());
      Linearization L = linearize(P, U);
      Eigen::VectorXd nfd = (nonlinear(P, U + h * v) - nonlinear(P, U - h * v)) / (2 * h);
      CHECK(((L.nonlocal + L.local) * v - nfd).norm() < 1e-7 * nfd.norm());
    }
  }
}

TEST_CASE("Newton from the ansatz") {
  const double lam = kPi * kPi / 4 + 0.05;
  Problem P = Problem::make(Kind::Dirichlet, 1.0, Grid::graded(512, 2e-5));
  DiscreteState s = newton_solve(P, seed(P, lam));
  CHECK(s.iterations <= 8);
  CHECK(s.residual_norm < 1e-9);
  CHECK(s.note.empty());
  CHECK(s.u.values.minCoeff() > 0);
  // frozen measured scale, within 3% of the prediction
  CHECK(measure_mu(s) == doctest::Approx(3.2525e-3).epsilon(1e-3));
  // the differential form of the residual agrees away from the boundary layer of the spectral derivative
  RadialField r = residual(P, s);
  Eigen::VectorXd u5 = s.u.values.array().pow(5.0);
  CHECK(r.values.head(P.grid->size() / 2).cwiseAbs().maxCoeff() < 1e-5 * u5.maxCoeff());
}

TEST_CASE("Newton basin behaviour") {
  const double lam = kPi * kPi / 4 + 0.05;
  Problem P = Problem::make(Kind::Dirichlet, 1.0, Grid::graded(512, 2e-5));
  DiscreteState zero;
  zero.u = RadialField(P.grid, Eigen::VectorXd::Zero(P.grid->size()));
  zero.lambda = lam;
  DiscreteState z = newton_solve(P, zero);
  CHECK(z.u.values.norm() == 0.0);
  CHECK(z.iterations == 0);
  bool flagged = false;
  try {
    DiscreteState s = newton_solve(P, seed(P, lam, 10.0));
    flagged = s.note == "branch-jump";
  } catch (const Error& e) {
    flagged = true;
  }
  CHECK(flagged);
}

TEST_CASE("continuation follows the predicted law") {
  const double l0 = kPi * kPi / 4;
  Problem P = Problem::make(Kind::Dirichlet, 1.0, Grid::graded(512, 2e-5));
  DiscreteState s = newton_solve(P, seed(P, l0 + 0.05));
  ContinuationOptions opt;
  opt.stops = {l0 + 0.02};
  Branch br = continue_branch(P, s, l0 + 0.01, opt);
  CHECK(br.points.size() >= 3);
  CHECK(br.points.back().lambda == doctest::Approx(l0 + 0.01).epsilon(1e-14));
  bool hit = false;
  for (const auto& p : br.points) {
    CHECK(p.state.residual_norm < 1e-8);
    double pred = mu_of(ReducedConfig::make(Kind::Dirichlet, p.lambda), 1.0, {0, 0, 0});
    CHECK(p.measured_mu == doctest::Approx(pred).epsilon(0.05));
    hit = hit || std::abs(p.lambda - (l0 + 0.02)) < 1e-14;
  }
  CHECK(hit);
  for (bool f : br.fold_flags) CHECK_FALSE(f);

  auto path = std::filesystem::temp_directory_path() / "choquard_branch.csv";
  write_branch_csv(br, path.string(), [](double lam) { return mu_of(ReducedConfig::make(Kind::Dirichlet, lam), 1.0, {0, 0, 0}); });
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "lambda,measured_mu,predicted_mu,residual_norm,u_at_0");
  std::filesystem::remove(path);

  // a too coarse grid cannot carry a tiny bubble
  Problem coarse = Problem::make(Kind::Dirichlet, 1.0, Grid::graded(128, 1e-3));
  DiscreteState sc = newton_solve(coarse, seed(coarse, l0 + 0.05));
  CHECK_THROWS_WITH_AS(continue_branch(coarse, sc, l0 + 0.001), doctest::Contains("grid-underresolved"), Error);
}

TEST_CASE("projected correction") {
  std::vector<double> mus{0.04, 0.02, 0.01}, norms, sig;
  for (double mu : mus) {
    ProjectedCorrection pc = projected_correction(Kind::Dirichlet, mu, 1.0, 1.0, 512);
    CHECK(std::abs(pc.orthogonality) < 1e-10);
    CHECK(pc.contraction < 0.9);
    norms.push_back(pc.phi_norm);
    sig.push_back(pc.sigma_min);
  }
  CHECK(fitted_slope(mus, norms) == doctest::Approx(1.0).epsilon(0.2));
  CHECK(*std::max_element(sig.begin(), sig.end()) < 2 * *std::min_element(sig.begin(), sig.end()));
  ProjectedCorrection n = projected_correction(Kind::Neumann, 0.02, 1.5, 1.0, 512);
  CHECK(n.sigma_min > 0.1);
  CHECK(n.phi_norm < 0.05);
}
