#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "choquard/green.hpp"
#include "choquard/riesz.hpp"

namespace choquard {

/// Discretization shared by every state of one study: kind, exponent, grid
/// and the Riesz matrix on it.
struct Problem {
  Kind kind = Kind::Dirichlet;
  double alpha = 1.0;
  double a_hl = 0.0;
  GridPtr grid;
  std::shared_ptr<const RieszMatrix> riesz;

  static Problem make(Kind kind, double alpha, GridPtr grid);
};

struct DiscreteState {
  RadialField u;
  double lambda = 0.0;
  Kind kind = Kind::Dirichlet;
  double residual_norm = 0.0;  // sup |u - G N(u)| / sup |u|
  int iterations = 0;
  std::string note;            // e.g. "branch-jump" when Newton left the seed's branch
};

/// a_hl (W u+^{6-alpha}) u+^{5-alpha}
Eigen::VectorXd nonlinear(const Problem& P, const Eigen::VectorXd& u);
/// -Delta u -+ lambda u - N(u) by spectral differentiation (- Dirichlet, + Neumann).
RadialField residual(const Problem& P, const DiscreteState& s);
/// Integral form u - G_lambda N(u), which Newton drives to zero.
Eigen::VectorXd fixed_point_residual(const Problem& P, double lambda, const Eigen::VectorXd& u);
double fixed_point_norm(const Problem& P, double lambda, const Eigen::VectorXd& u);

/// N'(u) split into the two Choquard terms: (6-alpha) u^{5-alpha} W (u^{5-alpha} .)
/// and (5-alpha) (W u^{6-alpha}) u^{4-alpha}, each times a_hl.
struct Linearization {
  Eigen::MatrixXd nonlocal, local;
};
Linearization linearize(const Problem& P, const Eigen::VectorXd& u);
/// I - G_lambda N'(u)
Eigen::MatrixXd jacobian(const Problem& P, double lambda, const Eigen::VectorXd& u);

struct NewtonOptions {
  double tol = 1e-9;
  int max_iterations = 30;
};
DiscreteState newton_solve(const Problem& P, const DiscreteState& s0, const NewtonOptions& opt = {});

double measure_mu(const RadialField& u);
inline double measure_mu(const DiscreteState& s) { return measure_mu(s.u); }

struct BranchPoint {
  double lambda = 0.0;
  DiscreteState state;
  double measured_mu = 0.0;
};
struct Branch {
  std::vector<BranchPoint> points;
  std::vector<double> arclength_steps;
  std::vector<bool> fold_flags;
};

struct ContinuationOptions {
  double step = 0.1;      // initial arclength, in units where the lambda span is 1
  double min_step = 1e-4;
  double max_step = 1.0;
  int max_points = 200;
  std::vector<double> stops;  // lambdas the branch must land on exactly
  double tol = 1e-9;
};
Branch continue_branch(const Problem& P, const DiscreteState& start, double lambda_target,
                       const ContinuationOptions& opt = {});

/// lambda, measured_mu, predicted_mu, residual_norm, u_at_0
void write_branch_csv(const Branch& b, const std::string& path, const std::function<double(double)>& predicted);

struct ProjectedCorrection {
  double mu = 0.0;
  double mu_prime = 1.0;  // mu / epsilon with epsilon := mu
  RadialField phi;
  double phi_norm = 0.0;
  double multiplier = 0.0;
  double orthogonality = 0.0;  // <Z, phi>_{H^1} / (|Z| |phi|)
  double sigma_min = 0.0;
  double contraction = 0.0;
  int iterations = 0;
};

/// Bordered fixed-point solve of the projected problem around U with kernel
/// direction Z; zrep is the H^1 Riesz representative of Z as a density.
ProjectedCorrection projected_correction(const Problem& P, double lambda, const Eigen::VectorXd& U,
                                         const Eigen::VectorXd& zrep, double tol = 1e-10);
/// Around the ansatz U_{mu,0} with Z = dU/dmu.
ProjectedCorrection projected_correction(Kind kind, double mu, double lambda, double alpha, int nodes = 768);

}  // namespace choquard
