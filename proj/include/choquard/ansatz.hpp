#pragma once

#include <vector>

#include "choquard/bubble.hpp"
#include "choquard/grid.hpp"

namespace choquard {

/// Riesz potential of w^{6-alpha} restricted to the complement of the unit
/// ball, at radius r <= 1 (xi at the origin).
double exterior_tail(const Bubble& b, double r, double tol = 1e-12);
Eigen::VectorXd exterior_tail(const Bubble& b, const Grid& grid);

/// pi_{mu,0} (Dirichlet) or Theta_{mu,0} (Neumann) on a Grid over [0,1].
struct CorrectionField {
  Kind kind = Kind::Dirichlet;
  double mu = 0.0, lambda = 0.0, alpha = 1.0;
  RadialField values;
  /// Residual of the equation in flux form, relative to the integrated
  /// magnitude of its right-hand side.
  double residual = 0.0;
};

/// Default grid for a bubble of scale mu: first panel mu/20.
GridPtr bubble_grid(double mu, int nodes = 1024);

CorrectionField solve_correction(Kind kind, double mu, double lambda, double alpha, GridPtr grid);
CorrectionField solve_correction(Kind kind, double mu, double lambda, double alpha, int nodes = 1024);

/// Right-hand side of the correction problem on the grid.
Eigen::VectorXd correction_rhs(Kind kind, double mu, double lambda, double alpha, const Grid& grid);

/// U = w + correction, and -Delta U evaluated from the equations.
RadialField ansatz(const CorrectionField& c);
Eigen::VectorXd ansatz_laplacian(const CorrectionField& c);

/// Residual of mu^{-1/2} correction against -4 pi 3^{1/4} H(x,0) +- mu D0(x/mu)
/// (sign + Dirichlet, - Neumann) over a fixed interior radius set.
ExpansionReport ansatz_expansion_check(Kind kind, double lambda, double alpha, const std::vector<double>& mu_list,
                                       bool with_d0 = true, int nodes = 1024);

/// Radii at which the correction expansion is compared.
const std::vector<double>& expansion_radii();

}  // namespace choquard
