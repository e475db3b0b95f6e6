#pragma once

#include <Eigen/Dense>

#include "choquard/grid.hpp"
#include "choquard/quad.hpp"

namespace choquard {

/// (exp(pL) - 1) / p, continuous through p = 0.
inline double expm1_ratio(double p, double L) {
  double x = p * L;
  if (std::abs(x) < 1e-9) return L * (1.0 + 0.5 * x);
  return std::expm1(x) / p;
}

/// [(r+s)^{2-alpha} - |r-s|^{2-alpha}] / (2-alpha); d = |r-s| supplied
/// exactly by the caller.  At alpha = 2 this is log((r+s)/|r-s|).
double riesz_bracket(double r, double s, double d, double alpha);

/// Angular average: the radial density such that the Riesz potential of a
/// radial f at radius r equals  integral over s of kernel(r,s) f(s) ds.
double riesz_kernel(double r, double s, double d, double alpha);

/// Full-space Riesz potential of a radial function given on [0, inf).
/// R_max splits the algebraic tail, which is integrated after s = 1/t.
double riesz_radial(const Fn& f, double r, double alpha, double R_max = 50.0, double tol = 1e-10);

/// Riesz potential restricted to the ball of radius R (pointwise).
double riesz_radial_ball(const Fn& f, double r, double alpha, double R = 1.0, double tol = 1e-10);

/// Dense discretization of the ball-restricted Riesz potential on a Grid.
/// S is the symmetric bilinear form: sum_ij g_i S_ij f_j approximates
/// (1/4pi) times the double integral of g(x) f(y) |x-y|^{-alpha}.
/// W = diag(1/(w_i r_i^2)) S gives pointwise potentials at the nodes.
struct RieszMatrix {
  double alpha = 1.0;
  GridPtr grid;
  Eigen::MatrixXd S;
  Eigen::MatrixXd W;
};

RieszMatrix build_riesz_matrix(GridPtr grid, double alpha);

RadialField riesz_apply(const RieszMatrix& m, const RadialField& f);
Eigen::VectorXd riesz_apply(const RieszMatrix& m, const Eigen::VectorXd& f);

/// Double integral of f(x) g(y) / |x-y|^alpha over the ball.
double hls_energy(const RieszMatrix& m, const Eigen::VectorXd& f, const Eigen::VectorXd& g);
double hls_energy(const RieszMatrix& m, const RadialField& f, const RadialField& g);
/// Fields without tails: the ball of the grid radius.  Fields with tails:
/// all of R^3, by nested adaptive quadrature.
double hls_energy(const RadialField& f, const RadialField& g, double alpha);
double hls_energy_full(const Fn& f, const Fn& g, double alpha, double tol = 1e-9);
double hls_energy_full_split(const Fn& f, const Fn& g, double alpha, double R_max, double tol);

/// Sobolev-HLS quotient evaluated on the bubble.  With normalized = true the
/// interaction carries the factor a_hl.
double sharp_constant_shl(double alpha, bool normalized = false);

/// Singular moment tables (exposed for tests).
/// M_ab = integral over [-1,1]^2 of P_a(x) P_b(y) E_p(log|x-y|).
const Eigen::MatrixXd& moments_same(double p, int degree);
/// N_ab = integral over [0,1]^2 of P_a(2u-1) P_b(2v-1) E_p(log(u + beta v)).
const Eigen::MatrixXd& moments_corner(double p, double beta, int degree);

}  // namespace choquard
