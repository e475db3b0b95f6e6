#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "choquard/common.hpp"
#include "choquard/grid.hpp"

namespace choquard {

/// Regular part and Robin function of the Green function of -Delta - lambda
/// (Dirichlet) or -Delta + lambda (Neumann) on the unit ball, by spherical
/// Bessel series with the lambda = 0 image series summed in closed form.
class RobinEvaluator {
 public:
  RobinEvaluator(Kind kind, double lambda, int l_max = 80, double tol = 1e-9);

  Kind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  int l_max() const { return l_max_; }
  double tolerance() const { return tol_; }

  double robin(const Vec3& xi) const;
  double regular_part(const Vec3& x, const Vec3& xi) const;

 private:
  // sum over l = 0..L of t^l P_l(c) c_l(a, b), Kummer-subtracted
  double series(double ra, double rb, double c, int L) const;
  double converged(double ra, double rb, double c) const;

  Kind kind_;
  double lambda_, k_;
  int l_max_;
  double tol_;
  std::vector<double> ratio_;  // Y_l(k)/J_l(k) or Q_l, l = 0..l_max+10
};

inline double robin(const RobinEvaluator& e, const Vec3& xi) { return e.robin(xi); }
inline double regular_part(const RobinEvaluator& e, const Vec3& x, const Vec3& xi) {
  return e.regular_part(x, xi);
}

/// Closed forms of the Robin function at the centre.
double robin_center(Kind kind, double lambda);
/// d/dlambda of robin_center.
double robin_center_slope(Kind kind, double lambda);

/// Dirichlet: largest lambda in (0, pi^2) with g_lambda(0) >= 0.  Neumann:
/// smallest lambda with g^lambda(0) >= 0.  Bisection on the series at the
/// centre, tolerance 1e-10.
double lambda_star(Kind kind);

/// Radial decaying solution of -Delta D = lambda 3^{1/4} (1/sqrt(1+z^2) - 1/z).
struct D0Profile {
  double lambda = 0.0;
  GridPtr grid;  // z in [0, z_max]
  Eigen::VectorXd values;
  double operator()(double z) const;
};
D0Profile d0(double lambda);
/// Closed form, for checks.
double d0_exact(double lambda, double z);

/// Robin values tabulated at scattered points, served by inverse-distance
/// weighting (exact at the nodes).
struct RobinTable {
  std::vector<Vec3> points;
  std::vector<double> values;
  double operator()(const Vec3& xi) const;
};
RobinTable load_robin_table(const std::string& path);

/// Radial Green operator of -Delta - lambda (Dirichlet, u(1) = 0) or
/// -Delta + lambda (Neumann, u'(1) = 0) on the unit ball, applied on a Grid by
/// product integration against the two homogeneous solutions.
class RadialGreen {
 public:
  RadialGreen(Kind kind, double lambda, GridPtr grid);

  Kind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  const GridPtr& grid() const { return grid_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& f) const;
  /// Dense matrix of apply.
  Eigen::MatrixXd matrix() const;
  /// Homogeneous solution with u(1) = 1 (Dirichlet) or u'(1) = 1 (Neumann).
  Eigen::VectorXd lift() const;
  double lift_at(double r) const;

 private:
  Kind kind_;
  double lambda_, k_, wr_;
  GridPtr grid_;
  Eigen::VectorXd phi_, chi_;
};

}  // namespace choquard
