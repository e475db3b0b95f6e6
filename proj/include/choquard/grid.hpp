#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "choquard/common.hpp"

namespace choquard {

/// Gauss-Legendre rule on [-1,1], nodes ascending.
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};
const GaussRule& gauss_legendre(int n);

/// Legendre polynomials P_0..P_n at x.
void legendre_values(int n, double x, double* out);

/// Composite Gauss-Legendre panels on [0, R].  Nodes are the panel Gauss
/// points; functions are represented by their nodal values and interpolated
/// panel-wise by the degree (order-1) Lagrange polynomial.
class Grid {
 public:
  Grid(std::vector<double> breaks, int order);

  /// Geometrically graded panels: first panel width h0, constant growth
  /// ratio, `n_nodes / order` panels reaching R exactly.
  static std::shared_ptr<const Grid> graded(int n_nodes, double h0, double R = 1.0, int order = 8);

  int size() const { return static_cast<int>(r_.size()); }
  int order() const { return order_; }
  int panels() const { return static_cast<int>(breaks_.size()) - 1; }
  double radius() const { return breaks_.back(); }
  double min_cell() const { return breaks_[1] - breaks_[0]; }
  double growth() const;
  const std::vector<double>& breaks() const { return breaks_; }
  const Eigen::VectorXd& r() const { return r_; }
  /// dr-weights of the composite rule.
  const Eigen::VectorXd& w() const { return w_; }
  /// 4 pi r^2 dr weights, i.e. volume weights for radial functions.
  const Eigen::VectorXd& vol() const { return vol_; }

  int panel_of(double x) const;
  double panel_width(int p) const { return breaks_[p + 1] - breaks_[p]; }

  /// Lagrange basis on reference nodes at t in [-1,1].
  void basis(double t, double* out) const;
  double interpolate(const Eigen::VectorXd& v, double x) const;
  Eigen::VectorXd derivative(const Eigen::VectorXd& v) const;
  /// u'' + 2u'/r.
  Eigen::VectorXd laplacian(const Eigen::VectorXd& v) const;
  /// (C v)_i = integral over [0, r_i] of the interpolant of v.
  Eigen::VectorXd cumulative(const Eigen::VectorXd& v) const;
  double integrate(const Eigen::VectorXd& v) const { return w_.dot(v); }
  double integrate_volume(const Eigen::VectorXd& v) const { return vol_.dot(v); }
  Eigen::VectorXd sample(const std::function<double(double)>& f) const;

  const Eigen::MatrixXd& ref_diff() const { return diff_; }
  const Eigen::MatrixXd& ref_cumulative() const { return cum_; }
  const std::vector<double>& ref_nodes() const { return gauss_legendre(order_).x; }

 private:
  int order_;
  std::vector<double> breaks_;
  Eigen::VectorXd r_, w_, vol_;
  std::vector<double> bary_;
  Eigen::MatrixXd diff_, cum_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// A radial function sampled on a Grid, with an optional algebraic tail
/// c r^{-p} beyond the grid radius.
struct RadialField {
  GridPtr grid;
  Eigen::VectorXd values;
  std::optional<double> tail_exponent;

  RadialField() = default;
  RadialField(GridPtr g, Eigen::VectorXd v, std::optional<double> tail = std::nullopt);
  double operator()(double r) const;
  int size() const { return static_cast<int>(values.size()); }
};

}  // namespace choquard
