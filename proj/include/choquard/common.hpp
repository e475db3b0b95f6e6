#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace choquard {

inline constexpr double kPi = std::numbers::pi;
// 3^{1/4}
inline constexpr double kC3 = 1.3160740129524924608;

using Vec3 = std::array<double, 3>;

inline double norm(const Vec3& x) { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }
inline double dist(const Vec3& x, const Vec3& y) {
  return norm(Vec3{x[0] - y[0], x[1] - y[1], x[2] - y[2]});
}

enum class Kind { Dirichlet, Neumann };

inline const char* to_string(Kind k) { return k == Kind::Dirichlet ? "dirichlet" : "neumann"; }

/// Failure with a stable machine-readable code, e.g. "series-not-converged".
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& detail)
      : std::runtime_error(code + ": " + detail), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// Measured residuals against a decreasing parameter sequence, with the
/// least-squares slope on log-log axes.
struct ExpansionReport {
  Kind kind = Kind::Dirichlet;
  double alpha = 1.0;
  double lambda = 0.0;
  std::vector<double> mu;
  std::vector<double> residual;
  double fitted_order = 0.0;
};

/// Least-squares slope of log(y) against log(x).
double fitted_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace choquard
