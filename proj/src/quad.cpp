#include "choquard/quad.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "choquard/common.hpp"

namespace choquard {

namespace {
// the absolute target is relaxed to a few ulps of the L1 norm, below which
// the level-difference estimates are roundoff
void check(double err, double tol_abs, double L1, const char* where) {
  if (!std::isfinite(err) || !(err <= std::max(tol_abs, 1e-11 * L1))) {
    std::ostringstream os;
    os << where << " error estimate " << err << " exceeds " << tol_abs;
    throw Error("quadrature-tolerance-not-met", os.str());
  }
}
}  // namespace

double integrate_gk(const Fn& f, double a, double b, double tol_abs, double* err) {
  if (a == b) {
    if (err) *err = 0;
    return 0.0;
  }
  double e = 0, L1 = 0;
  double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-13, &e, &L1);
  if (e > tol_abs) {
    // error estimates of the 31-point pair are pessimistic on smooth pieces;
    // a split halves the scale before giving up.
    double m = 0.5 * (a + b), e1 = 0, e2 = 0;
    v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, m, 15, 1e-13, &e1, &L1) +
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, m, b, 15, 1e-13, &e2, &L1);
    e = e1 + e2;
  }
  check(e, tol_abs, L1, "gauss-kronrod");
  if (err) *err = e;
  return v;
}

double integrate_endpoint(const SingularFn& f, double a, double b, bool singular_at_a, double tol_abs,
                          double* err) {
  if (a == b) {
    if (err) *err = 0;
    return 0.0;
  }
  static thread_local boost::math::quadrature::tanh_sinh<double> ts(18);
  const double L = b - a;
  auto g = [&](double x, double xc) {
    double d = singular_at_a ? (xc < 0 ? -xc : L - xc) : (xc > 0 ? xc : L + xc);
    return f(x, d);
  };
  double e = 0, L1 = 0;
  size_t levels = 0;
  double v = ts.integrate(g, a, b, 1e-13, &e, &L1, &levels);
  if (!(e <= std::max(tol_abs, 1e-11 * L1))) {
    // the truncation term of the estimate is pessimistic for strong power
    // singularities on short intervals; d = u^2 softens the singularity
    const double U = std::sqrt(L);
    auto h = [&](double, double uc) {
      double du = uc < 0 ? -uc : U - uc;
      double d = du * du;
      if (d == 0.0) return 0.0;
      double x = singular_at_a ? a + d : b - d;
      return 2.0 * du * f(x, d);
    };
    double e2 = 0, L12 = 0;
    double v2 = ts.integrate(h, 0.0, U, 1e-13, &e2, &L12, &levels);
    if (e2 < e) v = v2, e = e2, L1 = L12;
  }
  check(e, tol_abs, L1, "tanh-sinh");
  if (err) *err = e;
  return v;
}

double integrate_tail(const Fn& f, double R, double tol_abs, double* err) {
  // t -> 0 is an algebraic endpoint of the mapped integrand
  auto g = [&](double t, double) {
    if (t < 1e-30) return 0.0;
    double s = 1.0 / t;
    return f(s) * s * s;
  };
  return integrate_endpoint(g, 0.0, 1.0 / R, true, tol_abs, err);
}

}  // namespace choquard
