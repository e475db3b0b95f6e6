#pragma once

#include <functional>

namespace choquard {

using Fn = std::function<double(double)>;
/// Integrand that also receives the exact distance of the abscissa from the
/// singular endpoint.
using SingularFn = std::function<double(double, double)>;

/// Adaptive Gauss-Kronrod on a finite interval.  Throws
/// quadrature-tolerance-not-met when the error estimate exceeds tol_abs.
double integrate_gk(const Fn& f, double a, double b, double tol_abs, double* err = nullptr);

/// Tanh-sinh on [a,b] for integrands singular at one endpoint.
double integrate_endpoint(const SingularFn& f, double a, double b, bool singular_at_a, double tol_abs,
                          double* err = nullptr);

/// Integral over [R, inf) after the substitution s = 1/t.
double integrate_tail(const Fn& f, double R, double tol_abs, double* err = nullptr);

}  // namespace choquard
