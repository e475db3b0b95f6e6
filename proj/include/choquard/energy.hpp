#pragma once

#include <array>
#include <map>
#include <vector>

#include "choquard/grid.hpp"
#include "choquard/riesz.hpp"

namespace choquard {

struct EnergyCoefficients {
  double alpha = 1.0;
  double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
  std::array<double, 4> error{};  // quadrature error estimates, a0..a3
  double a3_radius = 1.0;         // ball (bubble units) regularizing the w^4 integral
  std::map<double, double> a3_sensitivity;
  double gamma() const { return a1 / (2.0 * a2); }
};

EnergyCoefficients coefficients(double alpha, double a3_radius = 1.0);
/// Memoized coefficients at the default radius.
const EnergyCoefficients& cached_coefficients(double alpha);

struct EnergyValue {
  double value = 0;
  // signed contributions; value is their sum
  double gradient_term = 0, mass_term = 0, interaction_term = 0;
};

/// J(u) = 1/2 int |grad u|^2 -+ lambda/2 int u^2 - a_hl/(2(6-alpha)) HLS(u+^{6-alpha})
/// over the unit ball; minus for Dirichlet, plus for Neumann.
EnergyValue functional(const RadialField& u, double lambda, Kind kind, double alpha);
EnergyValue functional(const RadialField& u, double lambda, Kind kind, const RieszMatrix& m);

/// |J(U_mu) - (a0 + a1 mu g +- a2 lambda mu^2 - a3 mu^2 g^2)| over mu_list.
ExpansionReport energy_expansion_check(double alpha, double lambda, const std::vector<double>& mu_list, Kind kind,
                                       bool drop_linear = false, int nodes = 1024);

}  // namespace choquard
