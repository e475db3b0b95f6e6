#include "choquard/green.hpp"

#include <fstream>
#include <sstream>

#include "choquard/quad.hpp"

namespace choquard {

namespace {

// Spherical Bessel functions normalized to 1 at the origin:
//   J_l = (2l+1)!! j_l / x^l,   I_l = (2l+1)!! i_l / x^l.
// Filled for l = 0..L by the minimal (downward) recurrence started from the
// power series two orders above.
void regular_bessel(double x, int L, bool modified, std::vector<double>& out) {
  const double s = modified ? 1.0 : -1.0;
  auto series = [&](int l) {
    double term = 1.0, sum = 1.0;
    for (int m = 1; m < 200; ++m) {
      term *= s * 0.5 * x * x / (m * (2.0 * l + 2 * m + 1));
      sum += term;
      if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
  };
  out.assign(L + 2, 0.0);
  out[L + 1] = series(L + 1);
  out[L] = series(L);
  for (int l = L; l >= 1; --l) out[l - 1] = out[l] + s * x * x * out[l + 1] / ((2.0 * l + 1) * (2.0 * l + 3));
  out.resize(L + 1);
}

// Irregular companions by the dominant (upward) recurrence:
//   Y_l = x^{l+1} y_l / (2l-1)!!,  K_l = x^{l+1} e^{...} normalized with K_0 = e^{-x}.
void irregular_bessel(double x, int L, bool modified, std::vector<double>& out) {
  out.assign(L + 2, 0.0);
  if (modified) {
    out[0] = std::exp(-x);
    out[1] = std::exp(-x) * (1.0 + x);
  } else {
    out[0] = -std::cos(x);
    out[1] = -std::cos(x) - x * std::sin(x);
  }
  const double s = modified ? 1.0 : -1.0;
  for (int l = 1; l <= L; ++l) out[l + 1] = out[l] + s * out[l - 1] * x * x / ((2.0 * l + 1) * (2.0 * l - 1));
}

constexpr double kResonance = 1e-6;

}  // namespace

RobinEvaluator::RobinEvaluator(Kind kind, double lambda, int l_max, double tol)
    : kind_(kind), lambda_(lambda), k_(std::sqrt(lambda)), l_max_(l_max), tol_(tol) {
  if (!(lambda > 0)) throw Error("invalid-lambda", "lambda must be positive");
  if (l_max < 2) throw Error("invalid-truncation", "l_max must be at least 2");
  const int L = l_max + 10;
  std::vector<double> reg, irr;
  if (kind == Kind::Dirichlet) {
    if (std::abs(lambda - kPi * kPi) < kResonance) throw Error("resonance", "lambda at the first eigenvalue");
    if (lambda > kPi * kPi) throw Error("invalid-lambda", "Dirichlet lambda must lie below pi^2");
    regular_bessel(k_, L, false, reg);
    irregular_bessel(k_, L, false, irr);
    ratio_.resize(L + 1);
    for (int l = 0; l <= L; ++l) ratio_[l] = irr[l] / reg[l];
  } else {
    regular_bessel(k_, L + 1, true, reg);
    irregular_bessel(k_, L, true, irr);
    ratio_.resize(L + 1);
    for (int l = 0; l <= L; ++l)
      ratio_[l] = (l * irr[l] - (2.0 * l + 1) * irr[l + 1]) / (l * reg[l] + k_ * k_ * reg[l + 1] / (2.0 * l + 3));
  }
}

double RobinEvaluator::series(double ra, double rb, double c, int L) const {
  const bool neu = kind_ == Kind::Neumann;
  std::vector<double> ja, jb;
  regular_bessel(k_ * ra, L, neu, ja);
  regular_bessel(k_ * rb, L, neu, jb);
  const double t = ra * rb;
  double acc = 0, tl = 1.0, p0 = 1.0, p1 = c;
  for (int l = 0; l <= L; ++l) {
    double pl = l == 0 ? 1.0 : p1;
    if (l >= 2) {
      pl = ((2.0 * l - 1) * c * p1 - (l - 1.0) * p0) / l;
      p0 = p1;
      p1 = pl;
    }
    double coef;
    if (!neu)
      coef = -ja[l] * jb[l] * ratio_[l] - 1.0;
    else
      coef = ratio_[l] * ja[l] * jb[l] + (l == 0 ? 0.0 : (l + 1.0) / l);
    acc += tl * pl * coef;
    tl *= t;
    if (tl == 0.0) break;
  }
  return acc;
}

double RobinEvaluator::converged(double ra, double rb, double c) const {
  double a = series(ra, rb, c, l_max_);
  double b = series(ra, rb, c, l_max_ + 10);
  if (std::abs(a - b) > tol_) {
    std::ostringstream os;
    os << "truncation change " << std::abs(a - b) << " at l_max " << l_max_;
    throw Error("series-not-converged", os.str());
  }
  return b;
}

double RobinEvaluator::regular_part(const Vec3& x, const Vec3& xi) const {
  const double ra = norm(x), rb = norm(xi);
  if (!(ra < 1.0 && rb < 1.0)) throw Error("out-of-domain", "points must lie inside the unit ball");
  const double d = dist(x, xi);
  double c = 1.0;
  if (ra > 0 && rb > 0) c = std::clamp((x[0] * xi[0] + x[1] * xi[1] + x[2] * xi[2]) / (ra * rb), -1.0, 1.0);
  const double t = ra * rb;
  const double root = std::sqrt(std::max(0.0, 1.0 - 2.0 * t * c + t * t));
  double sing;
  if (kind_ == Kind::Dirichlet)
    sing = d > 1e-8 ? (1.0 - std::cos(k_ * d)) / d : 0.5 * k_ * k_ * d;
  else
    sing = d > 1e-8 ? -std::expm1(-k_ * d) / d : k_ * (1.0 - 0.5 * k_ * d);
  double image;
  if (kind_ == Kind::Dirichlet)
    image = 1.0 / root;
  else
    image = -(1.0 / root - 1.0) - std::log(2.0 / (1.0 - t * c + root));
  return (sing + image + converged(ra, rb, c)) / (4.0 * kPi);
}

double RobinEvaluator::robin(const Vec3& xi) const { return regular_part(xi, xi); }

double robin_center(Kind kind, double lambda) {
  const double k = std::sqrt(lambda);
  if (kind == Kind::Dirichlet) return k / std::tan(k) / (4.0 * kPi);
  return k / (4.0 * kPi) * (1.0 - (k + 1.0) * std::exp(-k) / (k * std::cosh(k) - std::sinh(k)));
}

double robin_center_slope(Kind kind, double lambda) {
  const double h = 1e-5 * std::max(1.0, lambda);
  return (robin_center(kind, lambda - 2 * h) - 8 * robin_center(kind, lambda - h) +
          8 * robin_center(kind, lambda + h) - robin_center(kind, lambda + 2 * h)) /
         (12 * h);
}

double lambda_star(Kind kind) {
  double lo, hi;
  if (kind == Kind::Dirichlet) {
    lo = 0.5;
    hi = kPi * kPi - 0.05;
  } else {
    lo = 0.05;
    hi = 20.0;
  }
  auto g = [kind](double lam) { return RobinEvaluator(kind, lam).robin({0, 0, 0}); };
  double glo = g(lo), ghi = g(hi);
  if (glo * ghi >= 0) throw Error("no-sign-change", "Robin function at the centre does not change sign");
  while (hi - lo > 1e-10) {
    double mid = 0.5 * (lo + hi);
    double gm = g(mid);
    if ((gm < 0) == (glo < 0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------

namespace {
constexpr double kZmax = 1e6;

double d0_tail(double lambda, double z) { return -lambda * kC3 * (0.5 + std::log(2.0 * z)) / (2.0 * z); }
}  // namespace

double d0_exact(double lambda, double z) {
  if (z == 0.0) return -lambda * kC3;
  if (z > 1e4) return d0_tail(lambda, z) - lambda * kC3 * (std::log(2 * z) / 2 - 0.25) / (4 * z * z * z);
  const double q = std::sqrt(1.0 + z * z);
  double A;
  if (z < 1e-2) {
    // r sqrt(1+r^2) - asinh r = 2r^3/3 - r^5/5 + ...
    double z2 = z * z;
    A = 0.5 * z * z2 * (2.0 / 3 - z2 / 5 + z2 * z2 / 14 - z2 * z2 * z2 * 5 / 144) - 0.5 * z2;
  } else {
    A = 0.5 * (z * q - std::asinh(z)) - 0.5 * z * z;
  }
  return lambda * kC3 * (A / z + z - q);
}

D0Profile d0(double lambda) {
  if (!(lambda > 0)) throw Error("invalid-lambda", "lambda must be positive");
  std::vector<double> br{0.0};
  double h = 0.05;
  while (br.back() < kZmax) {
    br.push_back(std::min(kZmax, br.back() + h));
    h *= 1.25;
  }
  auto grid = std::make_shared<const Grid>(br, 8);
  const double c = lambda * kC3;
  // s^2 F and s F with the cancellation removed
  Eigen::VectorXd s2f = grid->sample([c](double s) {
    double q = std::sqrt(1.0 + s * s);
    return -c * s / (q * (s + q));
  });
  Eigen::VectorXd sf = grid->sample([c](double s) {
    double q = std::sqrt(1.0 + s * s);
    return -c / (q * (s + q));
  });
  Eigen::VectorXd inner = grid->cumulative(s2f);
  Eigen::VectorXd outer = grid->cumulative(sf);
  // integral of s F over [z_max, inf): -c/(2 z_max) (1 - 1/(6 z_max^2))
  const double tail = -c / (2.0 * kZmax);
  const double total = grid->integrate(sf) + tail;
  D0Profile out;
  out.lambda = lambda;
  out.grid = grid;
  out.values.resize(grid->size());
  for (int i = 0; i < grid->size(); ++i) out.values[i] = inner[i] / grid->r()[i] + (total - outer[i]);
  return out;
}

double D0Profile::operator()(double z) const {
  if (z > grid->radius()) return d0_tail(lambda, z);
  return grid->interpolate(values, z);
}

// ---------------------------------------------------------------------------

double RobinTable::operator()(const Vec3& xi) const {
  if (points.empty()) throw Error("empty-table", "no Robin samples loaded");
  double num = 0, den = 0;
  for (size_t i = 0; i < points.size(); ++i) {
    double d = dist(points[i], xi);
    if (d < 1e-14) return values[i];
    double w = 1.0 / (d * d);
    num += w * values[i];
    den += w;
  }
  return num / den;
}

RobinTable load_robin_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open " + path);
  RobinTable t;
  std::string line;
  if (!std::getline(in, line)) throw Error("bad-table", "missing header row");
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::stringstream ss(line);
    std::string cell;
    double v[4];
    for (int c = 0; c < 4; ++c) {
      if (!std::getline(ss, cell, ',')) throw Error("bad-table", "row " + std::to_string(row) + " has < 4 columns");
      try {
        v[c] = std::stod(cell);
      } catch (const std::exception&) {
        throw Error("bad-table", "row " + std::to_string(row) + ": not a number: " + cell);
      }
    }
    t.points.push_back({v[0], v[1], v[2]});
    t.values.push_back(v[3]);
  }
  if (t.points.empty()) throw Error("bad-table", "no data rows");
  return t;
}

// ---------------------------------------------------------------------------

RadialGreen::RadialGreen(Kind kind, double lambda, GridPtr grid)
    : kind_(kind), lambda_(lambda), k_(std::sqrt(std::max(lambda, 0.0))), grid_(std::move(grid)) {
  if (std::abs(grid_->radius() - 1.0) > 1e-14) throw Error("invalid-grid", "Green operator lives on [0,1]");
  const auto& r = grid_->r();
  const double k = k_;
  phi_.resize(r.size());
  chi_.resize(r.size());
  if (kind == Kind::Dirichlet) {
    if (!(lambda >= 0 && lambda < kPi * kPi)) throw Error("indefinite-operator", "need 0 <= lambda < pi^2");
    auto s = [k](double x) { return k > 0 ? std::sin(k * x) / k : x; };
    for (int i = 0; i < r.size(); ++i) {
      phi_[i] = s(r[i]);
      chi_[i] = s(1.0 - r[i]);
    }
    wr_ = s(1.0);
  } else {
    if (!(lambda > 0)) throw Error("indefinite-operator", "need lambda > 0");
    for (int i = 0; i < r.size(); ++i) {
      phi_[i] = std::sinh(k * r[i]) / k;
      chi_[i] = std::cosh(k * (1.0 - r[i])) - std::sinh(k * (1.0 - r[i])) / k;
    }
    wr_ = std::cosh(k) - std::sinh(k) / k;
  }
}

Eigen::VectorXd RadialGreen::apply(const Eigen::VectorXd& f) const {
  const auto& r = grid_->r();
  if (f.size() != r.size()) throw Error("grid-mismatch", "vector length differs from grid");
  Eigen::VectorXd a = phi_.cwiseProduct(r).cwiseProduct(f);
  Eigen::VectorXd b = chi_.cwiseProduct(r).cwiseProduct(f);
  Eigen::VectorXd A = grid_->cumulative(a);
  Eigen::VectorXd B = grid_->cumulative(b);
  const double Bt = grid_->integrate(b);
  Eigen::VectorXd u(r.size());
  for (int i = 0; i < r.size(); ++i) u[i] = (chi_[i] * A[i] + phi_[i] * (Bt - B[i])) / (wr_ * r[i]);
  return u;
}

Eigen::MatrixXd RadialGreen::matrix() const {
  const int n = grid_->size(), m = grid_->order();
  const auto& r = grid_->r();
  const auto& w = grid_->w();
  const Eigen::MatrixXd& C = grid_->ref_cumulative();
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i) {
    const int p = i / m, a = i % m;
    const double h2 = 0.5 * grid_->panel_width(p);
    const double ci = chi_[i] / (wr_ * r[i]), pi = phi_[i] / (wr_ * r[i]);
    for (int j = 0; j < n; ++j) {
      const int q = j / m;
      double lo;  // weight of node j in the integral over [0, r_i]
      if (q < p)
        lo = w[j];
      else if (q > p)
        lo = 0.0;
      else
        lo = h2 * C(a, j % m);
      G(i, j) = r[j] * (ci * lo * phi_[j] + pi * (w[j] - lo) * chi_[j]);
    }
  }
  return G;
}

Eigen::VectorXd RadialGreen::lift() const {
  Eigen::VectorXd u(grid_->size());
  for (int i = 0; i < u.size(); ++i) u[i] = lift_at(grid_->r()[i]);
  return u;
}

double RadialGreen::lift_at(double r) const {
  const double k = k_;
  if (kind_ == Kind::Dirichlet) {
    if (k == 0) return 1.0;
    double ph = r > 0 ? std::sin(k * r) / (k * r) : 1.0;
    return ph / (std::sin(k) / k);
  }
  double ph = r > 0 ? std::sinh(k * r) / (k * r) : 1.0;
  return ph / wr_;
}

}  // namespace choquard
