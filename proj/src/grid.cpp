#include "choquard/grid.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>

namespace choquard {

const GaussRule& gauss_legendre(int n) {
  static std::mutex mtx;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(n);
  std::vector<std::pair<double, double>> pts(n);
  for (int i = 0; i < n; ++i) gsl_integration_glfixed_point(-1.0, 1.0, i, &pts[i].first, &pts[i].second, t);
  gsl_integration_glfixed_table_free(t);
  std::sort(pts.begin(), pts.end());
  GaussRule rule;
  for (auto& [x, w] : pts) {
    rule.x.push_back(x);
    rule.w.push_back(w);
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

void legendre_values(int n, double x, double* out) {
  out[0] = 1.0;
  if (n == 0) return;
  out[1] = x;
  for (int l = 1; l < n; ++l) out[l + 1] = ((2 * l + 1) * x * out[l] - l * out[l - 1]) / (l + 1);
}

Grid::Grid(std::vector<double> breaks, int order) : order_(order), breaks_(std::move(breaks)) {
  if (breaks_.size() < 2 || order_ < 2) throw Error("invalid-grid", "need at least one panel");
  for (size_t k = 1; k < breaks_.size(); ++k)
    if (!(breaks_[k] > breaks_[k - 1])) throw Error("invalid-grid", "breaks must increase");
  if (breaks_[0] < 0) throw Error("invalid-grid", "negative radius");

  const GaussRule& g = gauss_legendre(order_);
  const int P = panels();
  r_.resize(P * order_);
  w_.resize(P * order_);
  for (int p = 0; p < P; ++p) {
    double a = breaks_[p], h = breaks_[p + 1] - a;
    for (int k = 0; k < order_; ++k) {
      r_[p * order_ + k] = a + 0.5 * h * (1.0 + g.x[k]);
      w_[p * order_ + k] = 0.5 * h * g.w[k];
    }
  }
  vol_ = (4.0 * kPi) * w_.cwiseProduct(r_.cwiseProduct(r_));

  bary_.assign(order_, 1.0);
  for (int j = 0; j < order_; ++j)
    for (int k = 0; k < order_; ++k)
      if (k != j) bary_[j] /= (g.x[j] - g.x[k]);

  diff_.setZero(order_, order_);
  for (int i = 0; i < order_; ++i) {
    double sum = 0;
    for (int j = 0; j < order_; ++j) {
      if (i == j) continue;
      diff_(i, j) = (bary_[j] / bary_[i]) / (g.x[i] - g.x[j]);
      sum += diff_(i, j);
    }
    diff_(i, i) = -sum;
  }

  cum_.setZero(order_, order_);
  std::vector<double> b(order_);
  for (int i = 0; i < order_; ++i) {
    double lo = -1.0, hi = g.x[i];
    for (int k = 0; k < order_; ++k) {
      double t = lo + 0.5 * (hi - lo) * (1.0 + g.x[k]);
      basis(t, b.data());
      for (int j = 0; j < order_; ++j) cum_(i, j) += 0.5 * (hi - lo) * g.w[k] * b[j];
    }
  }
}

std::shared_ptr<const Grid> Grid::graded(int n_nodes, double h0, double R, int order) {
  int K = std::max(1, n_nodes / order);
  std::vector<double> br(K + 1);
  br[0] = 0.0;
  if (h0 * K >= R) {
    for (int k = 0; k <= K; ++k) br[k] = R * k / K;
    return std::make_shared<const Grid>(br, order);
  }
  auto span = [&](double q) { return h0 * (std::pow(q, K) - 1.0) / (q - 1.0); };
  double lo = 1.0 + 1e-14, hi = 2.0;
  while (span(hi) < R) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (span(mid) < R ? lo : hi) = mid;
  }
  double q = 0.5 * (lo + hi);
  double width = h0;
  for (int k = 1; k <= K; ++k) {
    br[k] = br[k - 1] + width;
    width *= q;
  }
  for (int k = 1; k < K; ++k) br[k] *= R / br[K];
  br[K] = R;
  return std::make_shared<const Grid>(br, order);
}

double Grid::growth() const {
  if (panels() < 2) return 1.0;
  return panel_width(1) / panel_width(0);
}

int Grid::panel_of(double x) const {
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
  int p = static_cast<int>(it - breaks_.begin()) - 1;
  return std::clamp(p, 0, panels() - 1);
}

void Grid::basis(double t, double* out) const {
  const auto& x = gauss_legendre(order_).x;
  double denom = 0;
  for (int j = 0; j < order_; ++j) {
    double d = t - x[j];
    if (d == 0.0) {
      std::fill(out, out + order_, 0.0);
      out[j] = 1.0;
      return;
    }
    out[j] = bary_[j] / d;
    denom += out[j];
  }
  for (int j = 0; j < order_; ++j) out[j] /= denom;
}

double Grid::interpolate(const Eigen::VectorXd& v, double x) const {
  int p = panel_of(x);
  double a = breaks_[p], h = panel_width(p);
  double t = 2.0 * (x - a) / h - 1.0;
  std::vector<double> b(order_);
  basis(t, b.data());
  double s = 0;
  for (int j = 0; j < order_; ++j) s += b[j] * v[p * order_ + j];
  return s;
}

Eigen::VectorXd Grid::derivative(const Eigen::VectorXd& v) const {
  Eigen::VectorXd d(size());
  for (int p = 0; p < panels(); ++p)
    d.segment(p * order_, order_) = (2.0 / panel_width(p)) * (diff_ * v.segment(p * order_, order_));
  return d;
}

Eigen::VectorXd Grid::laplacian(const Eigen::VectorXd& v) const {
  Eigen::VectorXd d1 = derivative(v);
  Eigen::VectorXd d2 = derivative(d1);
  return d2 + 2.0 * d1.cwiseQuotient(r_);
}

Eigen::VectorXd Grid::cumulative(const Eigen::VectorXd& v) const {
  Eigen::VectorXd c(size());
  double acc = 0;
  for (int p = 0; p < panels(); ++p) {
    auto seg = v.segment(p * order_, order_);
    c.segment(p * order_, order_) = Eigen::VectorXd::Constant(order_, acc) + 0.5 * panel_width(p) * (cum_ * seg);
    acc += w_.segment(p * order_, order_).dot(seg);
  }
  return c;
}

Eigen::VectorXd Grid::sample(const std::function<double(double)>& f) const {
  Eigen::VectorXd v(size());
  for (int i = 0; i < size(); ++i) v[i] = f(r_[i]);
  return v;
}

RadialField::RadialField(GridPtr g, Eigen::VectorXd v, std::optional<double> tail)
    : grid(std::move(g)), values(std::move(v)), tail_exponent(tail) {
  if (!grid || values.size() != grid->size()) throw Error("grid-mismatch", "values do not match grid");
  if (tail_exponent && !(*tail_exponent > 0)) throw Error("invalid-field", "tail exponent must be positive");
  for (int i = 0; i < values.size(); ++i)
    if (!std::isfinite(values[i])) throw Error("invalid-field", "non-finite value");
}

double RadialField::operator()(double r) const {
  double R = grid->radius();
  if (r <= R) return grid->interpolate(values, r);
  if (!tail_exponent) throw Error("out-of-range", "radius beyond grid and no tail");
  return grid->interpolate(values, R) * std::pow(R / r, *tail_exponent);
}

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  if (n < 2 || y.size() != n) throw Error("invalid-fit", "need at least two samples");
  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < n; ++i) {
    double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace choquard
