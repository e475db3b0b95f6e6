#include "choquard/riesz.hpp"

#include <map>
#include <mutex>

#include "choquard/bubble.hpp"

namespace choquard {

double riesz_bracket(double r, double s, double d, double alpha) {
  const double p = 2.0 - alpha;
  const double m = std::max(r, s);
  if (m == 0.0) return 0.0;
  const double t = std::min(r, s) / m;
  const double L1 = std::log1p(t);
  const double L2 = t < 0.5 ? std::log1p(-t) : std::log(d / m);
  return std::pow(m, p) * (expm1_ratio(p, L1) - expm1_ratio(p, L2));
}

double riesz_kernel(double r, double s, double d, double alpha) {
  if (r == 0.0) return s == 0.0 ? 0.0 : 4.0 * kPi * std::pow(s, 2.0 - alpha);
  return 2.0 * kPi * s / r * riesz_bracket(r, s, d, alpha);
}

double riesz_radial(const Fn& f, double r, double alpha, double R_max, double tol) {
  const double part = tol / 3.0;
  if (r == 0.0) {
    auto g = [&](double s, double) { return riesz_kernel(0.0, s, s, alpha) * f(s); };
    auto h = [&](double s) { return riesz_kernel(0.0, s, s, alpha) * f(s); };
    return integrate_endpoint(g, 0.0, R_max, true, part) + integrate_tail(h, R_max, part);
  }
  auto below = [&](double s, double d) { return riesz_kernel(r, s, d, alpha) * f(s); };
  if (r < R_max) {
    auto tail = [&](double s) { return riesz_kernel(r, s, s - r, alpha) * f(s); };
    return integrate_endpoint(below, 0.0, r, false, part) + integrate_endpoint(below, r, R_max, true, part) +
           integrate_tail(tail, R_max, part);
  }
  // r beyond the split: the singular point sits on the mapped tail's end
  auto mapped = [&](double t, double dt) {
    if (t < 1e-30) return 0.0;
    double s = 1.0 / t;
    return riesz_kernel(r, s, r * dt / t, alpha) * f(s) * s * s;
  };
  return integrate_endpoint(below, 0.0, r, false, part) + integrate_endpoint(mapped, 0.0, 1.0 / r, false, part);
}

double riesz_radial_ball(const Fn& f, double r, double alpha, double R, double tol) {
  const double part = tol / 2.0;
  if (r == 0.0) {
    auto g = [&](double s, double) { return riesz_kernel(0.0, s, s, alpha) * f(s); };
    return integrate_endpoint(g, 0.0, R, true, part);
  }
  auto below = [&](double s, double d) { return riesz_kernel(r, s, d, alpha) * f(s); };
  if (r < R) return integrate_endpoint(below, 0.0, r, false, part) + integrate_endpoint(below, r, R, true, part);
  auto inside = [&](double s, double d) { return riesz_kernel(r, s, d + (r - R), alpha) * f(s); };
  return integrate_endpoint(inside, 0.0, R, false, part);
}

// ---------------------------------------------------------------------------
// singular moment tables

namespace {

std::mutex g_moment_mtx;

double shifted_legendre(int a, double u) {
  double buf[64];
  legendre_values(a, 2.0 * u - 1.0, buf);
  return buf[a];
}

}  // namespace

const Eigen::MatrixXd& moments_same(double p, int D) {
  static std::map<std::pair<double, int>, Eigen::MatrixXd> cache;
  {
    std::lock_guard<std::mutex> lock(g_moment_mtx);
    auto it = cache.find({p, D});
    if (it != cache.end()) return it->second;
  }
  const GaussRule& g = gauss_legendre(D + 2);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(D + 1, D + 1);
  std::vector<double> pa(D + 1), pb(D + 1);
  for (int a = 0; a <= D; ++a) {
    for (int b = a; b <= D; b += 2) {
      auto Q = [&](double u) {
        double lo = -1.0, hi = 1.0 - u, acc = 0;
        for (size_t k = 0; k < g.x.size(); ++k) {
          double y = lo + 0.5 * (hi - lo) * (1.0 + g.x[k]);
          legendre_values(D, y + u, pa.data());
          legendre_values(D, y, pb.data());
          acc += 0.5 * (hi - lo) * g.w[k] * (pa[a] * pb[b] + pb[a] * pa[b]);
        }
        return acc;
      };
      auto f = [&](double u, double d) { return expm1_ratio(p, std::log(d)) * Q(u); };
      double v = integrate_endpoint(f, 0.0, 2.0, true, 1e-12);
      M(a, b) = M(b, a) = v;
    }
  }
  std::lock_guard<std::mutex> lock(g_moment_mtx);
  return cache.emplace(std::make_pair(p, D), std::move(M)).first->second;
}

const Eigen::MatrixXd& moments_corner(double p, double beta, int D) {
  static std::map<std::tuple<double, long long, int>, Eigen::MatrixXd> cache;
  const long long bkey = std::llround(beta * 1e9);
  const double bq = bkey * 1e-9;
  {
    std::lock_guard<std::mutex> lock(g_moment_mtx);
    auto it = cache.find({p, bkey, D});
    if (it != cache.end()) return it->second;
  }
  const GaussRule& g = gauss_legendre(24);
  std::vector<double> vv(g.x.size()), vw(g.x.size()), l1(g.x.size()), l2(g.x.size());
  for (size_t k = 0; k < g.x.size(); ++k) {
    vv[k] = 0.5 * (1.0 + g.x[k]);
    vw[k] = 0.5 * g.w[k];
    l1[k] = expm1_ratio(p, std::log1p(bq * vv[k]));
    l2[k] = expm1_ratio(p, std::log(vv[k] + bq));
  }
  Eigen::MatrixXd N(D + 1, D + 1);
  for (int a = 0; a <= D; ++a) {
    for (int b = 0; b <= D; ++b) {
      // lower triangle eta <= xi with eta = xi v, upper with xi = eta v
      auto lower = [&](double x, double dx) {
        double A = 0, B = 0;
        for (size_t k = 0; k < vv.size(); ++k) {
          double pb = shifted_legendre(b, x * vv[k]);
          A += vw[k] * pb;
          B += vw[k] * pb * l1[k];
        }
        double pa = shifted_legendre(a, x);
        return x * pa * (expm1_ratio(p, std::log(dx)) * A + std::pow(dx, p) * B);
      };
      auto upper = [&](double y, double dy) {
        double A = 0, B = 0;
        for (size_t k = 0; k < vv.size(); ++k) {
          double pa = shifted_legendre(a, y * vv[k]);
          A += vw[k] * pa;
          B += vw[k] * pa * l2[k];
        }
        double pb = shifted_legendre(b, y);
        return y * pb * (expm1_ratio(p, std::log(dy)) * A + std::pow(dy, p) * B);
      };
      N(a, b) = integrate_endpoint(lower, 0.0, 1.0, true, 1e-12) + integrate_endpoint(upper, 0.0, 1.0, true, 1e-12);
    }
  }
  std::lock_guard<std::mutex> lock(g_moment_mtx);
  return cache.emplace(std::make_tuple(p, bkey, D), std::move(N)).first->second;
}

// ---------------------------------------------------------------------------

RieszMatrix build_riesz_matrix(GridPtr grid, double alpha) {
  if (!(alpha > 0 && alpha < 3)) throw Error("invalid-alpha", "alpha must lie in (0,3)");
  const int n = grid->size(), m = grid->order(), P = grid->panels();
  const double p = 2.0 - alpha;
  const auto& r = grid->r();
  const auto& w = grid->w();
  const auto& br = grid->breaks();

  // Legendre coefficients of l_i(x) r(x) on every panel
  const GaussRule& gq = gauss_legendre(m + 2);
  std::vector<Eigen::MatrixXd> coef(P, Eigen::MatrixXd::Zero(m, m + 1));
  {
    std::vector<double> bas(m), leg(m + 1);
    for (int q = 0; q < P; ++q) {
      double c = 0.5 * (br[q] + br[q + 1]), hh = 0.5 * grid->panel_width(q);
      for (size_t k = 0; k < gq.x.size(); ++k) {
        grid->basis(gq.x[k], bas.data());
        legendre_values(m, gq.x[k], leg.data());
        double rk = c + hh * gq.x[k];
        for (int i = 0; i < m; ++i)
          for (int a = 0; a <= m; ++a) coef[q](i, a) += 0.5 * (2 * a + 1) * gq.w[k] * bas[i] * rk * leg[a];
      }
    }
  }
  const Eigen::MatrixXd& Msame = moments_same(p, m);
  Eigen::MatrixXd sign = Eigen::MatrixXd::Zero(m + 1, m + 1);
  for (int a = 0; a <= m; ++a) sign(a, a) = (a % 2 == 0) ? 1.0 : -1.0;

  Eigen::VectorXd qr = w.cwiseProduct(r);
  RieszMatrix out;
  out.alpha = alpha;
  out.grid = grid;
  out.S.resize(n, n);
  auto& S = out.S;

  for (int P1 = 0; P1 < P; ++P1) {
    for (int P2 = P1; P2 < P; ++P2) {
      const int i0 = P1 * m, j0 = P2 * m;
      if (P2 - P1 >= 2) {
        for (int i = i0; i < i0 + m; ++i)
          for (int j = j0; j < j0 + m; ++j)
            S(i, j) = 2.0 * kPi * qr[i] * qr[j] * riesz_bracket(r[i], r[j], r[j] - r[i], alpha);
        continue;
      }
      // smooth (r+s) part by the tensor rule
      Eigen::MatrixXd blk(m, m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          blk(i, j) = 2.0 * kPi * qr[i0 + i] * qr[j0 + j] * expm1_ratio(p, std::log(r[i0 + i] + r[j0 + j]));
      const double h1 = grid->panel_width(P1);
      if (P1 == P2) {
        if (P1 == 0 && br[0] == 0.0) {
          const Eigen::MatrixXd& N1 = moments_corner(p, 1.0, m);
          for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
              blk(i, j) = 2.0 * kPi * qr[i] * qr[j] * expm1_ratio(p, std::log(h1));
          blk += 2.0 * kPi * std::pow(h1, 2.0 + p) * coef[0] * N1 * coef[0].transpose();
        }
        const double hh = 0.5 * h1;
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) blk(i, j) -= 2.0 * kPi * qr[i0 + i] * qr[j0 + j] * expm1_ratio(p, std::log(hh));
        blk -= 2.0 * kPi * std::pow(hh, 2.0 + p) * coef[P1] * Msame * coef[P1].transpose();
      } else {
        const double h2 = grid->panel_width(P2);
        const Eigen::MatrixXd& Nb = moments_corner(p, h2 / h1, m);
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) blk(i, j) -= 2.0 * kPi * qr[i0 + i] * qr[j0 + j] * expm1_ratio(p, std::log(h1));
        blk -= 2.0 * kPi * h1 * h2 * std::pow(h1, p) * coef[P1] * sign * Nb * coef[P2].transpose();
      }
      S.block(i0, j0, m, m) = blk;
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) S(i, j) = S(j, i);
  // make same-panel blocks exactly symmetric
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n && j / m == i / m; ++j) S(i, j) = S(j, i) = 0.5 * (S(i, j) + S(j, i));

  Eigen::VectorXd scale = (w.cwiseProduct(r).cwiseProduct(r)).cwiseInverse();
  out.W = scale.asDiagonal() * S;
  return out;
}

namespace {
void check_grid(const RieszMatrix& m, const RadialField& f) {
  if (f.grid != m.grid && (f.grid->size() != m.grid->size() || (f.grid->r() - m.grid->r()).norm() != 0.0))
    throw Error("grid-mismatch", "field grid differs from matrix grid");
}
}  // namespace

Eigen::VectorXd riesz_apply(const RieszMatrix& m, const Eigen::VectorXd& f) {
  if (f.size() != m.W.cols()) throw Error("grid-mismatch", "vector length differs from matrix size");
  return m.W * f;
}

RadialField riesz_apply(const RieszMatrix& m, const RadialField& f) {
  check_grid(m, f);
  return RadialField(m.grid, m.W * f.values);
}

double hls_energy(const RieszMatrix& m, const Eigen::VectorXd& f, const Eigen::VectorXd& g) {
  const int n = static_cast<int>(f.size());
  if (g.size() != n || m.S.rows() != n) throw Error("grid-mismatch", "vector length differs from matrix size");
  // summed over the upper triangle so that swapping f and g is bitwise neutral
  double acc = 0;
  for (int j = 0; j < n; ++j) {
    double col = m.S(j, j) * f[j] * g[j];
    for (int i = 0; i < j; ++i) col += m.S(i, j) * (f[i] * g[j] + f[j] * g[i]);
    acc += col;
  }
  return 4.0 * kPi * acc;
}

double hls_energy(const RieszMatrix& m, const RadialField& f, const RadialField& g) {
  check_grid(m, f);
  check_grid(m, g);
  return hls_energy(m, f.values, g.values);
}

double hls_energy_full(const Fn& f, const Fn& g, double alpha, double tol) {
  return hls_energy_full_split(f, g, alpha, 50.0, tol);
}

double hls_energy_full_split(const Fn& f, const Fn& g, double alpha, double R_max, double tol) {
  auto outer = [&](double r) { return 4.0 * kPi * r * r * g(r) * riesz_radial(f, r, alpha, R_max, 1e-2 * tol); };
  double e1 = 0, e2 = 0;
  double v = integrate_gk(outer, 0.0, R_max, 0.5 * tol, &e1) + integrate_tail(outer, R_max, 0.5 * tol, &e2);
  return v;
}

double hls_energy(const RadialField& f, const RadialField& g, double alpha) {
  if (!f.tail_exponent && !g.tail_exponent) {
    if (f.grid != g.grid) throw Error("grid-mismatch", "fields live on different grids");
    RieszMatrix m = build_riesz_matrix(f.grid, alpha);
    return hls_energy(m, f, g);
  }
  auto ff = [&](double r) { return (f.tail_exponent || r <= f.grid->radius()) ? f(r) : 0.0; };
  auto gg = [&](double r) { return (g.tail_exponent || r <= g.grid->radius()) ? g(r) : 0.0; };
  double R = std::max({50.0, f.grid->radius(), g.grid->radius()});
  return hls_energy_full_split(ff, gg, alpha, R, 1e-8);
}

double sharp_constant_shl(double alpha, bool normalized) {
  auto grad2 = [](double r) {
    double d = bubble_radial_dr(1.0, r);
    return 4.0 * kPi * r * r * d * d;
  };
  double num = integrate_gk(grad2, 0.0, 50.0, 1e-11) + integrate_tail(grad2, 50.0, 1e-11);
  const double q = 6.0 - alpha;
  auto f = [q](double s) { return std::pow(bubble_radial(1.0, s), q); };
  double den = hls_energy_full(f, f, alpha, 1e-9);
  if (normalized) den *= normalization(alpha).a_hl;
  return num / std::pow(den, 1.0 / q);
}

}  // namespace choquard
