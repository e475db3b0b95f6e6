#include "choquard/solver.hpp"

#include <fstream>
#include <iomanip>

#include "choquard/ansatz.hpp"
#include "choquard/bubble.hpp"

namespace choquard {

Problem Problem::make(Kind kind, double alpha, GridPtr grid) {
  if (std::abs(grid->radius() - 1.0) > 1e-14) throw Error("invalid-grid", "solver grid must cover [0,1]");
  Problem P;
  P.kind = kind;
  P.alpha = alpha;
  P.a_hl = normalization(alpha).a_hl;
  P.grid = grid;
  P.riesz = std::make_shared<const RieszMatrix>(build_riesz_matrix(grid, alpha));
  return P;
}

namespace {
Eigen::VectorXd pos_pow(const Eigen::VectorXd& u, double p) { return u.cwiseMax(0.0).array().pow(p).matrix(); }

double sup(const Eigen::VectorXd& v) { return v.lpNorm<Eigen::Infinity>(); }
}  // namespace

Eigen::VectorXd nonlinear(const Problem& P, const Eigen::VectorXd& u) {
  const double a = P.alpha;
  Eigen::VectorXd V = P.riesz->W * pos_pow(u, 6.0 - a);
  return P.a_hl * V.cwiseProduct(pos_pow(u, 5.0 - a));
}

RadialField residual(const Problem& P, const DiscreteState& s) {
  const Eigen::VectorXd& u = s.u.values;
  const double sgn = P.kind == Kind::Dirichlet ? -1.0 : 1.0;
  Eigen::VectorXd F = -P.grid->laplacian(u) + sgn * s.lambda * u - nonlinear(P, u);
  return RadialField(P.grid, F);
}

Eigen::VectorXd fixed_point_residual(const Problem& P, double lambda, const Eigen::VectorXd& u) {
  RadialGreen G(P.kind, lambda, P.grid);
  return u - G.apply(nonlinear(P, u));
}

double fixed_point_norm(const Problem& P, double lambda, const Eigen::VectorXd& u) {
  double r = sup(fixed_point_residual(P, lambda, u));
  double s = sup(u);
  return s > 0 ? r / s : r;
}

Linearization linearize(const Problem& P, const Eigen::VectorXd& u) {
  const double a = P.alpha;
  Eigen::VectorXd u5 = pos_pow(u, 5.0 - a);
  Eigen::VectorXd u4 = pos_pow(u, 4.0 - a);
  Eigen::VectorXd V = P.riesz->W * pos_pow(u, 6.0 - a);
  Linearization L;
  L.nonlocal = (P.a_hl * (6.0 - a)) * (u5.asDiagonal() * P.riesz->W * u5.asDiagonal());
  L.local = Eigen::MatrixXd((P.a_hl * (5.0 - a)) * V.cwiseProduct(u4).asDiagonal());
  return L;
}

Eigen::MatrixXd jacobian(const Problem& P, double lambda, const Eigen::VectorXd& u) {
  const double a = P.alpha;
  const int n = P.grid->size();
  RadialGreen G(P.kind, lambda, P.grid);
  Eigen::MatrixXd Gm = G.matrix();
  Eigen::VectorXd u5 = pos_pow(u, 5.0 - a);
  Eigen::VectorXd u4 = pos_pow(u, 4.0 - a);
  Eigen::VectorXd V = P.riesz->W * pos_pow(u, 6.0 - a);
  Eigen::MatrixXd J = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd GD = Gm * u5.asDiagonal();
  J.noalias() -= (P.a_hl * (6.0 - a)) * (GD * P.riesz->W) * u5.asDiagonal();
  J.noalias() -= (P.a_hl * (5.0 - a)) * (Gm * V.cwiseProduct(u4).asDiagonal());
  return J;
}

DiscreteState newton_solve(const Problem& P, const DiscreteState& s0, const NewtonOptions& opt) {
  if (s0.u.grid != P.grid && s0.u.size() != P.grid->size()) throw Error("grid-mismatch", "seed grid differs");
  Eigen::VectorXd u = s0.u.values;
  const double lambda = s0.lambda;
  RadialGreen G(P.kind, lambda, P.grid);
  double prev = 1e300;
  int growth = 0;
  DiscreteState s;
  s.lambda = lambda;
  s.kind = P.kind;
  for (int it = 0; it <= opt.max_iterations; ++it) {
    Eigen::VectorXd R = u - G.apply(nonlinear(P, u));
    double su = sup(u);
    double norm = su > 0 ? sup(R) / su : sup(R);
    if (!std::isfinite(norm)) throw Error("diverged", "non-finite residual");
    if (norm < opt.tol) {
      s.u = RadialField(P.grid, u);
      s.residual_norm = norm;
      s.iterations = it;
      if (su > 0) {
        if (u.head(u.size() - 1).minCoeff() < -1e-10 * su) throw Error("lost-positivity", "negative interior values");
        double mu0 = u[0] > 0 && s0.u.values[0] > 0 ? measure_mu(s0.u) : 0.0;
        double mu1 = measure_mu(s.u);
        if (mu0 > 0 && (mu1 / mu0 > 2.0 || mu1 / mu0 < 0.5)) s.note = "branch-jump";
      }
      return s;
    }
    growth = norm > prev ? growth + 1 : 0;
    if (growth >= 5) throw Error("diverged", "residual grew over 5 steps");
    prev = norm;
    if (it == opt.max_iterations) break;
    Eigen::VectorXd du = jacobian(P, lambda, u).partialPivLu().solve(-R);
    u += du;
  }
  throw Error("max-iterations", "Newton did not converge in " + std::to_string(opt.max_iterations) + " steps");
}

double measure_mu(const RadialField& u) {
  double u0 = u.grid->interpolate(u.values, 0.0);
  if (!(u0 > 0)) throw Error("nonpositive-peak", "u(0) must be positive");
  return std::sqrt(3.0) / (u0 * u0);
}

// ---------------------------------------------------------------------------

namespace {

struct Scaling {
  Eigen::VectorXd wu;  // vol / s_u^2
  double wl;           // 1 / s_l^2
  double dot(const Eigen::VectorXd& a, double al, const Eigen::VectorXd& b, double bl) const {
    return a.dot(wu.cwiseProduct(b)) + wl * al * bl;
  }
};

Eigen::VectorXd lambda_derivative(const Problem& P, double lambda, const Eigen::VectorXd& u) {
  const double h = 1e-6 * std::max(1.0, lambda);
  Eigen::VectorXd N = nonlinear(P, u);
  Eigen::VectorXd gp = RadialGreen(P.kind, lambda + h, P.grid).apply(N);
  Eigen::VectorXd gm = RadialGreen(P.kind, lambda - h, P.grid).apply(N);
  return -(gp - gm) / (2 * h);
}

// Newton on R(u, lambda) = 0 with <t, x - xp> = 0; returns iterations or -1.
int corrector(const Problem& P, const Scaling& sc, const Eigen::VectorXd& tu, double tl, Eigen::VectorXd& u,
              double& lambda, double tol) {
  const Eigen::VectorXd up = u;
  const double lp = lambda;
  const int n = static_cast<int>(u.size());
  double prev = 1e300;
  for (int it = 0; it < 20; ++it) {
    if (!(lambda > 0) || (P.kind == Kind::Dirichlet && lambda >= kPi * kPi)) return -1;
    Eigen::VectorXd R = fixed_point_residual(P, lambda, u);
    double su = sup(u);
    double norm = su > 0 ? sup(R) / su : sup(R);
    if (!std::isfinite(norm) || norm > 1e4 * prev) return -1;
    if (norm < tol) return it;
    prev = norm;
    Eigen::MatrixXd A(n + 1, n + 1);
    A.topLeftCorner(n, n) = jacobian(P, lambda, u);
    A.topRightCorner(n, 1) = lambda_derivative(P, lambda, u);
    A.bottomLeftCorner(1, n) = sc.wu.cwiseProduct(tu).transpose();
    A(n, n) = sc.wl * tl;
    Eigen::VectorXd rhs(n + 1);
    rhs.head(n) = -R;
    rhs[n] = -sc.dot(tu, tl, u - up, lambda - lp);
    Eigen::VectorXd d = A.partialPivLu().solve(rhs);
    u += d.head(n);
    lambda += d[n];
  }
  return -1;
}

}  // namespace

Branch continue_branch(const Problem& P, const DiscreteState& start, double lambda_target,
                       const ContinuationOptions& opt) {
  if (!(start.residual_norm < 1e-6)) throw Error("not-converged", "start state is not a solution");
  const double dir = lambda_target > start.lambda ? 1.0 : -1.0;
  const double span = std::abs(lambda_target - start.lambda);
  if (span == 0) throw Error("invalid-target", "target equals the start lambda");

  std::vector<double> stops;
  for (double s : opt.stops)
    if ((s - start.lambda) * dir > 0 && (lambda_target - s) * dir > 0) stops.push_back(s);
  stops.push_back(lambda_target);
  std::sort(stops.begin(), stops.end(), [dir](double a, double b) { return a * dir < b * dir; });

  Scaling sc;
  const double su = std::sqrt(P.grid->integrate_volume(start.u.values.cwiseAbs2()));
  sc.wu = P.grid->vol() / (su * su);
  sc.wl = 1.0 / (span * span);
  const double min_cell = P.grid->min_cell();

  Branch br;
  auto accept = [&](const Eigen::VectorXd& u, double lambda, int its) {
    DiscreteState s;
    s.u = RadialField(P.grid, u);
    s.lambda = lambda;
    s.kind = P.kind;
    s.residual_norm = fixed_point_norm(P, lambda, u);
    s.iterations = its;
    double mu = measure_mu(s);
    if (mu < 10 * min_cell) throw Error("grid-underresolved", "measured mu " + std::to_string(mu) + " below 10 cells");
    br.points.push_back({lambda, s, mu});
  };
  accept(start.u.values, start.lambda, start.iterations);

  // tangent at the start from J t_u = -R_lambda
  Eigen::VectorXd u = start.u.values;
  double lambda = start.lambda;
  Eigen::VectorXd tu = jacobian(P, lambda, u).partialPivLu().solve(-lambda_derivative(P, lambda, u) * dir);
  double tl = dir;
  {
    double nrm = std::sqrt(sc.dot(tu, tl, tu, tl));
    tu /= nrm;
    tl /= nrm;
  }
  double ds = opt.step;
  size_t next_stop = 0;
  while (next_stop < stops.size() && static_cast<int>(br.points.size()) < opt.max_points) {
    Eigen::VectorXd un = u + ds * tu;
    double ln = lambda + ds * tl;
    const double stop = stops[next_stop];
    bool landing = (ln - stop) * dir >= 0;
    int its;
    if (landing) {
      // natural-parameter solve at the stop, seeded on the secant
      double frac = (stop - lambda) / (ln - lambda);
      un = u + frac * (un - u);
      ln = stop;
      DiscreteState seed;
      seed.u = RadialField(P.grid, un);
      seed.lambda = stop;
      try {
        DiscreteState s = newton_solve(P, seed, {opt.tol, 12});
        un = s.u.values;
        its = s.iterations;
      } catch (const Error&) {
        its = -1;
      }
    } else {
      its = corrector(P, sc, tu, tl, un, ln, opt.tol);
    }
    if (its < 0) {
      ds *= 0.5;
      if (ds < opt.min_step) throw Error("fold-unresolvable", "arclength step fell below the minimum");
      continue;
    }
    Eigen::VectorXd du = un - u;
    double dl = ln - lambda;
    double len = std::sqrt(sc.dot(du, dl, du, dl));
    accept(un, ln, its);
    br.arclength_steps.push_back(len);
    bool fold = (dl * tl < 0);
    br.fold_flags.push_back(fold);
    if (len > 0) {
      tu = du / len;
      tl = dl / len;
    }
    u = un;
    lambda = ln;
    if (landing) ++next_stop;
    if (its <= 8) ds = std::min(opt.max_step, 2.0 * ds);
  }
  return br;
}

void write_branch_csv(const Branch& b, const std::string& path, const std::function<double(double)>& predicted) {
  std::ofstream out(path);
  if (!out) throw Error("io", "cannot write " + path);
  out << "lambda,measured_mu,predicted_mu,residual_norm,u_at_0\n" << std::setprecision(12);
  for (const auto& p : b.points) {
    double pred = predicted ? predicted(p.lambda) : std::nan("");
    out << p.lambda << ',' << p.measured_mu << ',' << pred << ',' << p.state.residual_norm << ','
        << p.state.u.grid->interpolate(p.state.u.values, 0.0) << '\n';
  }
}

// ---------------------------------------------------------------------------

ProjectedCorrection projected_correction(const Problem& P, double lambda, const Eigen::VectorXd& U,
                                         const Eigen::VectorXd& zrep, double tol) {
  const int n = P.grid->size();
  const Grid& g = *P.grid;
  RadialGreen G(P.kind, lambda, P.grid);
  Eigen::MatrixXd L = jacobian(P, lambda, U);
  Eigen::VectorXd Y = G.apply(zrep);
  Eigen::VectorXd z = g.vol().cwiseProduct(zrep);
  const double ys = Y.norm(), zs = z.norm();

  Eigen::MatrixXd B(n + 1, n + 1);
  B.topLeftCorner(n, n) = L;
  B.topRightCorner(n, 1) = -Y / ys;
  B.bottomLeftCorner(1, n) = z.transpose() / zs;
  B(n, n) = 0.0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);

  const double a = P.alpha;
  const Eigen::VectorXd NU = nonlinear(P, U);
  const Eigen::VectorXd E = G.apply(NU) - U;
  const Eigen::VectorXd u5 = pos_pow(U, 5.0 - a), u4 = pos_pow(U, 4.0 - a);
  const Eigen::VectorXd V = P.riesz->W * pos_pow(U, 6.0 - a);
  auto dN = [&](const Eigen::VectorXd& v) {
    return P.a_hl * ((6.0 - a) * u5.cwiseProduct(P.riesz->W * u5.cwiseProduct(v)) +
                     (5.0 - a) * V.cwiseProduct(u4).cwiseProduct(v));
  };

  ProjectedCorrection out;
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(n), rhs(n + 1), sol;
  double prev_step = -1, c = 0;
  for (int it = 1; it <= 200; ++it) {
    rhs.head(n) = E + G.apply(nonlinear(P, U + phi) - NU - dN(phi));
    rhs[n] = 0.0;
    sol = lu.solve(rhs);
    double step = sup(sol.head(n) - phi);
    phi = sol.head(n);
    c = sol[n] / ys;
    out.iterations = it;
    double scale = std::max(sup(phi), 1e-300);
    if (prev_step > 0) {
      out.contraction = step / prev_step;
      if (out.contraction > 0.9 && step > tol * scale)
        throw Error("contraction-failed", "contraction factor " + std::to_string(out.contraction));
    }
    if (step <= tol * scale || step == 0.0) break;
    prev_step = step;
  }

  out.phi = RadialField(P.grid, phi);
  Eigen::VectorXd dphi = g.derivative(phi);
  double h1 = g.integrate_volume(dphi.cwiseAbs2());
  if (P.kind == Kind::Neumann) h1 += lambda * g.integrate_volume(phi.cwiseAbs2());
  out.phi_norm = std::sqrt(h1);
  out.multiplier = c;
  {
    double zn = std::sqrt(std::abs(z.dot(G.apply(zrep))));
    out.orthogonality = out.phi_norm > 0 && zn > 0 ? z.dot(phi) / (zn * out.phi_norm) : 0.0;
  }

  // smallest singular value of the bordered operator in the energy metric
  // <v, G^{-1} v>. Writing the nodal Green matrix as Gh V with Gh = C C^T
  // symmetric, L = I - G N' becomes C^{-1} L C, self-adjoint, and the border
  // pair (Y, z) maps to a single vector; singular values are then |eigenvalues|.
  {
    Eigen::MatrixXd Gh = G.matrix() * g.vol().cwiseInverse().asDiagonal();
    Gh = 0.5 * (Gh + Gh.transpose()).eval();
    Eigen::LLT<Eigen::MatrixXd> llt(Gh);
    if (llt.info() != Eigen::Success) throw Error("indefinite-operator", "Green matrix not positive definite");
    Eigen::MatrixXd C = llt.matrixL();
    auto Cl = C.triangularView<Eigen::Lower>();
    Eigen::MatrixXd T = Cl.solve(L * C);
    Eigen::VectorXd y = Cl.solve(Y);
    y /= y.norm();
    Eigen::MatrixXd Bs(n + 1, n + 1);
    Bs.topLeftCorner(n, n) = 0.5 * (T + T.transpose());
    Bs.topRightCorner(n, 1) = y;
    Bs.bottomLeftCorner(1, n) = y.transpose();
    Bs(n, n) = 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Bs, Eigen::EigenvaluesOnly);
    out.sigma_min = es.eigenvalues().cwiseAbs().minCoeff();
  }
  return out;
}

ProjectedCorrection projected_correction(Kind kind, double mu, double lambda, double alpha, int nodes) {
  GridPtr grid = bubble_grid(mu, nodes);
  Problem P = Problem::make(kind, alpha, grid);
  CorrectionField c0 = solve_correction(kind, mu, lambda, alpha, grid);
  const double h = 1e-4 * mu;
  CorrectionField cp = solve_correction(kind, mu + h, lambda, alpha, grid);
  CorrectionField cm = solve_correction(kind, mu - h, lambda, alpha, grid);
  Eigen::VectorXd U = ansatz(c0).values;
  Eigen::VectorXd zrep = (ansatz_laplacian(cp) - ansatz_laplacian(cm)) / (2 * h);
  if (kind == Kind::Neumann) zrep += lambda * (ansatz(cp).values - ansatz(cm).values) / (2 * h);
  ProjectedCorrection pc = projected_correction(P, lambda, U, zrep);
  pc.mu = mu;
  return pc;
}

}  // namespace choquard
