#include "choquard/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "choquard/acceptance.hpp"
#include "choquard/ansatz.hpp"
#include "choquard/bubble.hpp"
#include "choquard/energy.hpp"
#include "choquard/green.hpp"
#include "choquard/reduced.hpp"
#include "choquard/solver.hpp"

namespace choquard::cli {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "1.0.0";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  double alpha = 1.0;
  std::optional<double> lambda;
  std::string lambda_range;
  std::string kind = "dirichlet";
  int grid = 2048;
  double tol = 1e-10;
  std::string out;
  std::string robin_table;

  Kind kind_enum() const { return kind == "neumann" ? Kind::Neumann : Kind::Dirichlet; }
};

struct Range {
  double a, b;
  int n;
  std::vector<double> values() const {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
    return v;
  }
};

Range parse_range(const std::string& s) {
  Range r{};
  char c1 = 0, c2 = 0;
  std::istringstream is(s);
  if (!(is >> r.a >> c1 >> r.b >> c2 >> r.n) || c1 != ':' || c2 != ':' || r.n < 1 || !is.eof())
    throw UsageError("--lambda-range expects a:b:n with n >= 1, got '" + s + "'");
  return r;
}

class Report {
 public:
  explicit Report(const RunConfig& c) : cfg_(c) {
    doc_["command"] = c.command;
    doc_["params"] = {{"version", kVersion},
                      {"alpha", c.alpha},
                      {"kind", c.kind},
                      {"grid", c.grid},
                      {"tol", c.tol},
                      {"seed", 0}};
    if (c.lambda) doc_["params"]["lambda"] = *c.lambda;
    if (!c.lambda_range.empty()) doc_["params"]["lambda_range"] = c.lambda_range;
    if (!c.robin_table.empty()) doc_["params"]["robin_table"] = c.robin_table;
    doc_["results"] = json::object();
    doc_["assertions"] = json::array();
  }

  json& results() { return doc_["results"]; }
  json& params() { return doc_["params"]; }

  void check(const std::string& name, bool passed, double value, double threshold) {
    doc_["assertions"].push_back({{"name", name}, {"passed", passed}, {"value", value}, {"threshold", threshold}});
    std::printf("%s %s value=%.6g threshold=%.6g\n", passed ? "PASS" : "FAIL", name.c_str(), value, threshold);
    ok_ = ok_ && passed;
  }

  void fail(const std::string& code, const std::string& what) {
    doc_["error"] = {{"code", code}, {"message", what}};
    ok_ = false;
  }

  /// CSV sibling of the JSON report.
  std::string csv_path(const std::string& tag) const {
    std::filesystem::path p(json_path());
    return (p.parent_path() / (p.stem().string() + "_" + tag + ".csv")).string();
  }
  void add_file(const std::string& path) { doc_["files"].push_back(path); }

  std::string json_path() const { return cfg_.out.empty() ? cfg_.command + ".json" : cfg_.out; }

  int finish() {
    std::filesystem::path p(json_path());
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(p);
    if (!f) throw Error("io", "cannot write " + p.string());
    f << doc_.dump(2) << '\n';
    return ok_ ? 0 : 1;
  }

 private:
  const RunConfig& cfg_;
  json doc_;
  bool ok_ = true;
};

json expansion_json(const ExpansionReport& r) {
  return {{"alpha", r.alpha},  {"lambda", r.lambda},     {"kind", to_string(r.kind)},
          {"mu", r.mu},        {"residual", r.residual}, {"fitted_order", r.fitted_order}};
}

void write_expansion_csv(const ExpansionReport& r, const std::string& path) {
  std::ofstream f(path);
  f << "mu,residual\n";
  f.precision(12);
  for (size_t i = 0; i < r.mu.size(); ++i) f << r.mu[i] << ',' << r.residual[i] << '\n';
}

double default_lambda(const RunConfig& c, double dirichlet, double neumann) {
  if (c.lambda) return *c.lambda;
  return c.kind_enum() == Kind::Dirichlet ? dirichlet : neumann;
}

std::optional<RobinTable> table_of(const RunConfig& c) {
  if (c.robin_table.empty()) return std::nullopt;
  return load_robin_table(c.robin_table);
}

// ---------------------------------------------------------------------------

void cmd_constants(const RunConfig& c, Report& rep) {
  EnergyCoefficients k = coefficients(c.alpha);
  rep.results() = {{"alpha", c.alpha},
                   {"a_hl", normalization(c.alpha).a_hl},
                   {"a0", k.a0},
                   {"a1", k.a1},
                   {"a2", k.a2},
                   {"a3", k.a3},
                   {"gamma", k.gamma()},
                   {"error", k.error},
                   {"a3_radius", k.a3_radius}};
  for (auto [R, v] : k.a3_sensitivity) rep.results()["a3_sensitivity"][std::to_string(R)] = v;
  std::printf("a0=%.12g a1=%.12g a2=%.12g a3=%.12g gamma=%.12g\n", k.a0, k.a1, k.a2, k.a3, k.gamma());
  const double a1 = 8 * kPi * kPi * std::sqrt(3.0), a2 = kPi * kPi * std::sqrt(3.0);
  rep.check("a1_closed_form", std::abs(k.a1 / a1 - 1) < 1e-6, std::abs(k.a1 / a1 - 1), 1e-6);
  rep.check("a2_closed_form", std::abs(k.a2 / a2 - 1) < 1e-6, std::abs(k.a2 / a2 - 1), 1e-6);
  rep.check("gamma_equals_4", std::abs(k.gamma() - 4) < 1e-6, std::abs(k.gamma() - 4), 1e-6);
}

void cmd_robin(const RunConfig& c, Report& rep) {
  const Kind kind = c.kind_enum();
  std::vector<double> lams;
  if (!c.lambda_range.empty())
    lams = parse_range(c.lambda_range).values();
  else if (c.lambda)
    lams = {*c.lambda};
  else
    lams = kind == Kind::Dirichlet ? Range{0.5, 9.0, 18}.values() : Range{0.5, 5.0, 10}.values();
  const std::vector<double> rhos{0.0, 0.25, 0.5, 0.75};
  const std::string csv = rep.csv_path("robin");
  std::ofstream f(csv);
  f << "lambda,rho,g\n";
  f.precision(14);
  double worst = 0;
  json rows = json::array();
  for (double lam : lams) {
    RobinEvaluator ev(kind, lam);
    for (double rho : rhos) {
      double g = ev.robin({rho, 0, 0});
      f << lam << ',' << rho << ',' << g << '\n';
      rows.push_back({{"lambda", lam}, {"rho", rho}, {"g", g}});
      if (rho == 0.0) worst = std::max(worst, std::abs(g - robin_center(kind, lam)));
    }
  }
  rep.results()["values"] = rows;
  rep.add_file(csv);
  std::printf("%zu robin values written to %s\n", rows.size(), csv.c_str());
  rep.check("centre_matches_closed_form", worst < 1e-8, worst, 1e-8);
}

void cmd_lambda_star(const RunConfig& c, Report& rep) {
  const Kind kind = c.kind_enum();
  const double ls = lambda_star(kind);
  std::printf("%.10f\n", ls);
  rep.results() = {{"lambda_star", ls}, {"slope", robin_center_slope(kind, ls)}};
  if (kind == Kind::Dirichlet) {
    double e = std::abs(ls - kPi * kPi / 4);
    rep.check("equals_pi2_over_4", e < 1e-6, e, 1e-6);
  } else {
    double e = std::abs(ls - neumann_threshold_oracle());
    rep.check("matches_closed_form_bisection", e < 1e-8, e, 1e-8);
  }
}

void cmd_d0(const RunConfig& c, Report& rep) {
  const double lam = default_lambda(c, 2.5, 2.5);
  D0Profile p = d0(lam);
  const std::string csv = rep.csv_path("d0");
  std::ofstream f(csv);
  f << "z,d0,exact\n";
  f.precision(14);
  double worst = 0, scale = 0;
  for (int i = 0; i <= 80; ++i) {
    double z = i == 0 ? 0.0 : 1e-3 * std::pow(10.0, 6.0 * i / 80.0);
    double v = p(z), e = d0_exact(lam, z);
    f << z << ',' << v << ',' << e << '\n';
    worst = std::max(worst, std::abs(v - e));
    scale = std::max(scale, std::abs(e));
  }
  rep.add_file(csv);
  rep.results() = {{"lambda", lam}, {"d0_at_0", p(0.0)}, {"max_abs_error", worst}};
  std::printf("D0(0)=%.12g\n", p(0.0));
  rep.check("matches_closed_form", worst < 1e-8 * scale, worst / scale, 1e-8);
}

void cmd_ansatz_check(const RunConfig& c, Report& rep) {
  const Kind kind = c.kind_enum();
  const double lam = default_lambda(c, 2.5, 1.5);
  auto r = ansatz_expansion_check(kind, lam, c.alpha, {0.04, 0.02, 0.01, 0.005}, true, c.grid);
  rep.results() = expansion_json(r);
  const std::string csv = rep.csv_path("ansatz");
  write_expansion_csv(r, csv);
  rep.add_file(csv);
  std::printf("fitted_order=%.4f\n", r.fitted_order);
  rep.check("fitted_order", r.fitted_order >= 1.8, r.fitted_order, 1.8);
}

void cmd_energy_check(const RunConfig& c, Report& rep) {
  const Kind kind = c.kind_enum();
  const double lam = default_lambda(c, 2.5, 1.45);
  auto r = energy_expansion_check(c.alpha, lam, {0.02, 0.01, 0.005, 0.0025}, kind, false, c.grid);
  rep.results() = expansion_json(r);
  const std::string csv = rep.csv_path("energy");
  write_expansion_csv(r, csv);
  rep.add_file(csv);
  std::printf("fitted_order=%.4f\n", r.fitted_order);
  rep.check("fitted_order", r.fitted_order >= 2.3, r.fitted_order, 2.3);
}

void cmd_reduce(const RunConfig& c, Report& rep) {
  const Kind kind = c.kind_enum();
  const double l0 = lambda_star(kind);
  ReducedConfig cfg = ReducedConfig::make(kind, default_lambda(c, l0 + 0.05, l0 + 0.05), c.alpha);
  cfg.table = table_of(c);
  Region reg = shrinking_region(cfg);
  BlowupPrediction bp = predict_blowup(cfg);
  ReducedPoint ex = critical_point(cfg, true);
  auto pt = [](const ReducedPoint& p) {
    return json{{"Lambda", p.Lambda}, {"xi", p.xi},           {"mu", p.mu},
                {"psi", p.psi_value}, {"gradient_norm", p.gradient_norm}, {"in_region", p.in_region}};
  };
  rep.results() = {{"lambda", cfg.lambda},   {"lambda0", cfg.lambda0}, {"A", cfg.A},
                   {"delta", cfg.delta},     {"region_radius", reg.radius}, {"region_threshold", reg.threshold},
                   {"surrogate", pt(bp.point)}, {"exact", pt(ex)},       {"predicted_mu", bp.mu},
                   {"predicted_xi", bp.xi}};
  std::printf("predicted mu=%.6e at xi=(%g, %g, %g); exact-energy mu=%.6e\n", bp.mu, bp.xi[0], bp.xi[1], bp.xi[2],
              ex.mu);
  rep.check("critical_point_in_region", bp.point.in_region, norm(bp.xi), reg.radius);
  rep.check("predicted_mu_positive", bp.mu > 0, bp.mu, 0.0);
  double gap = std::abs(ex.mu / bp.mu - 1);
  rep.check("exact_vs_surrogate_mu", gap < 0.25, gap, 0.25);
}

void cmd_continue(const RunConfig& c, Report& rep) {
  const Kind kind = c.kind_enum();
  const double l0 = lambda_star(kind);
  double start, target;
  std::vector<double> stops;
  if (!c.lambda_range.empty()) {
    Range r = parse_range(c.lambda_range);
    start = r.a;
    target = r.b;
    auto v = r.values();
    if (v.size() > 2) stops.assign(v.begin() + 1, v.end() - 1);
  } else if (kind == Kind::Dirichlet) {
    start = l0 + 0.05;
    target = l0 + 0.005;
    stops = {l0 + 0.01};
  } else {
    start = l0 + 0.05;
    target = l0 + 0.04;
  }
  if (!(start > l0 && target > l0))
    throw UsageError("the lambda range must lie on the blow-up side of the threshold");

  auto pred = [&](double lam) { return mu_of(ReducedConfig::make(kind, lam, c.alpha), 1.0, {0, 0, 0}); };
  Problem P = Problem::make(kind, c.alpha, Grid::graded(c.grid, 2e-5));
  DiscreteState s0;
  {
    auto corr = solve_correction(kind, pred(start), start, c.alpha, P.grid);
    s0.u = ansatz(corr);
    s0.lambda = start;
    s0.kind = kind;
  }
  DiscreteState s = newton_solve(P, s0, {std::max(c.tol, 1e-12), 30});
  ContinuationOptions co;
  co.stops = stops;
  co.tol = std::max(c.tol, 1e-12);
  Branch br = continue_branch(P, s, target, co);

  const std::string csv = rep.csv_path("branch");
  write_branch_csv(br, csv, pred);
  rep.add_file(csv);
  json pts = json::array();
  for (const auto& p : br.points)
    pts.push_back({{"lambda", p.lambda},
                   {"measured_mu", p.measured_mu},
                   {"predicted_mu", pred(p.lambda)},
                   {"residual_norm", p.state.residual_norm}});
  rep.results() = {{"lambda0", l0}, {"points", pts}, {"grid_min_cell", P.grid->min_cell()}};
  std::printf("%zu branch points written to %s\n", br.points.size(), csv.c_str());

  bool positive = true;
  for (const auto& p : br.points) positive = positive && p.state.u.values.minCoeff() > 0 && p.measured_mu > 0;
  rep.check("positive_solutions", positive, positive ? 1.0 : 0.0, 1.0);
  std::set<double> stop_set(stops.begin(), stops.end());
  stop_set.insert(target);
  for (const auto& p : br.points) {
    if (!stop_set.count(p.lambda)) continue;
    double e = std::abs(p.measured_mu / pred(p.lambda) - 1);
    char name[64];
    std::snprintf(name, sizeof name, "mu_vs_prediction_at_%.6f", p.lambda);
    rep.check(name, e < 0.25, e, 0.25);
  }
  const size_t m = br.points.size();
  if (m >= 3) {
    double lo = 1e300, hi = 0;
    for (size_t i = m - 3; i < m; ++i) {
      double q = br.points[i].measured_mu / std::abs(br.points[i].lambda - l0);
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
    rep.check("mu_ratio_stable_last_three", hi / lo - 1 < 0.2, hi / lo - 1, 0.2);
  }
}

void cmd_verify_all(const RunConfig& c, Report& rep) {
  AcceptanceOptions opt;
  opt.flagship_grid = c.grid;
  std::filesystem::path p(rep.json_path());
  opt.out_dir = p.has_parent_path() ? p.parent_path().string() : ".";
  json rows = json::array();
  for (int id = 1; id <= 10; ++id) {
    CriterionResult r = run_criterion(id, opt);
    rows.push_back({{"id", r.id}, {"name", r.name}, {"detail", r.detail}, {"seconds", r.seconds}});
    rep.check("criterion_" + std::to_string(id) + "_" + r.name, r.passed, r.value, r.threshold);
  }
  rep.results()["criteria"] = rows;
}

bool is_usage_code(const std::string& code) {
  static const std::set<std::string> usage{"invalid-alpha", "invalid-lambda", "invalid-config", "invalid-bubble",
                                           "invalid-grid",  "invalid-mu",     "invalid-target", "resonance",
                                           "bad-table",     "empty-table",    "io"};
  return usage.count(code) > 0;
}

}  // namespace

int run(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Blow-up solutions of critical Choquard problems on the unit ball"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.add_option("--alpha", cfg.alpha, "Riesz exponent in (0,3)")->check(CLI::Range(0.0, 3.0));
  app.add_option("--lambda", cfg.lambda, "spectral parameter");
  app.add_option("--lambda-range", cfg.lambda_range, "a:b:n");
  app.add_option("--kind", cfg.kind, "boundary condition")->check(CLI::IsMember({"dirichlet", "neumann"}));
  app.add_option("--grid", cfg.grid, "radial nodes")->check(CLI::Range(64, 1 << 16));
  app.add_option("--tol", cfg.tol, "solver tolerance")->check(CLI::PositiveNumber);
  app.add_option("--out", cfg.out, "JSON report path; CSV files are written beside it");
  app.add_option("--robin-table", cfg.robin_table, "CSV xi_1,xi_2,xi_3,g_value")->check(CLI::ExistingFile);

  using Handler = void (*)(const RunConfig&, Report&);
  const std::vector<std::tuple<const char*, const char*, Handler>> commands{
      {"constants", "energy expansion coefficients", cmd_constants},
      {"robin", "Robin function sweep", cmd_robin},
      {"lambda-star", "threshold of the Robin function at the centre", cmd_lambda_star},
      {"d0", "second-order profile D0", cmd_d0},
      {"ansatz-check", "correction expansion residuals", cmd_ansatz_check},
      {"energy-check", "energy expansion residuals", cmd_energy_check},
      {"reduce", "critical point of the reduced functional", cmd_reduce},
      {"continue", "solution branch against the prediction", cmd_continue},
      {"verify-all", "full acceptance suite", cmd_verify_all}};
  for (auto& [name, desc, fn] : commands) app.add_subcommand(name, desc)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  Handler handler = nullptr;
  for (auto& [name, desc, fn] : commands)
    if (app.got_subcommand(name)) {
      cfg.command = name;
      handler = fn;
    }

  Report rep(cfg);
  try {
    handler(cfg, rep);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    if (is_usage_code(e.code())) return 2;
    rep.fail(e.code(), e.what());
  }
  try {
    return rep.finish();
  } catch (const Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  }
}

}  // namespace choquard::cli
