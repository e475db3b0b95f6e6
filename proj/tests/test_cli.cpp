#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

#include "choquard/cli.hpp"
#include "choquard/common.hpp"

namespace fs = std::filesystem;

namespace {
int call(std::vector<std::string> args) {
  args.insert(args.begin(), "choquard_cli");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return choquard::cli::run(static_cast<int>(argv.size()), argv.data());
}

nlohmann::json load(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

fs::path scratch() {
  fs::path d = fs::temp_directory_path() / "choquard_cli_test";
  fs::create_directories(d);
  return d;
}
}  // namespace

TEST_CASE("lambda-star") {
  fs::path out = scratch() / "ls.json";
  CHECK(call({"lambda-star", "--kind", "dirichlet", "--out", out.string()}) == 0);
  auto j = load(out);
  CHECK(j["command"] == "lambda-star");
  CHECK(j["results"]["lambda_star"].get<double>() == doctest::Approx(choquard::kPi * choquard::kPi / 4).epsilon(1e-10));
  CHECK(j["assertions"][0]["passed"] == true);
  CHECK(j["params"]["version"].is_string());
  CHECK(j["params"]["grid"] == 2048);
  CHECK(call({"lambda-star", "--kind", "neumann", "--out", out.string()}) == 0);
}

TEST_CASE("constants") {
  fs::path out = scratch() / "c.json";
  CHECK(call({"constants", "--alpha", "1", "--out", out.string()}) == 0);
  auto j = load(out);
  CHECK(j["results"]["a1"].get<double>() == doctest::Approx(136.7573).epsilon(1e-6));
  CHECK(j["results"]["a2"].get<double>() == doctest::Approx(17.0947).epsilon(1e-5));
  CHECK(j["results"]["gamma"].get<double>() == doctest::Approx(4.0).epsilon(1e-9));
  for (auto& a : j["assertions"]) {
    CHECK(a.contains("name"));
    CHECK(a.contains("value"));
    CHECK(a.contains("threshold"));
  }
}

TEST_CASE("checks write JSON and CSV") {
  fs::path out = scratch() / "e.json";
  CHECK(call({"energy-check", "--alpha", "1", "--lambda", "2.5", "--grid", "1024", "--out", out.string()}) == 0);
  auto j = load(out);
  CHECK(j["results"]["fitted_order"].get<double>() >= 2.3);
  CHECK(j["results"]["mu"].size() == 4);
  CHECK(fs::exists(scratch() / "e_energy.csv"));

  out = scratch() / "d0.json";
  CHECK(call({"d0", "--lambda", "2.0", "--out", out.string()}) == 0);
  CHECK(fs::exists(scratch() / "d0_d0.csv"));

  out = scratch() / "r.json";
  CHECK(call({"robin", "--kind", "neumann", "--lambda-range", "1:3:3", "--out", out.string()}) == 0);
  CHECK(load(out)["results"]["values"].size() == 12);

  out = scratch() / "a.json";
  CHECK(call({"ansatz-check", "--grid", "512", "--out", out.string()}) == 0);

  out = scratch() / "red.json";
  CHECK(call({"reduce", "--kind", "neumann", "--out", out.string()}) == 0);
  CHECK(load(out)["results"]["predicted_mu"].get<double>() > 0);
}

TEST_CASE("continuation subcommand") {
  fs::path out = scratch() / "cont.json";
  CHECK(call({"continue", "--kind", "neumann", "--grid", "512", "--out", out.string()}) == 0);
  auto j = load(out);
  CHECK(j["results"]["points"].size() >= 2);
  CHECK(fs::exists(scratch() / "cont_branch.csv"));
}

TEST_CASE("usage errors exit with 2") {
  fs::path out = scratch() / "bad.json";
  CHECK(call({}) == 2);
  CHECK(call({"lambda-star", "--kind", "robin"}) == 2);
  CHECK(call({"frobnicate"}) == 2);
  CHECK(call({"robin", "--lambda-range", "1:2", "--out", out.string()}) == 2);
  CHECK(call({"d0", "--lambda", "-1", "--out", out.string()}) == 2);
  CHECK(call({"constants", "--alpha", "3.5"}) == 2);
}

TEST_CASE("assertion failure exits with 1") {
  fs::path out = scratch() / "fail.json";
  // below the threshold the reduced problem is not posed at all
  CHECK(call({"reduce", "--lambda", "2.0", "--out", out.string()}) == 2);
  // a 64-node grid cannot follow the bubble that close to the threshold
  CHECK(call({"continue", "--kind", "neumann", "--grid", "64", "--lambda-range", "1.48922884:1.43932884:1", "--out",
              out.string()}) == 1);
  nlohmann::json j = load(out);
  bool any_failed = false;
  for (const auto& a : j["assertions"]) any_failed = any_failed || !a["passed"].get<bool>();
  CHECK(any_failed);
}
