#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli_app.hpp"
#include "soline/errors.hpp"
#include "soline/problems.hpp"

using namespace soline;
namespace fs = std::filesystem;

namespace {

struct Invocation {
  int code = -1;
  std::string out;
  std::string err;
};

Invocation invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "soline_cli");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  Invocation r;
  r.code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("soline_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

nlohmann::json load(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("seed lists") {
  CHECK(cli::parse_seed_list("1,2,5") == std::vector<std::uint64_t>{1, 2, 5});
  CHECK(cli::parse_seed_list("3..5, 9") == std::vector<std::uint64_t>{3, 4, 5, 9});
  CHECK(cli::parse_seed_list("").empty());
  CHECK_THROWS_AS(cli::parse_seed_list("5..3"), ConfigError);
  CHECK_THROWS_AS(cli::parse_seed_list("-1"), ConfigError);
  CHECK_THROWS_AS(cli::parse_seed_list("1.5"), ConfigError);
}

TEST_CASE("config files") {
  const fs::path dir = scratch("cfg");
  {
    std::ofstream f(dir / "a.cfg");
    f << "# tolerances\n eps_g = 1e-4  # inline\n\neps_H=0.01\nU_H = 7\nreach_eps2opt = true\n";
  }
  SolverConfig c;
  cli::apply_config_file((dir / "a.cfg").string(), c);
  CHECK(c.eps_g == 1e-4);
  CHECK(c.eps_H == 0.01);
  CHECK(*c.U_H == 7.0);
  CHECK(c.reach_eps2opt);
  {
    std::ofstream f(dir / "b.cfg");
    f << "epsilon = 3\n";
  }
  CHECK_THROWS_AS(cli::apply_config_file((dir / "b.cfg").string(), c), ConfigError);
  {
    std::ofstream f(dir / "c.cfg");
    f << "theta = half\n";
  }
  CHECK_THROWS_AS(cli::apply_config_file((dir / "c.cfg").string(), c), ConfigError);
  CHECK_THROWS_AS(cli::apply_config_file((dir / "missing.cfg").string(), c), ConfigError);
}

TEST_CASE("run exact on the 2-D quadratic") {
  const fs::path dir = scratch("quad");
  const auto r = invoke({"run", "--problem", "quad-convex-2d", "--algo", "exact", "--seed", "1", "--out", dir});
  CHECK(r.code == cli::kOk);
  const auto rep = load(dir / "quad-convex-2d_exact.report.json");
  CHECK(rep.at("schema_version") == 1);
  REQUIRE(rep.at("runs").size() == 1u);
  CHECK(rep.at("runs")[0].at("total_iterations") == 1);
  CHECK(fs::exists(dir / "quad-convex-2d_exact_s1.trace.csv"));
}

TEST_CASE("usage errors exit 2") {
  const fs::path dir = scratch("usage");
  CHECK(invoke({"run", "--problem", "quad-convex-2d", "--eps-g", "2", "--out", dir}).code == cli::kUsage);
  const auto unknown = invoke({"run", "--problem", "nope", "--out", dir});
  CHECK(unknown.code == cli::kUsage);
  CHECK(unknown.err.find("unknown problem") != std::string::npos);
  CHECK(invoke({"run", "--problem", "quad-convex-2d", "--algo", "fast", "--out", dir}).code == cli::kUsage);
  CHECK(invoke({"run", "--out", dir}).code == cli::kUsage);
  CHECK(invoke({}).code == cli::kUsage);
  CHECK(invoke({"run", "--problem", "quad-convex-2d", "--seed", "x", "--out", dir}).code == cli::kUsage);
  CHECK(invoke({"run", "--problem", "quartic-2d", "--algo", "inexact", "--zeta", "0", "--out", dir}).code ==
        cli::kUsage);
}

TEST_CASE("flags override the config file, which overrides the problem") {
  const fs::path dir = scratch("prec");
  {
    std::ofstream f(dir / "x.cfg");
    f << "eps_g = 0.5\nmax_iters = 1\n";
  }
  const auto r = invoke({"run", "--problem", "rosenbrock-2d", "--config", (dir / "x.cfg").string(), "--max-iters",
                         "2", "--out", dir});
  CHECK(r.code == cli::kNotConverged);
  const auto rep = load(dir / "rosenbrock-2d_exact.report.json");
  CHECK(rep.at("config").at("eps_g") == 0.5);
  CHECK(rep.at("config").at("max_iters") == 2);
  CHECK(rep.at("config").at("eps_H") == 1e-3);
  CHECK(rep.at("runs")[0].at("status") == "max_iters");
}

TEST_CASE("empty seed set gives an empty table") {
  const fs::path dir = scratch("empty");
  const auto r = invoke({"run", "--problem", "quad-convex-2d", "--seed", "", "--out", dir});
  CHECK(r.code == cli::kOk);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 1);
  CHECK(load(dir / "quad-convex-2d_exact.report.json").at("runs").empty());
  const auto e = invoke({"envelope", "--in", dir});
  CHECK(e.code == cli::kOk);
}

TEST_CASE("inexact on the 50-D quartic over seeds 1..20") {
  const fs::path dir = scratch("q50");
  const auto r = invoke({"run", "--problem", "quartic-50d", "--algo", "inexact", "--seed", "1..20", "--out", dir});
  CHECK(r.code == cli::kOk);
  const auto rep = load(dir / "quartic-50d_inexact.report.json");
  REQUIRE(rep.at("runs").size() == 20u);
  std::vector<int> iters;
  for (const auto& run : rep.at("runs")) {
    CHECK(run.at("status") == "converged");
    CHECK(run.at("first_optwcc").at("iterations").get<double>() <= run.at("envelope").at("K_hat").get<double>());
    iters.push_back(run.at("first_optwcc").at("iterations").get<int>());
  }
  // regression values from the first verified build
  const std::vector<int> frozen(20, 34);
  CHECK(iters == frozen);
}

TEST_CASE("envelope summary over saved runs") {
  const fs::path dir = scratch("env");
  REQUIRE(invoke({"run", "--problem", "saddle-2d", "--seed", "1,2", "--out", dir}).code == cli::kOk);
  REQUIRE(invoke({"run", "--problem", "huber-1d", "--algo", "inexact", "--seed", "3", "--out", dir}).code ==
          cli::kOk);
  const auto e = invoke({"envelope", "--in", dir, "--sweep", "0.1,0.01,0.001", "--problem", "quartic-2d"});
  CHECK(e.code == cli::kOk);
  CHECK(e.out.find("grad_hv_ops") != std::string::npos);
  CHECK(e.out.find("f_evals") != std::string::npos);
  CHECK(e.out.find(" NO") == std::string::npos);
  CHECK(e.out.find("eps-scaling") != std::string::npos);
  // 3 runs x 2 quantities + header, then the sweep block
  CHECK(e.out.find("0.001") != std::string::npos);

  CHECK(invoke({"envelope", "--in", (dir / "nope").string()}).code == cli::kUsage);

  // truncating a trace makes its row count disagree with the report
  {
    const fs::path t = dir / "saddle-2d_exact_s1.trace.csv";
    const std::string text = slurp(t);
    std::ofstream out(t, std::ios::binary | std::ios::trunc);
    out << text.substr(0, text.find('\n') + 1);
  }
  CHECK(invoke({"envelope", "--in", dir}).code == cli::kUsage);
  fs::remove(dir / "saddle-2d_exact_s1.trace.csv");
  const auto missing = invoke({"envelope", "--in", dir});
  CHECK(missing.code == cli::kUsage);
  CHECK(missing.err.find("missing trace") != std::string::npos);
}

TEST_CASE("parallel runs write the same bytes as serial ones") {
  const fs::path a = scratch("par_a");
  const fs::path b = scratch("par_b");
  REQUIRE(invoke({"run", "--problem", "quartic-2d", "--algo", "inexact", "--seed", "1..6", "--out", a}).code == 0);
  REQUIRE(invoke({"run", "--problem", "quartic-2d", "--algo", "inexact", "--seed", "1..6", "--jobs", "3", "--out",
                  b})
              .code == 0);
  for (const auto& entry : fs::directory_iterator(a)) {
    CAPTURE(entry.path().filename().string());
    CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
  }
}

TEST_CASE("output directory from the environment") {
  const fs::path dir = scratch("envdir");
  setenv("SOLINE_OUT_DIR", dir.c_str(), 1);
  const auto r = invoke({"run", "--problem", "quad-convex-2d"});
  unsetenv("SOLINE_OUT_DIR");
  CHECK(r.code == cli::kOk);
  CHECK(fs::exists(dir / "quad-convex-2d_exact_s0.trace.csv"));
}

TEST_CASE("list-problems names every suite problem") {
  const auto r = invoke({"list-problems"});
  CHECK(r.code == cli::kOk);
  for (const auto& id : problems::problem_ids()) CHECK(r.out.find(id) != std::string::npos);
}
