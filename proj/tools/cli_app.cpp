#include "cli_app.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "soline/bounds.hpp"
#include "soline/errors.hpp"
#include "soline/problems.hpp"
#include "soline/report_io.hpp"

namespace soline::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::uint64_t parse_u64(const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError("not an unsigned integer: '" + s + "'");
  }
  errno = 0;
  const auto v = std::strtoull(s.c_str(), nullptr, 10);
  if (errno == ERANGE) throw ConfigError("seed out of range: " + s);
  return v;
}

double parse_real(const std::string& key, const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("bad value for " + key + ": '" + s + "'");
  }
  if (used != s.size()) throw ConfigError("bad value for " + key + ": '" + s + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError("bad boolean for " + key + ": '" + s + "'");
}

std::string seed_tag(std::uint64_t seed) { return "s" + std::to_string(seed); }

}  // namespace

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      seeds.push_back(parse_u64(item));
      continue;
    }
    const auto lo = parse_u64(item.substr(0, dots));
    const auto hi = parse_u64(item.substr(dots + 2));
    if (hi < lo) throw ConfigError("empty seed range: " + item);
    if (hi - lo > 1000000) throw ConfigError("seed range too large: " + item);
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  return seeds;
}

void apply_config_file(const std::string& path, SolverConfig& c) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "eps_g") {
      c.eps_g = parse_real(key, val);
    } else if (key == "eps_H") {
      c.eps_H = parse_real(key, val);
    } else if (key == "theta") {
      c.theta = parse_real(key, val);
    } else if (key == "eta") {
      c.eta = parse_real(key, val);
    } else if (key == "zeta") {
      c.zeta = parse_real(key, val);
    } else if (key == "delta") {
      c.delta = parse_real(key, val);
    } else if (key == "U_H") {
      c.U_H = parse_real(key, val);
    } else if (key == "max_iters") {
      c.max_iters = static_cast<int>(parse_real(key, val));
    } else if (key == "max_ls_steps") {
      c.max_ls_steps = static_cast<int>(parse_real(key, val));
    } else if (key == "reach_eps2opt") {
      c.reach_eps2opt = parse_bool(key, val);
    } else if (key == "oracle_checks") {
      c.oracle_checks = parse_bool(key, val);
    } else {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
}

std::string trace_file_name(const RunSpec& spec, std::uint64_t seed) {
  return spec.problem + "_" + std::string(algorithm_name(spec.algorithm)) + "_" + seed_tag(seed) + ".trace.csv";
}

std::string report_file_name(const RunSpec& spec) {
  return spec.problem + "_" + std::string(algorithm_name(spec.algorithm)) + ".report.json";
}

namespace {

struct RunOutcome {
  std::optional<RunReport> report;
  std::string error;  ///< hard solver error, if any
};

RunOutcome execute_one(const problems::SuiteProblem& problem, const RunSpec& spec, std::uint64_t seed) {
  RunOutcome out;
  SolverConfig cfg = spec.config;
  cfg.rng_seed = seed;
  const fs::path trace_path = fs::path(spec.out_dir) / trace_file_name(spec, seed);
  std::ofstream trace(trace_path, std::ios::binary | std::ios::trunc);
  if (!trace) {
    out.error = "cannot write " + trace_path.string();
    return out;
  }
  io::CsvTraceWriter writer(trace);
  try {
    out.report = run(spec.algorithm, problem.objective, problem.x0, cfg, writer.sink());
  } catch (const SolverError& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace

int cmd_run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  problems::SuiteProblem problem;
  try {
    problem = problems::make(spec.problem);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  try {
    spec.config.validate();
  } catch (const ConfigError& e) {
    err << "error: invalid configuration: " << e.what() << "\n";
    return kUsage;
  }
  std::error_code ec;
  fs::create_directories(spec.out_dir, ec);
  if (ec) {
    err << "error: cannot create output directory " << spec.out_dir << ": " << ec.message() << "\n";
    return kUsage;
  }

  std::vector<RunOutcome> outcomes(spec.seeds.size());
  std::atomic<std::size_t> next{0};
  std::mutex config_error_mutex;
  std::string config_error;
  auto worker = [&] {
    for (std::size_t i = next++; i < spec.seeds.size(); i = next++) {
      try {
        outcomes[i] = execute_one(problem, spec, spec.seeds[i]);
      } catch (const ConfigError& e) {
        std::lock_guard lock(config_error_mutex);
        if (config_error.empty()) config_error = e.what();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(spec.jobs, static_cast<int>(spec.seeds.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (!config_error.empty()) {
    err << "error: invalid configuration: " << config_error << "\n";
    return kUsage;
  }

  ordered_json report;
  report["schema_version"] = io::kReportSchemaVersion;
  report["problem"] = spec.problem;
  report["algorithm"] = std::string(algorithm_name(spec.algorithm));
  report["config"] = io::config_to_json(spec.config);
  ordered_json runs = ordered_json::array();

  bool all_ok = true;
  bool hard_error = false;
  char line[256];
  std::snprintf(line, sizeof line, "%-12s %-10s %10s %14s %8s\n", "seed", "status", "iterations", "bound", "envelope");
  out << line;
  for (std::size_t i = 0; i < spec.seeds.size(); ++i) {
    const auto seed = spec.seeds[i];
    const RunOutcome& o = outcomes[i];
    if (!o.report) {
      hard_error = true;
      err << "error: seed " << seed << ": " << o.error << "\n";
      runs.push_back({{"seed", seed}, {"status", "error"}, {"message", o.error}});
      continue;
    }
    SolverConfig cfg = spec.config;
    cfg.rng_seed = seed;
    io::RunMeta meta{spec.problem, cfg, problem.objective.constants, trace_file_name(spec, seed)};
    runs.push_back(io::report_to_json(*o.report, meta));
    const RunReport& r = *o.report;
    const bool ok = r.status == RunStatus::converged && r.envelopes_ok;
    all_ok = all_ok && ok;
    const int iters = r.first_optwcc ? r.first_optwcc->iterations : r.total_iterations;
    const double bound = r.checks.empty() ? 0.0 : r.checks.front().bound;
    std::snprintf(line, sizeof line, "%-12llu %-10s %10d %14.6g %8s\n", static_cast<unsigned long long>(seed),
                  std::string(run_status_name(r.status)).c_str(), iters, bound, r.envelopes_ok ? "ok" : "FAIL");
    out << line;
    if (!r.message.empty()) err << "seed " << seed << ": " << r.message << "\n";
  }
  report["runs"] = runs;

  const fs::path report_path = fs::path(spec.out_dir) / report_file_name(spec);
  std::ofstream rep(report_path, std::ios::binary | std::ios::trunc);
  rep << report.dump(2) << "\n";
  if (!rep) {
    err << "error: cannot write " << report_path.string() << "\n";
    return kSolverError;
  }
  if (hard_error) return kSolverError;
  return all_ok ? kOk : kNotConverged;
}

namespace {

SolverConfig config_from_json(const ordered_json& j) {
  SolverConfig c;
  c.eps_g = j.at("eps_g").get<double>();
  c.eps_H = j.at("eps_H").get<double>();
  c.theta = j.at("theta").get<double>();
  c.eta = j.at("eta").get<double>();
  c.zeta = j.at("zeta").get<double>();
  c.delta = j.at("delta").get<double>();
  if (!j.at("U_H").is_null()) c.U_H = j.at("U_H").get<double>();
  c.max_iters = j.at("max_iters").get<int>();
  c.max_ls_steps = j.at("max_ls_steps").get<int>();
  c.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  c.reach_eps2opt = j.at("reach_eps2opt").get<bool>();
  c.oracle_checks = j.at("oracle_checks").get<bool>();
  return c;
}

ProblemConstants constants_from_json(const ordered_json& j) {
  ProblemConstants c;
  c.L_g = j.at("L_g").get<double>();
  c.L_H = j.at("L_H").get<double>();
  c.U_g = j.at("U_g").get<double>();
  c.U_H = j.at("U_H").get<double>();
  c.f_low = j.at("f_low").get<double>();
  return c;
}

void print_sweep(const std::vector<double>& sweep, const std::string& problem_id, std::ostream& out) {
  const auto problem = problems::make(problem_id);
  const auto& pc = problem.objective.constants;
  const double f0 = problem.objective.value(problem.x0);
  out << "\neps-scaling (eps_g = eps, eps_H = sqrt(eps)) on " << problem_id << "\n";
  char line[320];
  std::snprintf(line, sizeof line, "%-10s %-14s %-14s %-14s %-14s %-14s %-14s %-14s\n", "eps", "eg^-3*eH^3",
                "eg^-3/2", "eH^-3", "eps^-3/2", "K_iter", "K_hat", "ops_bound");
  out << line;
  for (double eps : sweep) {
    SolverConfig c = problem.config;
    c.eps_g = eps;
    c.eps_H = std::sqrt(eps);
    const auto env = bounds::iteration_envelope(pc, c, f0, problem.objective.dim);
    std::snprintf(line, sizeof line, "%-10.3g %-14.8g %-14.8g %-14.8g %-14.8g %-14.6g %-14.6g %-14.6g\n", eps,
                  std::pow(c.eps_g, -3.0) * std::pow(c.eps_H, 3.0), std::pow(c.eps_g, -1.5), std::pow(c.eps_H, -3.0),
                  std::pow(eps, -1.5), env.K_iter, env.K_hat, env.ops_bound);
    out << line;
  }
}

}  // namespace

int cmd_envelope(const std::string& in_dir, const std::vector<double>& sweep, const std::string& sweep_problem,
                 std::ostream& out, std::ostream& err) {
  if (!fs::is_directory(in_dir)) {
    err << "error: no such directory: " << in_dir << "\n";
    return kUsage;
  }
  std::vector<fs::path> reports;
  for (const auto& entry : fs::directory_iterator(in_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > 12 && name.ends_with(".report.json")) reports.push_back(entry.path());
  }
  std::sort(reports.begin(), reports.end());

  char line[320];
  std::snprintf(line, sizeof line, "%-24s %-12s %-8s %-12s %12s %14s %8s %s\n", "problem", "algorithm", "seed",
                "quantity", "observed", "bound", "ratio", "pass");
  out << line;
  bool all_pass = true;
  for (const auto& path : reports) {
    ordered_json doc;
    try {
      std::ifstream in(path);
      doc = ordered_json::parse(in);
    } catch (const std::exception& e) {
      err << "error: cannot parse " << path.string() << ": " << e.what() << "\n";
      return kUsage;
    }
    const std::string problem = doc.value("problem", "");
    const std::string algo = doc.value("algorithm", "");
    for (const auto& run_doc : doc.at("runs")) {
      if (!run_doc.contains("trace_file")) {
        all_pass = false;
        continue;
      }
      const fs::path trace_path = path.parent_path() / run_doc.at("trace_file").get<std::string>();
      std::ifstream trace(trace_path);
      if (!trace) {
        err << "error: missing trace " << trace_path.string() << "\n";
        return kUsage;
      }
      std::vector<IterationRecord> rows;
      try {
        rows = io::read_trace(trace);
      } catch (const std::exception& e) {
        err << "error: bad trace " << trace_path.string() << ": " << e.what() << "\n";
        return kUsage;
      }
      const int total = run_doc.at("total_iterations").get<int>();
      if (static_cast<int>(rows.size()) != total) {
        err << "error: trace " << trace_path.string() << " has " << rows.size() << " rows, report says " << total
            << "\n";
        return kUsage;
      }

      const SolverConfig cfg = config_from_json(run_doc.at("config"));
      const ProblemConstants pc = constants_from_json(run_doc.at("constants"));
      const auto env =
          bounds::iteration_envelope(pc, cfg, run_doc.at("f0").get<double>(), run_doc.at("n").get<std::int64_t>());
      const auto& cert = run_doc.at("first_optwcc");
      const bool reached = !cert.is_null();
      const double iters = reached ? cert.at("iterations").get<double>() : total;
      const auto& counters = reached ? cert.at("counters") : run_doc.at("counters");
      const bool inexact = algo == "inexact";

      struct Row {
        const char* name;
        double observed;
        double bound;
      };
      std::vector<Row> table;
      if (inexact) {
        table.push_back({"iterations", iters, env.K_hat});
        table.push_back({"grad_hv_ops", counters.at("grad_plus_hv").get<double>(), env.ops_bound});
      } else {
        table.push_back({"iterations", iters, env.K_iter});
        table.push_back({"f_evals", counters.at("n_f").get<double>(), env.K_eval});
      }
      for (const auto& row : table) {
        const bool pass = reached && row.observed <= row.bound;
        all_pass = all_pass && pass;
        std::snprintf(line, sizeof line, "%-24s %-12s %-8llu %-12s %12.0f %14.6g %8.2e %s\n", problem.c_str(),
                      algo.c_str(), static_cast<unsigned long long>(run_doc.at("seed").get<std::uint64_t>()),
                      row.name, row.observed, row.bound, row.bound > 0.0 ? row.observed / row.bound : 0.0,
                      pass ? "yes" : "NO");
        out << line;
      }
    }
  }
  if (!sweep.empty()) {
    try {
      print_sweep(sweep, sweep_problem, out);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kUsage;
    }
  }
  return all_pass ? kOk : kNotConverged;
}

int cmd_list_problems(std::ostream& out) {
  char line[256];
  for (const auto& p : problems::suite()) {
    std::string kinds;
    for (StepKind k : p.branch_coverage) {
      if (!kinds.empty()) kinds += ",";
      kinds += step_kind_name(k);
    }
    std::snprintf(line, sizeof line, "%-24s n=%-4lld %s\n", p.id.c_str(), static_cast<long long>(p.objective.dim),
                  p.description.c_str());
    out << line << "    steps: " << kinds << "\n";
  }
  return kOk;
}

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Second-order line-search solver: runs, traces and complexity envelopes"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a solver on a suite problem over a list of seeds");
  std::string problem;
  std::string algo = "exact";
  std::optional<double> eps_g, eps_H, theta, eta, zeta, delta, U_H;
  std::optional<int> max_iters, max_ls_steps;
  std::string seeds = "0";
  std::string out_dir;
  std::string config_file;
  int jobs = 1;
  bool reach_eps2opt = false;
  bool oracle_checks = false;
  run->add_option("--problem", problem, "Suite problem id")->required();
  run->add_option("--algo", algo, "exact | exact-local | inexact");
  run->add_option("--eps-g", eps_g, "Gradient tolerance");
  run->add_option("--eps-H", eps_H, "Curvature tolerance");
  run->add_option("--theta", theta, "Backtracking factor");
  run->add_option("--eta", eta, "Sufficient-decrease coefficient");
  run->add_option("--zeta", zeta, "CG accuracy (inexact)");
  run->add_option("--delta", delta, "Lanczos failure probability (inexact)");
  run->add_option("--U-H", U_H, "Hessian-norm bound for the inexact method");
  run->add_option("--seed", seeds, "Seeds: comma list and/or ranges a..b");
  run->add_option("--max-iters", max_iters, "Iteration limit");
  run->add_option("--max-ls-steps", max_ls_steps, "Backtracking limit");
  run->add_option("--out", out_dir, "Output directory (default $SOLINE_OUT_DIR or ./soline_out)");
  run->add_option("--config", config_file, "Key = value file with SolverConfig fields");
  run->add_option("--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);
  run->add_flag("--reach-eps2opt", reach_eps2opt, "Continue past Newton-type termination at saddles (exact)");
  run->add_flag("--oracle-checks", oracle_checks, "Count Lanczos misestimates against a dense eigensolve");

  auto* envelope = app.add_subcommand("envelope", "Compare observed work in saved runs with the theoretical bounds");
  std::string in_dir;
  std::vector<double> sweep;
  std::string sweep_problem = "quartic-50d";
  envelope->add_option("--in", in_dir, "Directory holding reports and traces")->required();
  envelope->add_option("--sweep", sweep, "eps values for the eps_g = eps, eps_H = sqrt(eps) table")->delimiter(',');
  envelope->add_option("--problem", sweep_problem, "Problem whose constants drive the sweep table");

  app.add_subcommand("list-problems", "List suite problems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  if (run->parsed()) {
    RunSpec spec;
    spec.problem = problem;
    const auto a = parse_algorithm(algo);
    if (!a) {
      err << "error: unknown algorithm '" << algo << "'\n";
      return kUsage;
    }
    spec.algorithm = *a;
    try {
      spec.config = problems::make(problem).config;
    } catch (const std::invalid_argument& e) {
      err << "error: " << e.what() << "\n";
      return kUsage;
    }
    try {
      if (!config_file.empty()) apply_config_file(config_file, spec.config);
      if (eps_g) spec.config.eps_g = *eps_g;
      if (eps_H) spec.config.eps_H = *eps_H;
      if (theta) spec.config.theta = *theta;
      if (eta) spec.config.eta = *eta;
      if (zeta) spec.config.zeta = *zeta;
      if (delta) spec.config.delta = *delta;
      if (U_H) spec.config.U_H = *U_H;
      if (max_iters) spec.config.max_iters = *max_iters;
      if (max_ls_steps) spec.config.max_ls_steps = *max_ls_steps;
      if (reach_eps2opt) spec.config.reach_eps2opt = true;
      if (oracle_checks) spec.config.oracle_checks = true;
      spec.seeds = parse_seed_list(seeds);
    } catch (const ConfigError& e) {
      err << "error: " << e.what() << "\n";
      return kUsage;
    }
    if (out_dir.empty()) {
      const char* env = std::getenv("SOLINE_OUT_DIR");
      out_dir = env && *env ? env : "soline_out";
    }
    spec.out_dir = out_dir;
    spec.jobs = jobs;
    return cmd_run(spec, out, err);
  }
  if (envelope->parsed()) return cmd_envelope(in_dir, sweep, sweep_problem, out, err);
  return cmd_list_problems(out);
}

}  // namespace soline::cli
