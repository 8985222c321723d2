#include "soline/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace soline::io {

using nlohmann::ordered_json;

const std::vector<std::string>& trace_columns() {
  static const std::vector<std::string> cols = {
      "k",        "phase", "kind",  "x_norm", "f",      "g_norm",      "R",   "lambda", "j",      "alpha",
      "d_norm",   "decrease", "f_next", "g_next_norm", "n_f", "n_grad",      "n_hv", "lanczos_iters", "cg_iters",
  };
  return cols;
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trace_header() {
  std::string s;
  for (const auto& c : trace_columns()) {
    if (!s.empty()) s += ',';
    s += c;
  }
  return s;
}

namespace {

std::string opt_real(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }
std::string opt_int(const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); }

std::optional<double> parse_opt_real(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stod(s);
}
std::optional<int> parse_opt_int(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stoi(s);
}

ordered_json real_or_null(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

ordered_json counters_json(const EvalCounters& c) {
  return {{"n_f", c.n_f}, {"n_grad", c.n_grad}, {"n_hv", c.n_hv}, {"grad_plus_hv", c.grad_plus_hv()}};
}

ordered_json vector_json(const Vector& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

}  // namespace

std::string trace_row(const IterationRecord& r) {
  std::string s;
  auto put = [&s](const std::string& v) {
    s += ',';
    s += v;
  };
  s = std::to_string(r.k);
  put(std::string(phase_name(r.phase)));
  put(std::string(step_kind_name(r.kind)));
  put(format_real(r.x_norm));
  put(format_real(r.f));
  put(format_real(r.g_norm));
  put(opt_real(r.R));
  put(opt_real(r.lambda));
  put(std::to_string(r.j));
  put(format_real(r.alpha));
  put(format_real(r.d_norm));
  put(format_real(r.decrease));
  put(format_real(r.f_next));
  put(format_real(r.g_next_norm));
  put(std::to_string(r.counters.n_f));
  put(std::to_string(r.counters.n_grad));
  put(std::to_string(r.counters.n_hv));
  put(opt_int(r.lanczos_iters));
  put(opt_int(r.cg_iters));
  return s;
}

std::vector<IterationRecord> read_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != trace_header()) throw std::runtime_error("trace header mismatch");
  std::vector<IterationRecord> rows;
  const std::size_t ncols = trace_columns().size();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != ncols) throw std::runtime_error("malformed trace row: " + line);
    IterationRecord r;
    r.k = std::stoi(f[0]);
    if (f[1] == "main") {
      r.phase = Phase::main;
    } else if (f[1] == "local") {
      r.phase = Phase::local;
    } else {
      throw std::runtime_error("unknown phase in trace: " + f[1]);
    }
    const auto kind = parse_step_kind(f[2]);
    if (!kind) throw std::runtime_error("unknown step kind in trace: " + f[2]);
    r.kind = *kind;
    r.x_norm = std::stod(f[3]);
    r.f = std::stod(f[4]);
    r.g_norm = std::stod(f[5]);
    r.R = parse_opt_real(f[6]);
    r.lambda = parse_opt_real(f[7]);
    r.j = std::stoi(f[8]);
    r.alpha = std::stod(f[9]);
    r.d_norm = std::stod(f[10]);
    r.decrease = std::stod(f[11]);
    r.f_next = std::stod(f[12]);
    r.g_next_norm = std::stod(f[13]);
    r.counters.n_f = std::stoull(f[14]);
    r.counters.n_grad = std::stoull(f[15]);
    r.counters.n_hv = std::stoull(f[16]);
    r.lanczos_iters = parse_opt_int(f[17]);
    r.cg_iters = parse_opt_int(f[18]);
    rows.push_back(r);
  }
  return rows;
}

CsvTraceWriter::CsvTraceWriter(std::ostream& out) : out_(&out) { *out_ << trace_header() << '\n'; }

void CsvTraceWriter::operator()(const IterationRecord& r) { *out_ << trace_row(r) << '\n'; }

TraceSink CsvTraceWriter::sink() {
  return [this](const IterationRecord& r) { (*this)(r); };
}

ordered_json config_to_json(const SolverConfig& c) {
  ordered_json j;
  j["eps_g"] = c.eps_g;
  j["eps_H"] = c.eps_H;
  j["theta"] = c.theta;
  j["eta"] = c.eta;
  j["zeta"] = c.zeta;
  j["delta"] = c.delta;
  j["U_H"] = real_or_null(c.U_H);
  j["max_iters"] = c.max_iters;
  j["max_ls_steps"] = c.max_ls_steps;
  j["rng_seed"] = c.rng_seed;
  j["reach_eps2opt"] = c.reach_eps2opt;
  j["oracle_checks"] = c.oracle_checks;
  return j;
}

ordered_json report_to_json(const RunReport& r, const RunMeta& meta) {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["problem"] = meta.problem;
  j["algorithm"] = std::string(algorithm_name(r.algorithm));
  j["seed"] = r.seed;
  j["trace_file"] = meta.trace_file;
  j["config"] = config_to_json(meta.config);
  j["constants"] = {{"L_g", meta.constants.L_g},
                    {"L_H", meta.constants.L_H},
                    {"U_g", meta.constants.U_g},
                    {"U_H", meta.constants.U_H},
                    {"f_low", meta.constants.f_low}};
  j["status"] = std::string(run_status_name(r.status));
  j["message"] = r.message;
  j["n"] = r.n;
  j["f0"] = r.f0;
  j["f_final"] = r.f_final;
  j["g_norm_final"] = r.g_norm_final;
  j["lambda_final"] = real_or_null(r.lambda_final);
  j["lambda_final_dense"] = real_or_null(r.lambda_final_dense);
  j["x_final"] = vector_json(r.x_final);

  if (r.first_optwcc) {
    const Certificate& c = *r.first_optwcc;
    j["first_optwcc"] = {{"iterations", c.iterations},
                         {"g_norm", c.g_norm},
                         {"lambda", c.lambda},
                         {"counters", counters_json(c.counters)},
                         {"x_hessian", vector_json(c.x_hessian)},
                         {"x", vector_json(c.x)}};
  } else {
    j["first_optwcc"] = nullptr;
  }
  j["total_iterations"] = r.total_iterations;
  j["counters"] = counters_json(r.counters);
  j["indefinite_fallbacks"] = r.indefinite_fallbacks;
  j["lanczos_calls"] = r.lanczos_calls;
  j["lanczos_misestimates"] = r.lanczos_misestimates;
  j["ls_cap_violations"] = r.ls_cap_violations;
  j["local_phase_iterations"] = r.local_phase_iterations;
  j["reentries"] = r.reentries;
  j["local_exit"] = r.local_exit;

  const auto& e = r.envelope;
  const auto& dc = e.constants;
  ordered_json env;
  env["decrease_constants"] = {{"c_e", dc.c_e},   {"c_g", dc.c_g},   {"c_n", dc.c_n}, {"c_r", dc.c_r},
                               {"c_in", dc.c_in}, {"c_ir", dc.c_ir}, {"c", dc.c},     {"c_hat", dc.c_hat}};
  env["max_term"] = e.max_term;
  env["K_iter"] = e.K_iter;
  env["K_cal"] = e.K_cal;
  env["eval_prefactor"] = e.eval_prefactor;
  env["eval_prefactor_negative"] = e.eval_prefactor_negative;
  env["K_eval"] = e.K_eval;
  env["K_hat"] = e.K_hat;
  env["ops_per_iteration"] = e.ops_per_iteration;
  env["ops_bound"] = e.ops_bound;
  env["success_prob"] = e.success_prob;
  j["envelope"] = env;

  ordered_json checks = ordered_json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name}, {"observed", c.observed}, {"bound", c.bound}, {"pass", c.pass}});
  }
  j["checks"] = checks;
  j["envelopes_ok"] = r.envelopes_ok;

  ordered_json notes = ordered_json::array();
  notes.push_back("c = min{c_g, c_e, c_n, c_r}: the eigenvector-step constant c_e fills the curvature slot");
  if (e.eval_prefactor_negative) notes.push_back("evaluation-bound prefactor is negative; K_eval is not meaningful");
  j["notes"] = notes;
  return j;
}

}  // namespace soline::io
