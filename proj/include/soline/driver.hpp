#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "soline/bounds.hpp"
#include "soline/operators.hpp"
#include "soline/steps.hpp"
#include "soline/types.hpp"

namespace soline {

enum class Algorithm { exact, exact_local, inexact };
enum class Phase { main, local };

std::string_view algorithm_name(Algorithm a) noexcept;
std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept;
std::string_view phase_name(Phase p) noexcept;

/// One accepted step. Field order is the trace column order.
struct IterationRecord {
  int k = 0;
  Phase phase = Phase::main;
  StepKind kind = StepKind::Newton;
  double x_norm = 0.0;
  double f = 0.0;
  double g_norm = 0.0;
  std::optional<double> R;
  std::optional<double> lambda;  ///< lambda_k, or lambda^i_k for the inexact method
  int j = 0;
  double alpha = 1.0;
  double d_norm = 0.0;
  double decrease = 0.0;
  double f_next = 0.0;
  double g_next_norm = 0.0;
  EvalCounters counters;  ///< cumulative, after the step
  std::optional<int> lanczos_iters;
  std::optional<int> cg_iters;
};

enum class RunStatus { converged, max_iters, ls_stall, cg_cap };
std::string_view run_status_name(RunStatus s) noexcept;

struct EnvelopeCheck {
  std::string name;  ///< "iterations", "f_evals" or "grad_hv_ops"
  double observed = 0.0;
  double bound = 0.0;
  bool pass = false;
};

/// First point meeting min{|g_k|, |g_{k+1}|} <= eps_g with the curvature test
/// passed at x_k.
struct Certificate {
  Vector x_hessian;      ///< x_k, whose Hessian passed the test
  Vector x;              ///< x_k or x_{k+1}, where the run stopped
  double g_norm = 0.0;   ///< min{|g_k|, |g_{k+1}|}
  double lambda = 0.0;   ///< estimate used by the test at x_k
  int iterations = 0;    ///< accepted steps before this point
  EvalCounters counters;
};

struct RunReport {
  Algorithm algorithm = Algorithm::exact;
  RunStatus status = RunStatus::max_iters;
  std::string message;
  std::uint64_t seed = 0;
  std::int64_t n = 0;
  double f0 = 0.0;

  Vector x_final;
  double f_final = 0.0;
  double g_norm_final = 0.0;
  std::optional<double> lambda_final;        ///< estimate at the final point, when computed
  std::optional<double> lambda_final_dense;  ///< dense lambda_min at x_final (uncounted)

  std::optional<Certificate> first_optwcc;
  int total_iterations = 0;
  EvalCounters counters;

  int indefinite_fallbacks = 0;
  int lanczos_calls = 0;
  int lanczos_misestimates = 0;  ///< only counted with oracle_checks
  int ls_cap_violations = 0;
  int local_phase_iterations = 0;
  int reentries = 0;
  std::string local_exit;  ///< "", "gradient_floor", "max_iters" or "ls_stall"

  bounds::ComplexityEnvelope envelope;
  std::vector<EnvelopeCheck> checks;
  bool envelopes_ok = false;
};

using TraceSink = std::function<void(const IterationRecord&)>;

enum class TerminationMode { exact, inexact };

/// min{g_norm, g_next_norm} <= eps_g and lambda >= -eps_H (exact) or
/// lambda >= -eps_H / 2 (inexact). Both inequalities are closed.
bool check_termination(double g_norm, std::optional<double> g_next_norm, double lambda, const SolverConfig& config,
                       TerminationMode mode);

/// Gradient norm at which the local phase stops: max(1e-14, 1e-6 eps_g).
double local_phase_floor(const SolverConfig& config);

/// Exact method, optionally switching to the local phase at every
/// approximate second-order point. Requires a dense Hessian.
/// Throws ConfigError for invalid input and NumericalError on breakdown;
/// line-search stalls end the run with status ls_stall.
RunReport run_exact(const Objective& objective, const Vector& x0, const SolverConfig& config, bool local_phase = false,
                    const TraceSink& sink = {});

/// Inexact method. Matrix-free; the dense Hessian is only touched for
/// oracle_checks and the final diagnostic lambda. Requires zeta > 0.
RunReport run_inexact(const Objective& objective, const Vector& x0, const SolverConfig& config,
                      const TraceSink& sink = {});

struct IterateState {
  Vector x;
  double f = 0.0;
  Vector g;  ///< grad f(x), always cached
};

enum class LocalExit { return_to_main, gradient_floor, max_iters, ls_stall };

struct LocalPhaseResult {
  LocalExit exit = LocalExit::return_to_main;
  int iterations = 0;
};

/// Newton-only loop entered from an approximate second-order point. Returns
/// to the caller when |g| > eps_g or lambda_min < -eps_H; takes a regularized
/// step for lambda in [-eps_H, 0] and a full Newton step otherwise. k is the
/// global iteration index and is advanced per step; the loop never goes past
/// config.max_iters.
LocalPhaseResult run_local_phase(CountedObjective& objective, IterateState& state, const SolverConfig& config, int& k,
                                 const TraceSink& sink = {});

RunReport run(Algorithm algorithm, const Objective& objective, const Vector& x0, const SolverConfig& config,
              const TraceSink& sink = {});

}  // namespace soline
