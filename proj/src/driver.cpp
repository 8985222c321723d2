#include "soline/driver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "soline/cgsolve.hpp"
#include "soline/eigensolvers.hpp"
#include "soline/errors.hpp"
#include "soline/linesearch.hpp"
#include "soline/rng.hpp"

namespace soline {

std::string_view algorithm_name(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::exact:
      return "exact";
    case Algorithm::exact_local:
      return "exact-local";
    case Algorithm::inexact:
      return "inexact";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept {
  for (Algorithm a : {Algorithm::exact, Algorithm::exact_local, Algorithm::inexact}) {
    if (algorithm_name(a) == name) return a;
  }
  return std::nullopt;
}

std::string_view phase_name(Phase p) noexcept { return p == Phase::main ? "main" : "local"; }

std::string_view run_status_name(RunStatus s) noexcept {
  switch (s) {
    case RunStatus::converged:
      return "converged";
    case RunStatus::max_iters:
      return "max_iters";
    case RunStatus::ls_stall:
      return "ls_stall";
    case RunStatus::cg_cap:
      return "cg_cap";
  }
  return "unknown";
}

bool check_termination(double g_norm, std::optional<double> g_next_norm, double lambda, const SolverConfig& config,
                       TerminationMode mode) {
  const double g = g_next_norm ? std::min(g_norm, *g_next_norm) : g_norm;
  const double lambda_min = mode == TerminationMode::exact ? -config.eps_H : -0.5 * config.eps_H;
  return g <= config.eps_g && lambda >= lambda_min;
}

double local_phase_floor(const SolverConfig& config) { return std::max(1e-14, config.eps_g * 1e-6); }

namespace {

struct StepOutcome {
  IterationRecord record;
  Vector x_next;
  Vector g_next;
};

// Line search along d from state, evaluate the new gradient once, and build
// the trace row. Does not modify state.
StepOutcome take_step(CountedObjective& objective, const IterateState& state, const Direction& dir,
                      const SolverConfig& config, int k, Phase phase) {
  const LineSearchResult ls = backtrack(objective, state.x, state.f, dir.d, config);
  StepOutcome out;
  out.x_next = state.x + ls.alpha * dir.d;
  out.g_next = objective.gradient(out.x_next);
  if (!out.g_next.allFinite()) throw NumericalError("non-finite gradient at iteration " + std::to_string(k));

  IterationRecord& r = out.record;
  r.k = k;
  r.phase = phase;
  r.kind = dir.kind;
  r.x_norm = state.x.norm();
  r.f = state.f;
  r.g_norm = state.g.norm();
  r.R = dir.diagnostics.R;
  r.lambda = dir.diagnostics.lambda;
  r.j = ls.j;
  r.alpha = ls.alpha;
  r.d_norm = dir.d.norm();
  r.decrease = ls.decrease;
  r.f_next = ls.f_trial;
  r.g_next_norm = out.g_next.norm();
  r.counters = objective.counters();
  r.lanczos_iters = dir.diagnostics.lanczos_iters;
  r.cg_iters = dir.diagnostics.cg_iters;
  return out;
}

void advance(IterateState& state, StepOutcome& step) {
  state.x = std::move(step.x_next);
  state.f = step.record.f_next;
  state.g = std::move(step.g_next);
}

void validate_run(const Objective& objective, const Vector& x0, const SolverConfig& config) {
  config.validate();
  if (objective.dim <= 0) throw ConfigError("objective dimension must be positive");
  if (x0.size() != objective.dim) throw ConfigError("x0 has the wrong dimension");
  if (!objective.value || !objective.gradient || !objective.hessian_vector) {
    throw ConfigError("objective is missing value, gradient or Hessian-vector callbacks");
  }
}

class Runner {
 public:
  Runner(const Objective& objective, const Vector& x0, const SolverConfig& config, Algorithm algorithm,
         const TraceSink& sink)
      : objective_(objective), counted_(objective), config_(config), algorithm_(algorithm), sink_(sink),
        rng_(config.rng_seed) {
    validate_run(objective, x0, config);
    const bool inexact = algorithm == Algorithm::inexact;
    if (!inexact && !objective.has_dense_hessian()) throw ConfigError("the exact method needs a dense Hessian");
    if (inexact && !(config.zeta > 0.0)) throw ConfigError("the inexact method needs zeta in (0,1)");
    if (config.oracle_checks && !objective.has_dense_hessian()) {
      throw ConfigError("oracle_checks needs a dense Hessian");
    }
    check_ls_budget(objective.constants, config, inexact);

    state_.x = x0;
    state_.f = counted_.value(x0);
    if (!std::isfinite(state_.f)) throw NumericalError("f(x0) is not finite");
    state_.g = counted_.gradient(x0);
    if (!state_.g.allFinite()) throw NumericalError("grad f(x0) is not finite");

    report_.algorithm = algorithm;
    report_.seed = config.rng_seed;
    report_.n = objective.dim;
    report_.f0 = state_.f;
    if (state_.f < objective.constants.f_low) {
      throw ConfigError("f(x0) is below the declared f_low; the problem constants are inconsistent");
    }
    report_.envelope = bounds::iteration_envelope(objective.constants, config, state_.f, objective.dim);
  }

  RunReport run() {
    try {
      loop();
    } catch (const LineSearchStall& e) {
      report_.status = RunStatus::ls_stall;
      report_.message = e.what();
    } catch (const CgCapReached& e) {
      report_.status = RunStatus::cg_cap;
      report_.message = e.what();
    }
    finish();
    return std::move(report_);
  }

 private:
  bool inexact() const { return algorithm_ == Algorithm::inexact; }

  void emit(const IterationRecord& r) {
    if (!(r.decrease > cubic_decrease_threshold(config_.eta, r.alpha, r.d_norm))) {
      throw NumericalError("accepted step violates the sufficient-decrease test");
    }
    if (r.j > theoretical_ls_cap(objective_.constants, config_, r.kind)) ++report_.ls_cap_violations;
    if (r.phase == Phase::local) ++report_.local_phase_iterations;
    if (sink_) sink_(r);
  }

  void record_optwcc(const Vector& x_hessian, double g_norm, double lambda, int iterations) {
    if (report_.first_optwcc) return;
    Certificate c;
    c.x_hessian = x_hessian;
    c.x = state_.x;
    c.g_norm = g_norm;
    c.lambda = lambda;
    c.iterations = iterations;
    c.counters = counted_.counters();
    report_.first_optwcc = std::move(c);
  }

  void oracle_check(const Vector& x, const Selection& sel) {
    if (!config_.oracle_checks || !inexact()) return;
    double lambda_i = 0.0;
    if (const auto* t = std::get_if<Terminate>(&sel)) {
      lambda_i = t->lambda;
    } else {
      const auto& d = std::get<Direction>(sel);
      if (!d.diagnostics.lanczos_iters) return;
      lambda_i = *d.diagnostics.lambda;
    }
    const double lambda_min = min_eigenpair_exact(counted_.dense_hessian(x)).lambda;
    if (lambda_i > lambda_min + 0.5 * config_.eps_H) ++report_.lanczos_misestimates;
  }

  Selection select(int k) {
    if (!inexact()) return select_direction_exact(counted_, state_.x, state_.g, config_);
    Rng stream = rng_.split(static_cast<std::uint64_t>(k));
    Selection sel = select_direction_inexact(counted_, state_.x, state_.g, config_, stream);
    const bool used_lanczos = std::holds_alternative<Terminate>(sel) ||
                              std::get<Direction>(sel).diagnostics.lanczos_iters.has_value();
    if (used_lanczos) ++report_.lanczos_calls;
    oracle_check(state_.x, sel);
    return sel;
  }

  // Main loop; returns when the run terminates.
  void loop() {
    const bool local = algorithm_ == Algorithm::exact_local;
    const TerminationMode mode = inexact() ? TerminationMode::inexact : TerminationMode::exact;
    while (true) {
      if (k_ >= config_.max_iters) {
        report_.status = RunStatus::max_iters;
        report_.message = "iteration limit reached";
        return;
      }
      const Selection sel = select(k_);

      if (const auto* t = std::get_if<Terminate>(&sel)) {
        record_optwcc(state_.x, state_.g.norm(), t->lambda, k_);
        report_.lambda_final = t->lambda;
        if (local && enter_local()) continue;
        report_.status = RunStatus::converged;
        return;
      }

      const Direction& dir = std::get<Direction>(sel);
      if (dir.diagnostics.indefinite_fallback) ++report_.indefinite_fallbacks;
      const Vector x_k = state_.x;
      const double g_k_norm = state_.g.norm();
      StepOutcome step = take_step(counted_, state_, dir, config_, k_, Phase::main);
      emit(step.record);
      advance(state_, step);
      ++k_;

      if (!is_newton_step(dir.kind)) continue;
      const double g_next_norm = state_.g.norm();
      if (g_next_norm > config_.eps_g) continue;
      // The Newton-type branch already certified the curvature at x_k.
      const double lambda_k = *dir.diagnostics.lambda;
      if (!check_termination(g_k_norm, g_next_norm, lambda_k, config_, mode)) {
        throw SolverError("post-step termination reached without the curvature certificate");
      }
      record_optwcc(x_k, std::min(g_k_norm, g_next_norm), lambda_k, k_);
      report_.lambda_final.reset();

      if (local) {
        if (enter_local()) continue;
        report_.status = RunStatus::converged;
        return;
      }
      if (config_.reach_eps2opt && !inexact()) {
        const double lambda_next = min_eigenpair_exact(counted_.dense_hessian(state_.x)).lambda;
        if (lambda_next < -config_.eps_H) continue;
        report_.lambda_final = lambda_next;
      }
      report_.status = RunStatus::converged;
      return;
    }
  }

  // Runs the local phase. True means control went back to the main loop.
  bool enter_local() {
    const LocalPhaseResult res = run_local_phase(counted_, state_, config_, k_, [this](const IterationRecord& r) {
      emit(r);
    });
    switch (res.exit) {
      case LocalExit::return_to_main:
        ++report_.reentries;
        report_.lambda_final.reset();
        return true;
      case LocalExit::gradient_floor:
        report_.local_exit = "gradient_floor";
        break;
      case LocalExit::max_iters:
        report_.local_exit = "max_iters";
        break;
      case LocalExit::ls_stall:
        report_.local_exit = "ls_stall";
        break;
    }
    if (res.iterations > 0) report_.lambda_final.reset();
    return false;
  }

  void finish() {
    report_.x_final = state_.x;
    report_.f_final = state_.f;
    report_.g_norm_final = state_.g.norm();
    report_.total_iterations = k_;
    report_.counters = counted_.counters();
    if (objective_.has_dense_hessian()) {
      report_.lambda_final_dense = min_eigenpair_exact(counted_.dense_hessian(state_.x)).lambda;
    }

    const auto& env = report_.envelope;
    const bool reached = report_.first_optwcc.has_value();
    const double iterations = reached ? report_.first_optwcc->iterations : report_.total_iterations;
    const EvalCounters& c = reached ? report_.first_optwcc->counters : report_.counters;
    auto add = [&](const char* name, double observed, double bound) {
      report_.checks.push_back(EnvelopeCheck{name, observed, bound, observed <= bound});
    };
    if (inexact()) {
      add("iterations", iterations, env.K_hat);
      add("grad_hv_ops", static_cast<double>(c.grad_plus_hv()), env.ops_bound);
    } else {
      add("iterations", iterations, env.K_iter);
      add("f_evals", static_cast<double>(c.n_f), env.K_eval);
    }
    report_.envelopes_ok = reached && std::all_of(report_.checks.begin(), report_.checks.end(),
                                                  [](const EnvelopeCheck& e) { return e.pass; });
  }

  const Objective& objective_;
  CountedObjective counted_;
  const SolverConfig& config_;
  Algorithm algorithm_;
  const TraceSink& sink_;
  Rng rng_;
  IterateState state_;
  RunReport report_;
  int k_ = 0;
};

}  // namespace

LocalPhaseResult run_local_phase(CountedObjective& objective, IterateState& state, const SolverConfig& config, int& k,
                                 const TraceSink& sink) {
  LocalPhaseResult res;
  const double floor = local_phase_floor(config);
  while (true) {
    const double g_norm = state.g.norm();
    if (g_norm > config.eps_g) {
      res.exit = LocalExit::return_to_main;
      return res;
    }
    if (g_norm <= floor) {
      res.exit = LocalExit::gradient_floor;
      return res;
    }
    const Matrix H = objective.dense_hessian(state.x);
    const EigEstimate eig = min_eigenpair_exact(H);
    if (eig.lambda < -config.eps_H) {
      res.exit = LocalExit::return_to_main;
      return res;
    }
    if (k >= config.max_iters) {
      res.exit = LocalExit::max_iters;
      return res;
    }
    const bool regularized = eig.lambda <= 0.0;
    const double shift = regularized ? 2.0 * config.eps_H : 0.0;
    Direction dir{regularized ? StepKind::RegularizedNewton : StepKind::Newton, solve_exact(H, state.g, shift), {}};
    dir.diagnostics.lambda = eig.lambda;
    dir.diagnostics.residual_norm = (H * dir.d + shift * dir.d + state.g).norm();

    StepOutcome step;
    try {
      step = take_step(objective, state, dir, config, k, Phase::local);
    } catch (const LineSearchStall&) {
      res.exit = LocalExit::ls_stall;
      return res;
    }
    if (sink) sink(step.record);
    advance(state, step);
    ++k;
    ++res.iterations;
  }
}

RunReport run_exact(const Objective& objective, const Vector& x0, const SolverConfig& config, bool local_phase,
                    const TraceSink& sink) {
  return Runner(objective, x0, config, local_phase ? Algorithm::exact_local : Algorithm::exact, sink).run();
}

RunReport run_inexact(const Objective& objective, const Vector& x0, const SolverConfig& config,
                      const TraceSink& sink) {
  return Runner(objective, x0, config, Algorithm::inexact, sink).run();
}

RunReport run(Algorithm algorithm, const Objective& objective, const Vector& x0, const SolverConfig& config,
              const TraceSink& sink) {
  if (algorithm == Algorithm::inexact) return run_inexact(objective, x0, config, sink);
  return run_exact(objective, x0, config, algorithm == Algorithm::exact_local, sink);
}

}  // namespace soline
