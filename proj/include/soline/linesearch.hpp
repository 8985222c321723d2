#pragma once

#include <vector>

#include "soline/operators.hpp"
#include "soline/steps.hpp"
#include "soline/types.hpp"

namespace soline {

struct LineSearchResult {
  double alpha = 1.0;  ///< theta multiplied j times
  int j = 0;
  double decrease = 0.0;  ///< f(x) - f(x + alpha d)
  int probes = 0;         ///< value() calls, always j + 1
  double f_trial = 0.0;   ///< f(x + alpha d)
};

/// (eta / 6) alpha^3 |d|^3, the decrease a step must strictly exceed.
double cubic_decrease_threshold(double eta, double alpha, double d_norm);

/// Smallest j >= 0 with f_x - f(x + theta^j d) > eta/6 theta^{3j} |d|^3.
/// f_x is not re-evaluated. n_f grows by j + 1. Throws LineSearchStall after
/// config.max_ls_steps rejected trials, NumericalError if |d| == 0.
LineSearchResult backtrack(CountedObjective& objective, const Vector& x, double f_x, const Vector& d,
                           const SolverConfig& config);

/// The real-valued exponent j_e, j_g, j_n, j_r or j_inr (positive part
/// applied) that bounds backtracking for a step of this kind.
double ls_cap_exponent(const ProblemConstants& constants, const SolverConfig& config, StepKind kind);

/// ceil(ls_cap_exponent) + 1.
int theoretical_ls_cap(const ProblemConstants& constants, const SolverConfig& config, StepKind kind);

/// Throws ConfigError when config.max_ls_steps is smaller than a cap the
/// algorithm can need, which would turn a legal step into a stall.
void check_ls_budget(const ProblemConstants& constants, const SolverConfig& config, bool inexact);

}  // namespace soline
