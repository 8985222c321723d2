#include "soline/linesearch.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "soline/errors.hpp"

namespace soline {

double cubic_decrease_threshold(double eta, double alpha, double d_norm) {
  const double step = alpha * d_norm;
  return eta / 6.0 * (step * step * step);
}

LineSearchResult backtrack(CountedObjective& objective, const Vector& x, double f_x, const Vector& d,
                           const SolverConfig& config) {
  const double d_norm = d.norm();
  if (!(d_norm > 0.0)) throw NumericalError("line search along a zero direction");

  std::vector<double> trials;
  double alpha = 1.0;
  for (int j = 0;; ++j) {
    const double f_trial = objective.value(x + alpha * d);
    trials.push_back(f_trial);
    if (f_x - f_trial > cubic_decrease_threshold(config.eta, alpha, d_norm)) {
      return LineSearchResult{alpha, j, f_x - f_trial, j + 1, f_trial};
    }
    if (j >= config.max_ls_steps) {
      throw LineSearchStall("line-search stall: no acceptable step after " + std::to_string(j + 1) + " trials",
                            std::move(trials));
    }
    alpha *= config.theta;
  }
}

namespace {

double log_theta(double theta, double v) { return std::log(v) / std::log(theta); }
double positive_part(double v) { return v > 0.0 ? v : 0.0; }

}  // namespace

double ls_cap_exponent(const ProblemConstants& constants, const SolverConfig& config, StepKind kind) {
  const double th = config.theta;
  const double LHe = constants.L_H + config.eta;
  const double U_g = constants.U_g;
  const double eps_g = config.eps_g;
  const double eps_H = config.eps_H;
  const double zeta = config.zeta;

  switch (kind) {
    case StepKind::ScaledNegCurvGradient:
    case StepKind::NegativeCurvature:
      return positive_part(log_theta(th, 3.0 / LHe));
    case StepKind::NormalizedGradient:
      return positive_part(log_theta(
          th, std::min(5.0 / 3.0, 1.0 / std::sqrt(LHe)) * std::min(std::sqrt(eps_g) / eps_H, 1.0)));
    case StepKind::Newton:
      return positive_part(log_theta(th, std::sqrt(3.0 / LHe) * eps_H / std::sqrt(U_g)));
    case StepKind::RegularizedNewton:
      return positive_part(log_theta(th, 6.0 / LHe * eps_H * eps_H / U_g));
    case StepKind::InexactNewton:
    case StepKind::InexactRegularizedNewton:
      return positive_part(
          0.5 * log_theta(th, 3.0 / LHe * (1.0 - zeta) * eps_H * eps_H / (U_g * std::sqrt(1.0 + zeta * zeta / 4.0))));
  }
  return 0.0;
}

int theoretical_ls_cap(const ProblemConstants& constants, const SolverConfig& config, StepKind kind) {
  return static_cast<int>(std::ceil(ls_cap_exponent(constants, config, kind))) + 1;
}

void check_ls_budget(const ProblemConstants& constants, const SolverConfig& config, bool inexact) {
  const StepKind exact_kinds[] = {StepKind::ScaledNegCurvGradient, StepKind::NormalizedGradient,
                                  StepKind::NegativeCurvature, StepKind::Newton, StepKind::RegularizedNewton};
  const StepKind inexact_kinds[] = {StepKind::ScaledNegCurvGradient, StepKind::NormalizedGradient,
                                    StepKind::NegativeCurvature, StepKind::InexactNewton};
  auto check = [&](StepKind k) {
    const int cap = theoretical_ls_cap(constants, config, k);
    if (config.max_ls_steps < cap) {
      throw ConfigError("max_ls_steps = " + std::to_string(config.max_ls_steps) + " is below the backtracking cap " +
                        std::to_string(cap) + " for " + std::string(step_kind_name(k)));
    }
  };
  if (inexact) {
    for (StepKind k : inexact_kinds) check(k);
  } else {
    for (StepKind k : exact_kinds) check(k);
  }
}

}  // namespace soline
