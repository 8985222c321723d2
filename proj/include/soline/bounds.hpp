#pragma once

#include <cstdint>
#include <optional>

#include "soline/operators.hpp"
#include "soline/steps.hpp"

namespace soline::bounds {

struct DecreaseConstants {
  double c_e = 0.0;
  double c_g = 0.0;
  double c_n = 0.0;
  double c_r = 0.0;
  double c_in = 0.0;
  double c_ir = 0.0;
  double c = 0.0;      ///< min{c_g, c_e, c_n, c_r}
  double c_hat = 0.0;  ///< min{c_e/8, c_g, c_in, c_ir}
};

/// Per-step decrease constants. Requires theta in (0,1), eta > 0, L_H >= 0,
/// zeta in [0,1); throws std::invalid_argument otherwise.
DecreaseConstants decrease_constants(double theta, double eta, double L_H, double zeta);

struct ComplexityEnvelope {
  DecreaseConstants constants;
  double max_term = 0.0;  ///< max{eps_g^-3 eps_H^3, eps_g^-3/2, eps_H^-3}
  double K_iter = 0.0;
  double K_cal = 0.0;          ///< log-constant inside K_eval
  double eval_prefactor = 0.0; ///< 1 + K_cal + log_theta(min{eps_H^2, eps_g^1/2 eps_H^-1})
  bool eval_prefactor_negative = false;
  double K_eval = 0.0;
  double K_hat = 0.0;
  double ops_per_iteration = 0.0;
  double ops_bound = 0.0;
  double success_prob = 0.0;  ///< 1 - K_hat delta (may be negative)
};

/// Iteration, evaluation and operation envelopes. The operation bound uses
/// U_H from the config when set, else from the constants. Requires
/// f0 >= f_low.
ComplexityEnvelope iteration_envelope(const ProblemConstants& constants, const SolverConfig& config, double f0,
                                      std::int64_t n);

/// max{eps_g^-3 eps_H^3, eps_g^-3/2, eps_H^-3}.
double max_term(double eps_g, double eps_H);

struct LocalRate {
  double gradient_threshold = 0.0;  ///< min{3 mu^4 / (L_H + eta), eps_g}
  double contraction = 0.0;         ///< L_H / (2 mu^2)
};

LocalRate local_rate_constants(double L_H, double eta, double eps_g, double mu);

/// (-a + sqrt(a^2 + b)) * min(t, 1).
double scalar_root_bound(double a, double b, double t);
/// -a + sqrt(a^2 + b t), evaluated without cancellation.
double scalar_root_lhs(double a, double b, double t);

/// Guaranteed decrease for one accepted step.
///
/// curvature is |d^T H d| / |d|^2 (eig-type kinds), g_next_norm is
/// |grad f(x_{k+1})| (Newton-type kinds). Missing inputs for the kind throw
/// std::invalid_argument.
double decrease_floor(StepKind kind, const DecreaseConstants& constants, const SolverConfig& config,
                      std::optional<double> curvature, std::optional<double> g_next_norm);

}  // namespace soline::bounds
