#include "soline/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace soline::bounds {

namespace {

double cube(double v) { return v * v * v; }
double log_theta(double theta, double v) { return std::log(v) / std::log(theta); }
double positive_part(double v) { return v > 0.0 ? v : 0.0; }

}  // namespace

DecreaseConstants decrease_constants(double theta, double eta, double L_H, double zeta) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("decrease_constants: theta must lie in (0,1)");
  if (!(eta > 0.0)) throw std::invalid_argument("decrease_constants: eta must be positive");
  if (!(L_H >= 0.0)) throw std::invalid_argument("decrease_constants: L_H must be nonnegative");
  if (!(zeta >= 0.0 && zeta < 1.0)) throw std::invalid_argument("decrease_constants: zeta must lie in [0,1)");

  const double pre = eta / 6.0;
  const double LHe = L_H + eta;
  const double th3 = cube(theta);
  const double inf = std::numeric_limits<double>::infinity();

  DecreaseConstants c;
  c.c_e = pre * std::min(1.0, 27.0 * th3 / cube(LHe));
  c.c_g = pre * std::min({1.0, th3 / std::pow(LHe, 1.5), 125.0 * th3 / 27.0});
  const double newton_local = L_H > 0.0 ? std::pow(2.0 / L_H, 1.5) : inf;
  c.c_n = pre * std::min(newton_local, cube(3.0 * theta / LHe));
  c.c_r = pre * std::min(cube(1.0 / (1.0 + std::sqrt(1.0 + L_H / 2.0))), cube(6.0 * theta / LHe));
  const double in_den = zeta + std::sqrt(zeta * zeta + 8.0 * L_H);
  const double in_local = in_den > 0.0 ? cube(4.0 / in_den) : inf;
  const double inexact_ls = cube(3.0 * theta * theta * (1.0 - zeta) / LHe);
  c.c_in = pre * std::min(in_local, inexact_ls);
  c.c_ir = pre * std::min(cube(4.0 / (4.0 + zeta + std::sqrt((4.0 + zeta) * (4.0 + zeta) + 8.0 * L_H))), inexact_ls);
  c.c = std::min({c.c_g, c.c_e, c.c_n, c.c_r});
  c.c_hat = std::min({c.c_e / 8.0, c.c_g, c.c_in, c.c_ir});
  return c;
}

double max_term(double eps_g, double eps_H) {
  return std::max({std::pow(eps_g, -3.0) * cube(eps_H), std::pow(eps_g, -1.5), std::pow(eps_H, -3.0)});
}

ComplexityEnvelope iteration_envelope(const ProblemConstants& constants, const SolverConfig& config, double f0,
                                      std::int64_t n) {
  if (!(f0 >= constants.f_low)) throw std::invalid_argument("iteration_envelope: f0 is below f_low");
  if (n <= 0) throw std::invalid_argument("iteration_envelope: n must be positive");

  const double eps_g = config.eps_g;
  const double eps_H = config.eps_H;
  const double th = config.theta;
  const double LHe = constants.L_H + config.eta;
  const double U_g = constants.U_g;
  const double gap = f0 - constants.f_low;

  ComplexityEnvelope env;
  env.constants = decrease_constants(th, config.eta, constants.L_H, config.zeta);
  env.max_term = max_term(eps_g, eps_H);
  env.K_iter = gap / env.constants.c * env.max_term;

  env.K_cal = positive_part(log_theta(
      th, std::min({3.0 / LHe, 5.0 / 3.0, 1.0 / std::sqrt(LHe), std::sqrt(3.0 / (LHe * U_g)), 6.0 / (LHe * U_g)})));
  env.eval_prefactor = 1.0 + env.K_cal + log_theta(th, std::min(eps_H * eps_H, std::sqrt(eps_g) / eps_H));
  env.eval_prefactor_negative = env.eval_prefactor < 0.0;
  env.K_eval = env.eval_prefactor * env.K_iter;

  env.K_hat = gap / env.constants.c_hat * env.max_term;

  const double U_H = config.U_H.value_or(constants.U_H);
  const double M = U_H + 2.0;
  const double nd = static_cast<double>(n);
  const double sqrt_ratio = std::sqrt(M) / std::sqrt(eps_H);
  double cg_term = nd;
  if (config.zeta > 0.0) {
    cg_term = std::min(nd, sqrt_ratio / std::sqrt(2.0) * std::log(4.0 * std::pow(M, 1.5) * std::pow(eps_H, -1.5) /
                                                                  config.zeta));
  }
  double lanczos_term = nd;
  if (config.delta > 0.0) lanczos_term = std::min(nd, sqrt_ratio * std::log(nd / (config.delta * config.delta)) / 2.0);
  env.ops_per_iteration = 2.0 + cg_term + lanczos_term;
  env.ops_bound = env.ops_per_iteration * env.K_hat;
  env.success_prob = 1.0 - env.K_hat * config.delta;
  return env;
}

LocalRate local_rate_constants(double L_H, double eta, double eps_g, double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("local_rate_constants: mu must be positive");
  LocalRate r;
  r.gradient_threshold = std::min(3.0 * std::pow(mu, 4.0) / (L_H + eta), eps_g);
  r.contraction = L_H / (2.0 * mu * mu);
  return r;
}

double scalar_root_bound(double a, double b, double t) {
  if (!(a > 0.0 && b > 0.0 && t >= 0.0)) throw std::invalid_argument("scalar_root_bound: need a, b > 0 and t >= 0");
  // Same numerator as scalar_root_lhs for t <= 1, so the rounded values keep
  // the ordering of the exact ones.
  return b * std::min(t, 1.0) / (a + std::sqrt(a * a + b));
}

double scalar_root_lhs(double a, double b, double t) {
  if (!(a > 0.0 && b > 0.0 && t >= 0.0)) throw std::invalid_argument("scalar_root_lhs: need a, b > 0 and t >= 0");
  return b * t / (a + std::sqrt(a * a + b * t));
}

double decrease_floor(StepKind kind, const DecreaseConstants& constants, const SolverConfig& config,
                      std::optional<double> curvature, std::optional<double> g_next_norm) {
  const double eps_g = config.eps_g;
  const double eps_H = config.eps_H;
  auto need = [](std::optional<double> v, const char* what) {
    if (!v) throw std::invalid_argument(std::string("decrease_floor: missing ") + what);
    return *v;
  };
  switch (kind) {
    case StepKind::ScaledNegCurvGradient:
    case StepKind::NegativeCurvature:
      return constants.c_e * cube(std::abs(need(curvature, "curvature")));
    case StepKind::NormalizedGradient:
      return constants.c_g * std::min(cube(eps_g) / cube(eps_H), std::pow(eps_g, 1.5));
    case StepKind::Newton:
      return constants.c_n * std::min(std::pow(need(g_next_norm, "g_next_norm"), 1.5), cube(eps_H));
    case StepKind::RegularizedNewton:
      return constants.c_r * std::min(cube(need(g_next_norm, "g_next_norm")) / cube(eps_H), cube(eps_H));
    case StepKind::InexactNewton:
      return constants.c_in * std::min(cube(need(g_next_norm, "g_next_norm")) / cube(eps_H), cube(eps_H));
    case StepKind::InexactRegularizedNewton:
      return constants.c_ir * std::min(cube(need(g_next_norm, "g_next_norm")) / cube(eps_H), cube(eps_H));
  }
  return 0.0;
}

}  // namespace soline::bounds
