#include "soline/steps.hpp"

#include <cmath>
#include <string>

#include "soline/errors.hpp"

namespace soline {

std::string_view step_kind_name(StepKind kind) noexcept {
  switch (kind) {
    case StepKind::ScaledNegCurvGradient:
      return "scaled_negcurv_gradient";
    case StepKind::NormalizedGradient:
      return "normalized_gradient";
    case StepKind::NegativeCurvature:
      return "negative_curvature";
    case StepKind::Newton:
      return "newton";
    case StepKind::RegularizedNewton:
      return "regularized_newton";
    case StepKind::InexactNewton:
      return "inexact_newton";
    case StepKind::InexactRegularizedNewton:
      return "inexact_regularized_newton";
  }
  return "unknown";
}

std::optional<StepKind> parse_step_kind(std::string_view name) noexcept {
  for (StepKind k : kAllStepKinds) {
    if (step_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

bool is_curvature_step(StepKind kind) noexcept {
  return kind == StepKind::ScaledNegCurvGradient || kind == StepKind::NegativeCurvature;
}

bool is_newton_step(StepKind kind) noexcept {
  return kind == StepKind::Newton || kind == StepKind::RegularizedNewton || kind == StepKind::InexactNewton ||
         kind == StepKind::InexactRegularizedNewton;
}

void SolverConfig::validate() const {
  auto open_unit = [](double v) { return v > 0.0 && v < 1.0; };
  auto half_open_unit = [](double v) { return v >= 0.0 && v < 1.0; };
  if (!open_unit(eps_g)) throw ConfigError("eps_g must lie in (0,1), got " + std::to_string(eps_g));
  if (!open_unit(eps_H)) throw ConfigError("eps_H must lie in (0,1), got " + std::to_string(eps_H));
  if (!open_unit(theta)) throw ConfigError("theta must lie in (0,1), got " + std::to_string(theta));
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError("eta must be positive, got " + std::to_string(eta));
  if (!half_open_unit(zeta)) throw ConfigError("zeta must lie in [0,1), got " + std::to_string(zeta));
  if (!half_open_unit(delta)) throw ConfigError("delta must lie in [0,1), got " + std::to_string(delta));
  if (U_H && !(*U_H > 0.0)) throw ConfigError("U_H must be positive");
  if (max_iters <= 0) throw ConfigError("max_iters must be positive");
  if (max_ls_steps <= 0) throw ConfigError("max_ls_steps must be positive");
}

std::optional<double> Direction::curvature() const {
  if (kind == StepKind::ScaledNegCurvGradient) return diagnostics.R;
  if (kind == StepKind::NegativeCurvature) return diagnostics.lambda;
  return std::nullopt;
}

Vector scale_eigvector(const Vector& v_unit, double lambda, const Vector& g) {
  const double magnitude = lambda < 0.0 ? -lambda : 0.0;
  if (magnitude == 0.0) return Vector::Zero(v_unit.size());
  const double sign = v_unit.dot(g) > 0.0 ? -1.0 : 1.0;
  return (sign * magnitude) * v_unit;
}

namespace {

// Step 1, shared by both methods. Returns a direction or nullopt for Step 2.
std::optional<Direction> first_order_step(CountedObjective& objective, const Vector& x, const Vector& g,
                                          double g_norm, const SolverConfig& config, std::optional<double>& R_out) {
  if (g_norm == 0.0) return std::nullopt;
  const double R = rayleigh_quotient(objective, x, g);
  R_out = R;
  if (!std::isfinite(R)) throw NumericalError("non-finite curvature along the gradient");
  if (R < -config.eps_H) {
    Direction dir{StepKind::ScaledNegCurvGradient, (R / g_norm) * g, {}};
    dir.diagnostics.R = R;
    return dir;
  }
  if (R >= -config.eps_H && R <= config.eps_H && g_norm > config.eps_g) {
    Direction dir{StepKind::NormalizedGradient, -g / std::sqrt(g_norm), {}};
    dir.diagnostics.R = R;
    return dir;
  }
  return std::nullopt;
}

}  // namespace

Selection select_direction_exact(CountedObjective& objective, const Vector& x, const Vector& g,
                                 const SolverConfig& config, const ExactSolvers& solvers) {
  const double g_norm = g.norm();
  std::optional<double> R;
  if (auto dir = first_order_step(objective, x, g, g_norm, config, R)) return *std::move(dir);

  const Matrix H = objective.dense_hessian(x);
  const EigEstimate eig = solvers.eig(H);
  const double lambda = eig.lambda;
  if (!std::isfinite(lambda) || !eig.v_unit.allFinite()) throw NumericalError("exact eigensolver returned non-finite");

  if (g_norm <= config.eps_g && lambda >= -config.eps_H) return Terminate{lambda, std::nullopt};

  Direction dir{StepKind::NegativeCurvature, Vector(), {}};
  dir.diagnostics.R = R;
  dir.diagnostics.lambda = lambda;
  if (lambda < -config.eps_H) {
    dir.d = scale_eigvector(eig.v_unit, lambda, g);
    return dir;
  }
  const double shift = lambda > config.eps_H ? 0.0 : 2.0 * config.eps_H;
  dir.kind = shift == 0.0 ? StepKind::Newton : StepKind::RegularizedNewton;
  dir.d = solvers.solve(H, g, shift);
  if (!dir.d.allFinite()) throw NumericalError("exact linear solver returned non-finite");
  Vector residual = H * dir.d + shift * dir.d + g;
  dir.diagnostics.residual_norm = residual.norm();
  return dir;
}

Selection select_direction_inexact(CountedObjective& objective, const Vector& x, const Vector& g,
                                   const SolverConfig& config, Rng& rng) {
  const double g_norm = g.norm();
  std::optional<double> R;
  if (auto dir = first_order_step(objective, x, g, g_norm, config, R)) return *std::move(dir);

  const double U_H = config.U_H.value_or(objective.constants().U_H);
  const double eps_H = config.eps_H;
  auto hess = [&objective, &x](const Vector& v) { return objective.hessian_vector(x, v); };

  const EigEstimate eig = lanczos_min_eig(hess, objective.dim(), U_H + 2.0, 0.5 * eps_H, config.delta, rng);
  const double lambda = eig.lambda;
  if (!std::isfinite(lambda)) throw NumericalError("Lanczos returned a non-finite estimate");

  if (g_norm <= config.eps_g && lambda >= -0.5 * eps_H) return Terminate{lambda, eig.iters};

  Direction dir{StepKind::NegativeCurvature, Vector(), {}};
  dir.diagnostics.R = R;
  dir.diagnostics.lambda = lambda;
  dir.diagnostics.lanczos_iters = eig.iters;
  if (lambda < -0.5 * eps_H) {
    dir.d = scale_eigvector(eig.v_unit, lambda, g);
    return dir;
  }

  const bool newton = lambda > 1.5 * eps_H;
  const double shift = newton ? 0.0 : 2.0 * eps_H;
  auto apply = [&](const Vector& v) -> Vector {
    Vector hv = objective.hessian_vector(x, v);
    if (shift != 0.0) hv += shift * v;
    return hv;
  };
  const CgOutcome cg = cg_capped(apply, g, eps_H, U_H + shift, config.zeta);
  dir.diagnostics.cg_iters = cg.iters;

  switch (cg.status) {
    case CgStatus::converged:
      dir.kind = newton ? StepKind::InexactNewton : StepKind::InexactRegularizedNewton;
      dir.d = cg.d;
      dir.diagnostics.residual_norm = cg.final_residual_norm;
      return dir;
    case CgStatus::cap_reached:
      throw CgCapReached("capped CG reached its iteration cap (" + std::to_string(cg.cap) +
                         ") without meeting the stopping test; residual " + std::to_string(cg.final_residual_norm));
    case CgStatus::nonpositive_curvature:
      break;
  }

  const Vector& p = cg.curvature_direction;
  const double pp = p.squaredNorm();
  const double rho = (cg.curvature - shift * pp) / pp;
  if (!(rho < 0.0)) throw NumericalError("CG reported nonpositive curvature but the Hessian curvature is nonnegative");
  dir.kind = StepKind::NegativeCurvature;
  dir.d = scale_eigvector(p / std::sqrt(pp), rho, g);
  dir.diagnostics.lambda = rho;
  dir.diagnostics.indefinite_fallback = true;
  return dir;
}

}  // namespace soline
