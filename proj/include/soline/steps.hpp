#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <variant>

#include "soline/cgsolve.hpp"
#include "soline/eigensolvers.hpp"
#include "soline/operators.hpp"
#include "soline/rng.hpp"
#include "soline/types.hpp"

namespace soline {

enum class StepKind {
  ScaledNegCurvGradient,     ///< (R/|g|) g with R < -eps_H
  NormalizedGradient,        ///< -g / |g|^{1/2}
  NegativeCurvature,         ///< eigenvector scaled to |lambda|, oriented downhill
  Newton,                    ///< H d = -g
  RegularizedNewton,         ///< (H + 2 eps_H I) d = -g
  InexactNewton,             ///< CG on H
  InexactRegularizedNewton,  ///< CG on H + 2 eps_H I
};

inline constexpr StepKind kAllStepKinds[] = {
    StepKind::ScaledNegCurvGradient, StepKind::NormalizedGradient, StepKind::NegativeCurvature,
    StepKind::Newton,                StepKind::RegularizedNewton,  StepKind::InexactNewton,
    StepKind::InexactRegularizedNewton,
};

std::string_view step_kind_name(StepKind kind) noexcept;
std::optional<StepKind> parse_step_kind(std::string_view name) noexcept;

/// ScaledNegCurvGradient or NegativeCurvature.
bool is_curvature_step(StepKind kind) noexcept;
/// Any of the four Newton-type kinds.
bool is_newton_step(StepKind kind) noexcept;

struct SolverConfig {
  double eps_g = 1e-5;
  double eps_H = 1e-3;
  double theta = 0.5;
  double eta = 1.0;
  double zeta = 0.5;   ///< CG accuracy (inexact only).
  double delta = 1e-6; ///< Lanczos failure probability (inexact only).
  /// Hessian-norm bound used by the inexact method; defaults to the
  /// problem's declared U_H.
  std::optional<double> U_H;
  int max_iters = 10000;
  int max_ls_steps = 100;
  std::uint64_t rng_seed = 0;
  /// Keep iterating after a Newton-type termination when the Hessian at the
  /// new point still has an eigenvalue below -eps_H (exact method only).
  bool reach_eps2opt = false;
  /// Compare every Lanczos estimate with a dense eigensolve (test mode).
  bool oracle_checks = false;

  /// Throws ConfigError on any out-of-range field.
  void validate() const;
};

struct DirectionDiagnostics {
  std::optional<double> R;
  std::optional<double> lambda;  ///< lambda_k, or lambda^i_k when inexact
  std::optional<double> residual_norm;
  std::optional<int> lanczos_iters;
  std::optional<int> cg_iters;
  bool indefinite_fallback = false;
};

struct Direction {
  StepKind kind;
  Vector d;
  DirectionDiagnostics diagnostics;

  /// d^T H d / |d|^2 for curvature kinds (equals R or lambda by construction).
  std::optional<double> curvature() const;
};

/// The second-order test passed; lambda is the estimate that passed it.
struct Terminate {
  double lambda;
  std::optional<int> lanczos_iters;
};

using Selection = std::variant<Direction, Terminate>;

/// s * [-lambda]_+ * v_unit with s in {+1, -1} chosen so the result w has
/// w^T g <= 0. Ties (v^T g == 0) keep the input orientation.
Vector scale_eigvector(const Vector& v_unit, double lambda, const Vector& g);

struct ExactSolvers {
  std::function<EigEstimate(const Matrix&)> eig = min_eigenpair_exact;
  std::function<Vector(const Matrix&, const Vector&, double)> solve = solve_exact;
};

/// Direction choice of the exact method. g must equal grad f(x).
/// Hessian-vector count: +1 when |g| > 0. Dense Hessian used in the
/// second-order branch.
Selection select_direction_exact(CountedObjective& objective, const Vector& x, const Vector& g,
                                 const SolverConfig& config, const ExactSolvers& solvers = {});

/// Direction choice of the inexact method: randomized Lanczos with
/// M = U_H + 2 and accuracy eps_H / 2, then capped CG with m = eps_H.
/// Throws CgCapReached if CG exhausts its cap. A CG breakdown on
/// nonpositive curvature is turned into a NegativeCurvature step along the
/// offending direction (diagnostics.indefinite_fallback).
Selection select_direction_inexact(CountedObjective& objective, const Vector& x, const Vector& g,
                                   const SolverConfig& config, Rng& rng);

}  // namespace soline
