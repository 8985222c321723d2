#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "soline/operators.hpp"
#include "soline/rng.hpp"
#include "soline/steps.hpp"
#include "soline/types.hpp"

namespace soline::problems {

struct StationaryPoint {
  Vector x;
  double f = 0.0;
  double lambda_min = 0.0;  ///< smallest Hessian eigenvalue at x
};

struct SuiteProblem {
  std::string id;
  std::string description;
  Objective objective;
  Vector x0;
  std::vector<StationaryPoint> minimizers;
  std::vector<StationaryPoint> saddles;
  /// Step kinds the problem is built to trigger under `config`.
  std::vector<StepKind> branch_coverage;
  /// Tolerances the problem is documented with.
  SolverConfig config;
  /// 1/2 min{1, lambda_min at the minimizer}, when the minimizer is strong.
  std::optional<double> mu;
};

/// Identifiers in suite order.
std::vector<std::string> problem_ids();

/// Builds one problem; throws std::invalid_argument for an unknown id and
/// SolverError if its declared constants fail the sampling check.
SuiteProblem make(std::string_view id);

std::vector<SuiteProblem> suite();

/// f = 1/2 x^T A x with the given constants. A must be symmetric.
Objective quadratic(const Matrix& A, const ProblemConstants& constants);

/// Constants of 1/2 x^T A x over the level set of x0 (exact, no margin):
/// U_g = sqrt(2 f0 lambda_max) for positive definite A, U_H = L_g = |A|,
/// L_H = 0, f_low = 0. Throws std::invalid_argument unless A is positive
/// definite.
ProblemConstants quadratic_constants(const Matrix& A, const Vector& x0);

/// f = sum_i (x_i^2 - 1)^2 / 4 with constants valid on the level set of x0.
Objective separable_quartic(const Vector& x0);

struct ConstantSample {
  int points = 0;  ///< level-set points sampled
  int pairs = 0;   ///< Hessian-Lipschitz pairs sampled
  double max_g = 0.0;
  double max_H = 0.0;
  double max_H_lipschitz = 0.0;
  double max_g_lipschitz = 0.0;
  double min_f = 0.0;
  bool ok = false;
  std::string detail;  ///< first violated constant, if any
};

/// Samples points of the level set {f <= f(x0)} and checks every declared
/// constant against the observed maxima.
ConstantSample verify_constants(const Objective& objective, const Vector& x0, const std::vector<Vector>& anchors,
                                int samples, Rng& rng);

}  // namespace soline::problems
