#pragma once

#include <span>
#include <vector>

#include "soline/eigensolvers.hpp"
#include "soline/types.hpp"

namespace soline {

/// Solves (H + shift I) d = -g by dense Cholesky. Throws NumericalError when
/// the shifted matrix is not numerically positive definite.
Vector solve_exact(const Matrix& H, const Vector& g, double shift);

enum class CgStatus { converged, cap_reached, nonpositive_curvature };

struct CgOutcome {
  Vector d;
  int iters = 0;  ///< Operator applications.
  int cap = 0;
  double final_residual_norm = 0.0;
  CgStatus status = CgStatus::converged;
  /// Set when status == nonpositive_curvature: the offending search
  /// direction p and p^T A p.
  Vector curvature_direction;
  double curvature = 0.0;
  /// Per-iteration history, index 0 is the starting point d = 0.
  std::vector<double> residual_norms;
  std::vector<double> step_norms;
  /// Residual vectors, only filled when requested.
  std::vector<Vector> residuals;
};

/// min{n, ceil(1/2 sqrt(kappa) ln(4 kappa^{3/2} / zeta))}.
int cg_iteration_cap(Eigen::Index n, double kappa, double zeta);

/// Plain CG on A d = -g from d = 0, where m I <= A <= M I is promised.
///
/// Stops as soon as |A d + g| <= zeta/2 * min{|g|, m |d|} (tested after every
/// iteration, never at d = 0), or after cg_iteration_cap(n, M/m, zeta)
/// iterations. A search direction with p^T A p <= 1e-14 |p|^2 stops the
/// solve with status nonpositive_curvature.
CgOutcome cg_capped(const LinearOperator& apply_A, const Vector& g, double m, double M, double zeta,
                    bool record_residuals = false);

/// max |r_i^T r_j| / (|r_i| |r_j|) over pairs i != j of nonzero residuals.
double residual_orthogonality_probe(std::span<const Vector> residuals);

}  // namespace soline
