#pragma once

#include <functional>
#include <vector>

#include "soline/rng.hpp"
#include "soline/types.hpp"

namespace soline {

using LinearOperator = std::function<Vector(const Vector&)>;

enum class EigSource { exact, lanczos_cap, full_n };

struct EigEstimate {
  /// Exact lambda_min, or for Lanczos the Rayleigh quotient v^T H v of the
  /// returned vector (evaluated from the Ritz value, no extra product).
  double lambda = 0.0;
  Vector v_unit;
  int iters = 0;  ///< Operator applications.
  EigSource converged_by = EigSource::exact;
  int restarts = 0;
  /// Largest Ritz value of M*I - H after each iteration (opt-in).
  std::vector<double> ritz_history;
};

/// Smallest eigenpair of a dense symmetric matrix.
/// Throws std::invalid_argument if H is not symmetric to 1e-10 relative, and
/// NumericalError if the decomposition fails.
EigEstimate min_eigenpair_exact(const Matrix& H);

/// min{n, ceil(ln(n / delta^2) / (2 sqrt 2) * sqrt(M / eps))}; delta == 0 gives n.
int lanczos_iteration_cap(Eigen::Index n, double M, double eps, double delta);

struct LanczosOptions {
  bool record_ritz_history = false;
  int max_restarts = 3;
};

/// Randomized Lanczos on v -> M v - H v with full reorthogonalization.
///
/// Runs exactly lanczos_iteration_cap(n, M, eps, delta) operator applications
/// unless the Krylov space becomes invariant first; on such a breakdown the
/// basis is extended with a fresh random vector orthogonal to it, at most
/// max_restarts times. With probability at least 1 - delta the result
/// satisfies lambda <= lambda_min(H) + eps, provided |H| <= M.
EigEstimate lanczos_min_eig(const LinearOperator& hv, Eigen::Index n, double M, double eps, double delta, Rng& rng,
                            const LanczosOptions& options = {});

}  // namespace soline
