#include "soline/eigensolvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "soline/errors.hpp"
#include "soline/kernels.hpp"

namespace soline {

EigEstimate min_eigenpair_exact(const Matrix& H) {
  if (H.rows() != H.cols() || H.rows() == 0) throw std::invalid_argument("min_eigenpair_exact: matrix must be square");
  const double norm_inf = H.cwiseAbs().rowwise().sum().maxCoeff();
  const double asym = (H - H.transpose()).cwiseAbs().rowwise().sum().maxCoeff();
  if (asym > 1e-10 * norm_inf) throw std::invalid_argument("min_eigenpair_exact: matrix is not symmetric");
  if (!H.allFinite()) throw NumericalError("min_eigenpair_exact: non-finite Hessian");

  Eigen::SelfAdjointEigenSolver<Matrix> es(H);
  if (es.info() != Eigen::Success) throw NumericalError("symmetric eigendecomposition failed");

  EigEstimate out;
  out.lambda = es.eigenvalues()[0];
  out.v_unit = es.eigenvectors().col(0).normalized();
  out.converged_by = EigSource::exact;
  if (!std::isfinite(out.lambda) || !out.v_unit.allFinite()) throw NumericalError("non-finite eigenpair");
  return out;
}

int lanczos_iteration_cap(Eigen::Index n, double M, double eps, double delta) {
  if (n <= 0) throw std::invalid_argument("lanczos_iteration_cap: n must be positive");
  if (!(M > 0.0) || !(eps > 0.0)) throw std::invalid_argument("lanczos_iteration_cap: M and eps must be positive");
  if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("lanczos_iteration_cap: delta must lie in [0,1)");
  if (delta == 0.0) return static_cast<int>(n);
  const double bound =
      std::log(static_cast<double>(n) / (delta * delta)) / (2.0 * std::numbers::sqrt2) * std::sqrt(M / eps);
  if (!(bound < static_cast<double>(n))) return static_cast<int>(n);
  return std::max(1, static_cast<int>(std::ceil(bound)));
}

namespace {

// Two passes of modified Gram-Schmidt against the first `count` columns.
void orthogonalize(const Matrix& basis, Eigen::Index count, Vector& w) {
  const auto n = static_cast<std::size_t>(basis.rows());
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index i = 0; i < count; ++i) {
      std::span<const double> qi(basis.col(i).data(), n);
      const double c = kernels::dot(qi, view(w));
      kernels::axpy(-c, qi, view(w));
    }
  }
}

double largest_ritz_value(const std::vector<double>& alpha, const std::vector<double>& beta) {
  const auto k = static_cast<Eigen::Index>(alpha.size());
  if (k == 1) return alpha[0];
  Vector diag = Eigen::Map<const Vector>(alpha.data(), k);
  Vector sub = Eigen::Map<const Vector>(beta.data(), k - 1);
  Eigen::SelfAdjointEigenSolver<Matrix> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[k - 1];
}

}  // namespace

EigEstimate lanczos_min_eig(const LinearOperator& hv, Eigen::Index n, double M, double eps, double delta, Rng& rng,
                            const LanczosOptions& options) {
  const int cap = lanczos_iteration_cap(n, M, eps, delta);
  const double breakdown_tol = 1e-12 * 2.0 * M;

  Matrix basis(n, cap);
  basis.col(0) = random_unit_vector(n, rng);
  std::vector<double> alpha;
  std::vector<double> beta;
  alpha.reserve(cap);
  beta.reserve(cap);

  EigEstimate out;
  int built = 0;
  for (int j = 0; j < cap; ++j) {
    const Vector qj = basis.col(j);
    Vector w = hv(qj);
    if (!w.allFinite()) throw NumericalError("Lanczos: non-finite Hessian-vector product");
    w = M * qj - w;
    alpha.push_back(kernels::dot(view(qj), view(w)));
    ++built;
    if (options.record_ritz_history) out.ritz_history.push_back(largest_ritz_value(alpha, beta));
    if (j + 1 == cap) break;

    orthogonalize(basis, j + 1, w);
    double b = kernels::nrm2(view(w));
    if (b <= breakdown_tol) {
      if (out.restarts == options.max_restarts) break;
      ++out.restarts;
      w = random_unit_vector(n, rng);
      orthogonalize(basis, j + 1, w);
      const double fresh = kernels::nrm2(view(w));
      if (fresh <= 1e-8) break;  // basis already spans R^n
      w /= fresh;
      b = 0.0;
    } else {
      w /= b;
    }
    beta.push_back(b);
    basis.col(j + 1) = w;
  }

  const Eigen::Index k = built;
  Vector diag = Eigen::Map<const Vector>(alpha.data(), k);
  Vector y;
  double theta = 0.0;
  if (k == 1) {
    y = Vector::Ones(1);
    theta = alpha[0];
  } else {
    Vector sub = Eigen::Map<const Vector>(beta.data(), k - 1);
    Eigen::SelfAdjointEigenSolver<Matrix> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw NumericalError("Lanczos: tridiagonal eigensolve failed");
    theta = es.eigenvalues()[k - 1];
    y = es.eigenvectors().col(k - 1);
  }

  Vector v = Vector::Zero(n);
  for (Eigen::Index i = 0; i < k; ++i) {
    kernels::axpy(y[i], std::span<const double>(basis.col(i).data(), static_cast<std::size_t>(n)), view(v));
  }
  out.v_unit = v / v.norm();
  out.lambda = M - theta;
  out.iters = built;
  out.converged_by = built == n ? EigSource::full_n : EigSource::lanczos_cap;
  return out;
}

}  // namespace soline
