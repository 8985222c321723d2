#include "soline/cgsolve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "soline/errors.hpp"
#include "soline/kernels.hpp"

namespace soline {

Vector solve_exact(const Matrix& H, const Vector& g, double shift) {
  if (H.rows() != H.cols() || H.rows() != g.size()) throw std::invalid_argument("solve_exact: dimension mismatch");
  if (shift < 0.0) throw std::invalid_argument("solve_exact: shift must be nonnegative");
  Matrix A = H;
  A.diagonal().array() += shift;
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success) throw NumericalError("solve_exact: coefficient matrix is not positive definite");
  Vector d = llt.solve(-g);
  if (!d.allFinite()) throw NumericalError("solve_exact: non-finite solution");
  return d;
}

int cg_iteration_cap(Eigen::Index n, double kappa, double zeta) {
  if (n <= 0) throw std::invalid_argument("cg_iteration_cap: n must be positive");
  if (!(kappa >= 1.0)) throw std::invalid_argument("cg_iteration_cap: kappa must be >= 1");
  if (!(zeta > 0.0 && zeta < 1.0)) throw std::invalid_argument("cg_iteration_cap: zeta must lie in (0,1)");
  const double bound = 0.5 * std::sqrt(kappa) * std::log(4.0 * std::pow(kappa, 1.5) / zeta);
  if (!(bound < static_cast<double>(n))) return static_cast<int>(n);
  return std::max(1, static_cast<int>(std::ceil(bound)));
}

CgOutcome cg_capped(const LinearOperator& apply_A, const Vector& g, double m, double M, double zeta,
                    bool record_residuals) {
  const double g_norm = g.norm();
  if (!(g_norm > 0.0)) throw std::invalid_argument("cg_capped: right-hand side must be nonzero");
  if (!(m > 0.0) || !(M >= m)) throw std::invalid_argument("cg_capped: need 0 < m <= M");

  const Eigen::Index n = g.size();
  CgOutcome out;
  out.cap = cg_iteration_cap(n, M / m, zeta);
  out.d = Vector::Zero(n);

  Vector r = g;  // r = A d + g
  Vector p = -r;
  double rr = kernels::dot(view(r), view(r));
  out.residual_norms.push_back(g_norm);
  out.step_norms.push_back(0.0);
  if (record_residuals) out.residuals.push_back(r);

  while (true) {
    const Vector Ap = apply_A(p);
    ++out.iters;
    if (!Ap.allFinite()) throw NumericalError("cg_capped: non-finite operator product");
    const double curvature = kernels::dot(view(p), view(Ap));
    if (curvature <= 1e-14 * p.squaredNorm()) {
      out.status = CgStatus::nonpositive_curvature;
      out.curvature_direction = p;
      out.curvature = curvature;
      out.final_residual_norm = std::sqrt(rr);
      return out;
    }
    const double alpha = rr / curvature;
    kernels::axpy(alpha, view(p), view(out.d));
    kernels::axpy(alpha, view(Ap), view(r));
    const double rr_next = kernels::dot(view(r), view(r));
    const double r_norm = std::sqrt(rr_next);
    const double d_norm = kernels::nrm2(view(out.d));
    out.residual_norms.push_back(r_norm);
    out.step_norms.push_back(d_norm);
    if (record_residuals) out.residuals.push_back(r);
    out.final_residual_norm = r_norm;

    if (r_norm <= 0.5 * zeta * std::min(g_norm, m * d_norm)) {
      out.status = CgStatus::converged;
      return out;
    }
    if (out.iters >= out.cap) {
      out.status = CgStatus::cap_reached;
      return out;
    }
    const double beta = rr_next / rr;
    rr = rr_next;
    kernels::scale(beta, view(p));
    kernels::axpy(-1.0, view(r), view(p));
  }
}

double residual_orthogonality_probe(std::span<const Vector> residuals) {
  double worst = 0.0;
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    const double ni = residuals[i].norm();
    if (ni == 0.0) continue;
    for (std::size_t j = i + 1; j < residuals.size(); ++j) {
      const double nj = residuals[j].norm();
      if (nj == 0.0) continue;
      worst = std::max(worst, std::abs(residuals[i].dot(residuals[j])) / (ni * nj));
    }
  }
  return worst;
}

}  // namespace soline
