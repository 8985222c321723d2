#include "soline/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "soline/errors.hpp"

namespace soline {

double CountedObjective::value(const Vector& x) {
  ++counters_.n_f;
  return objective_->value(x);
}

Vector CountedObjective::gradient(const Vector& x) {
  ++counters_.n_grad;
  return objective_->gradient(x);
}

Vector CountedObjective::hessian_vector(const Vector& x, const Vector& v) {
  ++counters_.n_hv;
  return objective_->hessian_vector(x, v);
}

Matrix CountedObjective::dense_hessian(const Vector& x) const {
  if (!objective_->has_dense_hessian()) throw std::logic_error("objective has no dense Hessian");
  return objective_->dense_hessian(x);
}

double default_fd_step(const Vector& x) {
  const double scale = 1.0 + (x.size() > 0 ? x.cwiseAbs().maxCoeff() : 0.0);
  return std::cbrt(std::numeric_limits<double>::epsilon()) * scale;
}

namespace {

double relative_error(const Vector& computed, const Vector& reference) {
  const double denom = std::max(1.0, reference.cwiseAbs().maxCoeff());
  return (computed - reference).cwiseAbs().maxCoeff() / denom;
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw NumericalError(std::string("non-finite ") + what + " at derivative probe point");
}

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw NumericalError(std::string("non-finite ") + what + " at derivative probe point");
}

}  // namespace

DerivativeReport check_derivatives(const Objective& objective, const Vector& x, std::optional<double> step) {
  const double h = step.value_or(default_fd_step(x));
  if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");

  const Eigen::Index n = objective.dim;
  const Vector g = objective.gradient(x);
  require_finite(g, "gradient");

  Vector fd_grad(n);
  DerivativeReport report;
  report.step = h;
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector xp = x;
    Vector xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double fp = objective.value(xp);
    const double fm = objective.value(xm);
    require_finite(fp, "value");
    require_finite(fm, "value");
    fd_grad[i] = (fp - fm) / (2.0 * h);

    const Vector e = Vector::Unit(n, i);
    const Vector hv = objective.hessian_vector(x, e);
    require_finite(hv, "Hessian-vector product");
    const Vector gp = objective.gradient(xp);
    const Vector gm = objective.gradient(xm);
    require_finite(gp, "gradient");
    require_finite(gm, "gradient");
    const Vector fd_hv = (gp - gm) / (2.0 * h);
    report.hessian_vector_error = std::max(report.hessian_vector_error, relative_error(hv, fd_hv));
  }
  report.gradient_error = relative_error(g, fd_grad);
  return report;
}

double rayleigh_quotient(CountedObjective& objective, const Vector& x, const Vector& g) {
  const double gg = g.squaredNorm();
  if (!(gg > 0.0)) throw std::invalid_argument("rayleigh_quotient requires a nonzero gradient");
  const Vector hg = objective.hessian_vector(x, g);
  return g.dot(hg) / gg;
}

}  // namespace soline
