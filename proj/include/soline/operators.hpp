#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "soline/types.hpp"

namespace soline {

/// Level-set constants of a problem, declared rather than estimated.
struct ProblemConstants {
  double L_g = 0.0;    ///< Lipschitz constant of the gradient.
  double L_H = 0.0;    ///< Lipschitz constant of the Hessian.
  double U_g = 1.0;    ///< Bound on gradient norms over the level set.
  double U_H = 1.0;    ///< Bound on Hessian norms over the level set.
  double f_low = 0.0;  ///< Lower bound on f over the level set.
};

struct EvalCounters {
  std::uint64_t n_f = 0;
  std::uint64_t n_grad = 0;
  std::uint64_t n_hv = 0;

  std::uint64_t grad_plus_hv() const noexcept { return n_grad + n_hv; }
  friend bool operator==(const EvalCounters&, const EvalCounters&) = default;
};

/// Matrix-free objective. dense_hessian may be left empty; the exact
/// algorithm and the test-mode oracles require it.
struct Objective {
  Eigen::Index dim = 0;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::function<Vector(const Vector&, const Vector&)> hessian_vector;
  std::function<Matrix(const Vector&)> dense_hessian;
  ProblemConstants constants;

  bool has_dense_hessian() const noexcept { return static_cast<bool>(dense_hessian); }
};

/// Counting view of an Objective. One per run; the Objective must outlive it.
///
/// value: n_f += 1. gradient: n_grad += 1. hessian_vector: n_hv += 1.
/// dense_hessian is not counted.
class CountedObjective {
 public:
  explicit CountedObjective(const Objective& objective) : objective_(&objective) {}

  double value(const Vector& x);
  Vector gradient(const Vector& x);
  Vector hessian_vector(const Vector& x, const Vector& v);
  Matrix dense_hessian(const Vector& x) const;

  Eigen::Index dim() const noexcept { return objective_->dim; }
  const ProblemConstants& constants() const noexcept { return objective_->constants; }
  const Objective& objective() const noexcept { return *objective_; }
  const EvalCounters& counters() const noexcept { return counters_; }

 private:
  const Objective* objective_;
  EvalCounters counters_;
};

struct DerivativeReport {
  double step = 0.0;
  double gradient_error = 0.0;        ///< max_i |g_i - fd_i| / max(1, |fd|_inf)
  double hessian_vector_error = 0.0;  ///< same measure, worst probe direction
};

/// cbrt(machine epsilon) * (1 + |x|_inf).
double default_fd_step(const Vector& x);

/// Central-difference check of gradient (against value) and Hessian-vector
/// products (against gradient) along every coordinate direction. Calls the
/// raw Objective, so no counters move. Throws NumericalError on non-finite
/// evaluations.
DerivativeReport check_derivatives(const Objective& objective, const Vector& x,
                                   std::optional<double> step = std::nullopt);

/// R = g^T H g / |g|^2 using one Hessian-vector product. Requires |g| > 0.
double rayleigh_quotient(CountedObjective& objective, const Vector& x, const Vector& g);

}  // namespace soline
