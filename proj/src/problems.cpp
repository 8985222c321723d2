#include "soline/problems.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "soline/errors.hpp"
#include "soline/kernels.hpp"

namespace soline::problems {

namespace {

constexpr double kMargin = 1.1;

ProblemConstants with_margin(ProblemConstants c) {
  c.L_g *= kMargin;
  c.L_H *= kMargin;
  c.U_g *= kMargin;
  c.U_H *= kMargin;
  return c;
}

double spectral_norm(const Matrix& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Householder reflector I - 2 u u^T / |u|^2 with a fixed, dense u.
Matrix householder(Eigen::Index n) {
  Vector u(n);
  for (Eigen::Index i = 0; i < n; ++i) u[i] = 1.0 + 0.5 * static_cast<double>(i) + 0.25 * std::sin(3.0 * (i + 1));
  return Matrix::Identity(n, n) - 2.0 * u * u.transpose() / u.squaredNorm();
}

}  // namespace

Objective quadratic(const Matrix& A, const ProblemConstants& constants) {
  if (A.rows() != A.cols()) throw std::invalid_argument("quadratic: matrix must be square");
  auto Ap = std::make_shared<const Matrix>(A);
  const auto n = A.rows();
  auto apply = [Ap](const Vector& v) {
    Vector y(v.size());
    kernels::gemv(std::span<const double>(Ap->data(), static_cast<std::size_t>(Ap->size())), Ap->rows(), Ap->cols(),
                  view(v), view(y));
    return y;
  };
  Objective o;
  o.dim = n;
  o.value = [apply](const Vector& x) { return 0.5 * x.dot(apply(x)); };
  o.gradient = apply;
  o.hessian_vector = [apply](const Vector&, const Vector& v) { return apply(v); };
  o.dense_hessian = [Ap](const Vector&) { return *Ap; };
  o.constants = constants;
  return o;
}

ProblemConstants quadratic_constants(const Matrix& A, const Vector& x0) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(A, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().cwiseAbs().maxCoeff();
  if (!(lo > 0.0)) throw std::invalid_argument("quadratic_constants: A must be positive definite");
  const double f0 = 0.5 * x0.dot(A * x0);
  ProblemConstants c;
  c.L_g = hi;
  c.L_H = 0.0;
  c.U_g = std::sqrt(2.0 * f0 * hi);
  c.U_H = hi;
  c.f_low = 0.0;
  return c;
}

Objective separable_quartic(const Vector& x0) {
  Objective o;
  o.dim = x0.size();
  o.value = [](const Vector& x) { return 0.25 * (x.array().square() - 1.0).square().sum(); };
  o.gradient = [](const Vector& x) -> Vector { return x.array() * (x.array().square() - 1.0); };
  o.hessian_vector = [](const Vector& x, const Vector& v) -> Vector {
    return (3.0 * x.array().square() - 1.0) * v.array();
  };
  o.dense_hessian = [](const Vector& x) -> Matrix { return (3.0 * x.array().square() - 1.0).matrix().asDiagonal(); };

  const double f0 = o.value(x0);
  // Each term is at most f0, so x_i^2 <= 1 + 2 sqrt(f0) =: r^2 on the level set.
  const double r2 = 1.0 + 2.0 * std::sqrt(f0);
  const double r = std::sqrt(r2);
  ProblemConstants c;
  c.U_H = std::max(3.0 * r2 - 1.0, 1.0);
  c.L_g = c.U_H;
  c.L_H = 6.0 * r;
  c.U_g = 2.0 * r * std::sqrt(f0);  // |g|^2 = sum x_i^2 * 4 term_i <= 4 r^2 f0
  c.f_low = 0.0;
  o.constants = with_margin(c);
  return o;
}

namespace {

// sum_{i<n} a (x_{i+1} - x_i^2)^2 + (1 - x_i)^2
Objective rosenbrock(Eigen::Index n, double a, const Vector& x0) {
  Objective o;
  o.dim = n;
  o.value = [a](const Vector& x) {
    double f = 0.0;
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
      const double s = x[i + 1] - x[i] * x[i];
      const double t = 1.0 - x[i];
      f += a * s * s + t * t;
    }
    return f;
  };
  o.gradient = [a](const Vector& x) {
    Vector g = Vector::Zero(x.size());
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
      const double s = x[i + 1] - x[i] * x[i];
      g[i] += -4.0 * a * x[i] * s - 2.0 * (1.0 - x[i]);
      g[i + 1] += 2.0 * a * s;
    }
    return g;
  };
  auto hessian = [a](const Vector& x) {
    const auto m = x.size();
    Matrix H = Matrix::Zero(m, m);
    for (Eigen::Index i = 0; i + 1 < m; ++i) {
      H(i, i) += 12.0 * a * x[i] * x[i] - 4.0 * a * x[i + 1] + 2.0;
      H(i, i + 1) += -4.0 * a * x[i];
      H(i + 1, i) += -4.0 * a * x[i];
      H(i + 1, i + 1) += 2.0 * a;
    }
    return H;
  };
  o.hessian_vector = [a](const Vector& x, const Vector& v) {
    Vector y = Vector::Zero(x.size());
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
      const double hii = 12.0 * a * x[i] * x[i] - 4.0 * a * x[i + 1] + 2.0;
      const double hij = -4.0 * a * x[i];
      y[i] += hii * v[i] + hij * v[i + 1];
      y[i + 1] += hij * v[i] + 2.0 * a * v[i + 1];
    }
    return y;
  };
  o.dense_hessian = hessian;

  // Level-set box: every term is at most f0.
  const double f0 = o.value(x0);
  const double s = std::sqrt(f0 / a);  // |x_{i+1} - x_i^2| <= s
  const double t = std::sqrt(f0);      // |1 - x_i| <= t for i < n
  std::vector<double> B(static_cast<std::size_t>(n), 1.0 + t);
  B.back() = (1.0 + t) * (1.0 + t) + s;

  double U_H = 0.0;
  double g2 = 0.0;
  double T2 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    double diag = 0.0;
    double off = 0.0;
    double gi = 0.0;
    if (i + 1 < n) {
      // x_{i+1} lies within s of x_i^2, so 12 a x_i^2 - 4 a x_{i+1} is within [8 a x_i^2 - 4as, 8 a x_i^2 + 4as].
      diag += 8.0 * a * B[ui] * B[ui] + 4.0 * a * s + 2.0;
      off += 4.0 * a * B[ui];
      gi += 4.0 * a * B[ui] * s + 2.0 * t;
      T2 += std::pow(24.0 * a * B[ui], 2) + 3.0 * std::pow(4.0 * a, 2);
    }
    if (i > 0) {
      diag += 2.0 * a;
      off += 4.0 * a * B[ui - 1];
      gi += 2.0 * a * s;
    }
    U_H = std::max(U_H, diag + off);
    g2 += gi * gi;
  }
  ProblemConstants c;
  c.U_H = U_H;
  c.L_g = U_H;
  c.U_g = std::sqrt(g2);
  c.L_H = std::sqrt(T2);  // Frobenius norm of the third-derivative tensor over the box
  c.f_low = 0.0;
  o.constants = with_margin(c);
  return o;
}

struct Builder {
  std::string_view id;
  SuiteProblem (*build)();
};

SuiteProblem quad_convex_2d() {
  SuiteProblem p;
  p.id = "quad-convex-2d";
  p.description = "1/2 x^T diag(1,4) x; one Newton step from (5,5)";
  Matrix A = Vector{{1.0, 4.0}}.asDiagonal();
  p.x0 = Vector{{5.0, 5.0}};
  p.objective = quadratic(A, with_margin(quadratic_constants(A, p.x0)));
  p.minimizers = {{Vector::Zero(2), 0.0, 1.0}};
  p.branch_coverage = {StepKind::Newton};
  p.config.eps_g = 1e-6;
  p.config.eps_H = 0.5;
  p.mu = 0.5;
  return p;
}

SuiteProblem quad_convex_10d() {
  SuiteProblem p;
  p.id = "quad-convex-10d";
  p.description = "rotated quadratic with spectrum 1..10";
  const Eigen::Index n = 10;
  const Matrix Q = householder(n);
  const Vector spectrum = Vector::LinSpaced(n, 1.0, 10.0);
  Matrix A = Q * spectrum.asDiagonal() * Q.transpose();
  A = 0.5 * (A + A.transpose());
  p.x0 = Vector::Constant(n, 2.0);
  p.objective = quadratic(A, with_margin(quadratic_constants(A, p.x0)));
  p.minimizers = {{Vector::Zero(n), 0.0, 1.0}};
  p.branch_coverage = {StepKind::Newton};
  p.config.eps_g = 1e-6;
  p.config.eps_H = 0.1;
  p.mu = 0.5;
  return p;
}

SuiteProblem saddle_2d() {
  SuiteProblem p;
  p.id = "saddle-2d";
  p.description = "1/2 x1^2 - 1/2 x2^2 + 1/4 x2^4; start on the stable manifold of the saddle";
  Objective& o = p.objective;
  o.dim = 2;
  o.value = [](const Vector& x) {
    return 0.5 * x[0] * x[0] - 0.5 * x[1] * x[1] + 0.25 * std::pow(x[1], 4);
  };
  o.gradient = [](const Vector& x) { return Vector{{x[0], x[1] * x[1] * x[1] - x[1]}}; };
  o.hessian_vector = [](const Vector& x, const Vector& v) {
    return Vector{{v[0], (3.0 * x[1] * x[1] - 1.0) * v[1]}};
  };
  o.dense_hessian = [](const Vector& x) -> Matrix { return Vector{{1.0, 3.0 * x[1] * x[1] - 1.0}}.asDiagonal(); };
  p.x0 = Vector{{1.0, 0.0}};
  // Level set of f0 = 1/2: x1^2 <= 3/2 and x2^2 <= 1 + sqrt(3).
  const double x1 = std::sqrt(1.5);
  const double x2 = std::sqrt(1.0 + std::sqrt(3.0));
  ProblemConstants c;
  c.U_g = std::hypot(x1, x2 * x2 * x2 - x2);
  c.U_H = 3.0 * x2 * x2 - 1.0;
  c.L_g = c.U_H;
  c.L_H = 6.0 * x2;
  c.f_low = -0.25;
  o.constants = with_margin(c);
  p.minimizers = {{Vector{{0.0, 1.0}}, -0.25, 1.0}, {Vector{{0.0, -1.0}}, -0.25, 1.0}};
  p.saddles = {{Vector::Zero(2), 0.0, -1.0}};
  p.branch_coverage = {StepKind::NegativeCurvature, StepKind::Newton};
  p.config.eps_g = 1e-6;
  p.config.eps_H = 0.5;
  p.mu = 0.5;
  return p;
}

SuiteProblem quartic(std::string id, Eigen::Index n) {
  SuiteProblem p;
  p.id = std::move(id);
  p.x0 = Vector::Zero(n);
  if (n > 2) {
    for (Eigen::Index i = 0; i < n; ++i) p.x0[i] = 0.6 * std::sin(1.7 * static_cast<double>(i + 1));
    p.description = "separable quartic sum (x_i^2 - 1)^2 / 4 from a mixed-curvature start";
    p.branch_coverage = {StepKind::ScaledNegCurvGradient, StepKind::NegativeCurvature, StepKind::Newton};
  } else {
    p.description = "separable quartic sum (x_i^2 - 1)^2 / 4 from its saddle at 0";
    // unit eigenvector steps land exactly on a minimizer
    p.branch_coverage = {StepKind::NegativeCurvature};
  }
  p.objective = separable_quartic(p.x0);
  p.minimizers = {{Vector::Ones(n), 0.0, 2.0}, {-Vector::Ones(n), 0.0, 2.0}};
  p.saddles = {{Vector::Zero(n), 0.25 * static_cast<double>(n), -1.0}};
  p.config.eps_g = 1e-5;
  p.config.eps_H = 1e-3;
  p.mu = 0.5;
  return p;
}

SuiteProblem quartic_2d() { return quartic("quartic-2d", 2); }
SuiteProblem quartic_50d() { return quartic("quartic-50d", 50); }

SuiteProblem flat_valley_2d() {
  SuiteProblem p;
  p.id = "flat-valley-2d";
  p.description = "1/2 x1^2 + 1/4 x2^4; small curvature along x2 selects regularized Newton";
  Objective& o = p.objective;
  o.dim = 2;
  o.value = [](const Vector& x) { return 0.5 * x[0] * x[0] + 0.25 * std::pow(x[1], 4); };
  o.gradient = [](const Vector& x) { return Vector{{x[0], x[1] * x[1] * x[1]}}; };
  o.hessian_vector = [](const Vector& x, const Vector& v) { return Vector{{v[0], 3.0 * x[1] * x[1] * v[1]}}; };
  o.dense_hessian = [](const Vector& x) -> Matrix { return Vector{{1.0, 3.0 * x[1] * x[1]}}.asDiagonal(); };
  p.x0 = Vector{{1.0, 0.3}};
  const double f0 = o.value(p.x0);
  const double x1 = std::sqrt(2.0 * f0);
  const double x2 = std::pow(4.0 * f0, 0.25);
  ProblemConstants c;
  c.U_g = std::hypot(x1, x2 * x2 * x2);
  c.U_H = std::max(1.0, 3.0 * x2 * x2);
  c.L_g = c.U_H;
  c.L_H = 6.0 * x2;
  c.f_low = 0.0;
  o.constants = with_margin(c);
  p.minimizers = {{Vector::Zero(2), 0.0, 0.0}};
  p.branch_coverage = {StepKind::NormalizedGradient, StepKind::RegularizedNewton};
  p.config.eps_g = 1e-3;
  p.config.eps_H = 0.5;
  return p;
}

SuiteProblem huber_1d() {
  SuiteProblem p;
  p.id = "huber-1d";
  p.description = "sqrt(1 + x^2) from x = 10; nearly flat, so normalized gradient steps";
  Objective& o = p.objective;
  o.dim = 1;
  o.value = [](const Vector& x) { return std::sqrt(1.0 + x[0] * x[0]); };
  o.gradient = [](const Vector& x) { return Vector{{x[0] / std::sqrt(1.0 + x[0] * x[0])}}; };
  o.hessian_vector = [](const Vector& x, const Vector& v) {
    return Vector{{std::pow(1.0 + x[0] * x[0], -1.5) * v[0]}};
  };
  o.dense_hessian = [](const Vector& x) { return Matrix::Constant(1, 1, std::pow(1.0 + x[0] * x[0], -1.5)); };
  p.x0 = Vector{{10.0}};
  ProblemConstants c;
  c.U_g = 1.0;
  c.U_H = 1.0;
  c.L_g = 1.0;
  // max |f'''| = 3 |x| (1 + x^2)^{-5/2}, attained at x = 1/2.
  c.L_H = 1.5 * std::pow(1.25, -2.5);
  c.f_low = 1.0;
  o.constants = with_margin(c);
  p.minimizers = {{Vector::Zero(1), 1.0, 1.0}};
  p.branch_coverage = {StepKind::NormalizedGradient, StepKind::Newton};
  p.config.eps_g = 1e-5;
  p.config.eps_H = 0.1;
  p.mu = 0.5;
  return p;
}

Matrix rosenbrock_hessian_at_ones(const Objective& o) { return o.dense_hessian(Vector::Ones(o.dim)); }

SuiteProblem rosenbrock_2d() {
  SuiteProblem p;
  p.id = "rosenbrock-2d";
  p.description = "Rosenbrock, a = 100, from (-1.2, 1)";
  p.x0 = Vector{{-1.2, 1.0}};
  p.objective = rosenbrock(2, 100.0, p.x0);
  const double lam = Eigen::SelfAdjointEigenSolver<Matrix>(rosenbrock_hessian_at_ones(p.objective)).eigenvalues()[0];
  p.minimizers = {{Vector::Ones(2), 0.0, lam}};
  p.branch_coverage = {StepKind::Newton};
  p.config.eps_g = 1e-5;
  p.config.eps_H = 1e-3;
  p.mu = 0.5 * std::min(1.0, lam);
  return p;
}

SuiteProblem rosenbrock_chained_10d() {
  SuiteProblem p;
  p.id = "rosenbrock-chained-10d";
  p.description = "chained Rosenbrock, a = 10, n = 10, alternating start";
  const Eigen::Index n = 10;
  p.x0 = Vector(n);
  for (Eigen::Index i = 0; i < n; ++i) p.x0[i] = i % 2 == 0 ? -1.2 : 1.0;
  p.objective = rosenbrock(n, 10.0, p.x0);
  const double lam = Eigen::SelfAdjointEigenSolver<Matrix>(rosenbrock_hessian_at_ones(p.objective)).eigenvalues()[0];
  p.minimizers = {{Vector::Ones(n), 0.0, lam}};
  p.branch_coverage = {StepKind::Newton};
  p.config.eps_g = 1e-5;
  p.config.eps_H = 1e-3;
  p.mu = 0.5 * std::min(1.0, lam);
  return p;
}

SuiteProblem convex_quartic_4d() {
  SuiteProblem p;
  p.id = "convex-quartic-4d";
  p.description = "1/2 x^T A x + 1/4 sum x_i^4, A rotated diag(1,2,3,4); strong minimizer at 0";
  const Eigen::Index n = 4;
  const Matrix Q = householder(n);
  Matrix A = Q * Vector{{1.0, 2.0, 3.0, 4.0}}.asDiagonal() * Q.transpose();
  A = 0.5 * (A + A.transpose());
  auto Ap = std::make_shared<const Matrix>(A);
  Objective& o = p.objective;
  o.dim = n;
  o.value = [Ap](const Vector& x) { return 0.5 * x.dot(*Ap * x) + 0.25 * x.array().pow(4).sum(); };
  o.gradient = [Ap](const Vector& x) -> Vector { return *Ap * x + x.array().cube().matrix(); };
  o.hessian_vector = [Ap](const Vector& x, const Vector& v) -> Vector {
    return *Ap * v + (3.0 * x.array().square() * v.array()).matrix();
  };
  o.dense_hessian = [Ap](const Vector& x) -> Matrix {
    Matrix H = *Ap;
    H.diagonal().array() += 3.0 * x.array().square();
    return H;
  };
  p.x0 = Vector{{2.0, -1.5, 1.0, 0.5}};
  const double f0 = o.value(p.x0);
  // f >= 1/2 |x|^2 and f >= 1/4 x_i^4 on the level set.
  const double r = std::sqrt(2.0 * f0);
  const double r_inf = std::min(r, std::pow(4.0 * f0, 0.25));
  ProblemConstants c;
  c.U_H = 4.0 + 3.0 * r_inf * r_inf;
  c.L_g = c.U_H;
  c.U_g = 4.0 * r + r_inf * r_inf * r;
  c.L_H = 6.0 * r_inf;
  c.f_low = 0.0;
  o.constants = with_margin(c);
  p.minimizers = {{Vector::Zero(n), 0.0, 1.0}};
  p.branch_coverage = {StepKind::Newton};
  p.config.eps_g = 1e-5;
  p.config.eps_H = 1e-3;
  p.mu = 0.5;
  return p;
}

constexpr Builder kBuilders[] = {
    {"quad-convex-2d", quad_convex_2d},
    {"quad-convex-10d", quad_convex_10d},
    {"saddle-2d", saddle_2d},
    {"quartic-2d", quartic_2d},
    {"quartic-50d", quartic_50d},
    {"flat-valley-2d", flat_valley_2d},
    {"huber-1d", huber_1d},
    {"rosenbrock-2d", rosenbrock_2d},
    {"rosenbrock-chained-10d", rosenbrock_chained_10d},
    {"convex-quartic-4d", convex_quartic_4d},
};

std::vector<Vector> anchors_of(const SuiteProblem& p) {
  std::vector<Vector> a{p.x0};
  for (const auto& m : p.minimizers) a.push_back(m.x);
  for (const auto& s : p.saddles) a.push_back(s.x);
  return a;
}

}  // namespace

std::vector<std::string> problem_ids() {
  std::vector<std::string> ids;
  for (const auto& b : kBuilders) ids.emplace_back(b.id);
  return ids;
}

SuiteProblem make(std::string_view id) {
  for (const auto& b : kBuilders) {
    if (b.id != id) continue;
    SuiteProblem p = b.build();
    Rng rng(0x5eedULL, 0xc0de);
    const ConstantSample check = verify_constants(p.objective, p.x0, anchors_of(p), 64, rng);
    if (!check.ok) throw SolverError("problem " + p.id + ": declared constants fail sampling: " + check.detail);
    return p;
  }
  throw std::invalid_argument("unknown problem id: " + std::string(id));
}

std::vector<SuiteProblem> suite() {
  std::vector<SuiteProblem> out;
  for (const auto& id : problem_ids()) out.push_back(make(id));
  return out;
}

ConstantSample verify_constants(const Objective& objective, const Vector& x0, const std::vector<Vector>& anchors,
                                int samples, Rng& rng) {
  const double f0 = objective.value(x0);
  const auto n = objective.dim;
  double scale = 1.0;
  for (const auto& a : anchors) scale = std::max(scale, 1.0 + (a - x0).norm() + a.norm());

  // Walk from an anchor along a random direction, halving the distance until
  // the point lies in the level set. Anchors are in it, so this terminates.
  auto sample_near = [&](const Vector& base, double radius) {
    const Vector u = random_unit_vector(n, rng);
    double s = radius * rng.uniform();
    for (int h = 0; h < 60; ++h, s *= 0.5) {
      Vector y = base + s * u;
      if (objective.value(y) <= f0) return y;
    }
    return base;
  };

  const ProblemConstants& c = objective.constants;
  ConstantSample out;
  out.min_f = f0;
  auto fail = [&out](const std::string& what) {
    if (out.detail.empty()) out.detail = what;
  };

  for (int i = 0; i < samples; ++i) {
    const Vector& anchor = anchors[static_cast<std::size_t>(i) % anchors.size()];
    const Vector y = sample_near(anchor, scale);
    const Vector z = sample_near(y, 0.1 * scale);
    ++out.points;

    const double fy = objective.value(y);
    const Vector gy = objective.gradient(y);
    const Matrix Hy = objective.dense_hessian(y);
    out.min_f = std::min(out.min_f, fy);
    out.max_g = std::max(out.max_g, gy.norm());
    out.max_H = std::max(out.max_H, spectral_norm(Hy));

    // near-coincident pairs measure roundoff, not the constant
    const double dist = (y - z).norm();
    if (dist > 1e-6 * scale) {
      ++out.pairs;
      const double lh = spectral_norm(Hy - objective.dense_hessian(z)) / dist;
      const double lg = (gy - objective.gradient(z)).norm() / dist;
      out.max_H_lipschitz = std::max(out.max_H_lipschitz, lh);
      out.max_g_lipschitz = std::max(out.max_g_lipschitz, lg);
    }
  }

  const double tol = 1e-9;
  if (out.min_f < c.f_low - tol * (1.0 + std::abs(c.f_low))) fail("f_low");
  if (out.max_g > c.U_g * (1.0 + tol)) fail("U_g");
  if (out.max_H > c.U_H * (1.0 + tol)) fail("U_H");
  if (out.max_g_lipschitz > c.L_g * (1.0 + tol) + tol) fail("L_g");
  if (out.max_H_lipschitz > c.L_H * (1.0 + tol) + tol) fail("L_H");
  out.ok = out.detail.empty();
  return out;
}

}  // namespace soline::problems
