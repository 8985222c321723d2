#include <doctest.h>

#include <cmath>
#include <random>

#include "soline/cgsolve.hpp"
#include "soline/errors.hpp"
#include "support/oracles.hpp"

using namespace soline;

TEST_CASE("dense solve against elimination, with and without shift") {
  std::mt19937_64 gen(1);
  const Matrix A = oracle::with_spectrum({0.5, 1.0, 2.0, 7.0}, gen);
  const Vector g = oracle::gaussian_vector(4, gen);
  CHECK((solve_exact(A, g, 0.0) - oracle::gauss_solve(A, -g)).norm() <= 1e-12);
  const Matrix S = A + 0.3 * Matrix::Identity(4, 4);
  CHECK((solve_exact(A, g, 0.3) - oracle::gauss_solve(S, -g)).norm() <= 1e-12);

  const Matrix indefinite = oracle::with_spectrum({-1.0, 2.0}, gen);
  CHECK_THROWS_AS(solve_exact(indefinite, Vector::Ones(2), 0.0), NumericalError);
  CHECK_THROWS_AS(solve_exact(A, g, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(solve_exact(A, Vector::Ones(3), 0.0), std::invalid_argument);
}

TEST_CASE("CG iteration cap closed form") {
  CHECK(cg_iteration_cap(50, 10.0, 0.5) == 9);
  CHECK(cg_iteration_cap(200, 400.0, 0.1) == 127);
  CHECK(cg_iteration_cap(50, 400.0, 0.1) == 50);
  CHECK(cg_iteration_cap(5, 1.0, 0.5) == 2);
  CHECK_THROWS_AS(cg_iteration_cap(5, 0.5, 0.5), std::invalid_argument);
}

TEST_CASE("CG meets the two-sided stopping test on SPD systems") {
  std::mt19937_64 gen(2);
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index n = 30;
    std::vector<double> spec;
    for (Eigen::Index i = 0; i < n; ++i) spec.push_back(0.1 + 4.9 * static_cast<double>(i) / (n - 1));
    const Matrix A = oracle::with_spectrum(spec, gen);
    const Vector g = oracle::gaussian_vector(n, gen);
    const double zeta = 0.5;
    const auto out = cg_capped([&](const Vector& v) -> Vector { return A * v; }, g, 0.1, 5.0, zeta, true);
    REQUIRE(out.status == CgStatus::converged);
    CHECK(out.iters <= out.cap);
    const double r = (A * out.d + g).norm();
    CHECK(r == doctest::Approx(out.final_residual_norm).epsilon(1e-8));
    CHECK(r <= 0.5 * zeta * std::min(g.norm(), 0.1 * out.d.norm()) * (1 + 1e-10));
    CHECK(out.residual_norms.size() == static_cast<std::size_t>(out.iters + 1));
    CHECK(residual_orthogonality_probe(out.residuals) < 1e-6);
  }
}

TEST_CASE("CG reports nonpositive curvature with the offending direction") {
  const Matrix A = Vector{{-1.0, 1.0, 2.0}}.asDiagonal();
  // g along the negative eigenvector makes the very first direction bad
  const Vector g = Vector::Unit(3, 0);
  const auto out = cg_capped([&](const Vector& v) -> Vector { return A * v; }, g, 0.5, 3.0, 0.5);
  CHECK(out.status == CgStatus::nonpositive_curvature);
  CHECK(out.iters == 1);
  const Vector& p = out.curvature_direction;
  CHECK(out.curvature == doctest::Approx(p.dot(A * p)));
  CHECK(out.curvature < 0.0);
}

TEST_CASE("CG stops at the cap when the promised m is wrong") {
  // promised m = 1 but the real smallest eigenvalue is far below; zeta tiny
  const Vector h{{1e-6, 1.0, 2.0, 3.0, 4.0, 5.0}};
  const Matrix A = h.asDiagonal();
  const Vector g = Vector::Ones(6);
  const auto out = cg_capped([&](const Vector& v) -> Vector { return A * v; }, g, 1.0, 1.0, 0.9);
  CHECK(out.cap == 1);
  CHECK(out.status == CgStatus::cap_reached);
  CHECK_THROWS_AS(cg_capped([&](const Vector& v) -> Vector { return A * v; }, Vector::Zero(6), 1.0, 2.0, 0.5),
                  std::invalid_argument);
}
