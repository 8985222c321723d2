#include <doctest.h>

#include <cmath>
#include <random>

#include "soline/bounds.hpp"
#include "support/oracles.hpp"

using namespace soline;
using namespace soline::bounds;

TEST_CASE("decrease constants at theta = 0.5, eta = 1, L_H = 2, zeta = 0.5") {
  const auto c = decrease_constants(0.5, 1.0, 2.0, 0.5);
  CHECK(c.c_e == doctest::Approx(0.0208333333).epsilon(1e-9));
  CHECK(c.c_g == doctest::Approx(0.00400937687).epsilon(1e-9));
  CHECK(c.c_n == doctest::Approx(0.0208333333).epsilon(1e-9));
  CHECK(c.c_r == doctest::Approx(0.0118446353).epsilon(1e-9));
  CHECK(c.c_in == doctest::Approx(0.000325520833).epsilon(1e-9));
  CHECK(c.c_ir == doctest::Approx(0.000325520833).epsilon(1e-9));
  CHECK(c.c == c.c_g);
  CHECK(c.c_hat == c.c_in);
}

TEST_CASE("decrease constants reject bad parameters") {
  CHECK_THROWS_AS(decrease_constants(1.0, 1.0, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(decrease_constants(0.5, 0.0, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(decrease_constants(0.5, 1.0, -1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(decrease_constants(0.5, 1.0, 1.0, 1.0), std::invalid_argument);
  // L_H = 0 with zeta = 0 leaves only the line-search terms
  const auto c = decrease_constants(0.5, 1.0, 0.0, 0.0);
  CHECK(std::isfinite(c.c_n));
  CHECK(std::isfinite(c.c_in));
}

TEST_CASE("envelope on a hand-computed instance") {
  ProblemConstants k;
  k.L_g = 10.0;
  k.L_H = 2.0;
  k.U_g = 4.0;
  k.U_H = 10.0;
  k.f_low = 0.0;
  SolverConfig cfg;
  cfg.eps_g = 1e-3;
  cfg.eps_H = 1e-2;
  cfg.zeta = 0.5;
  cfg.delta = 1e-6;
  const auto e = iteration_envelope(k, cfg, 5.0, 20);
  CHECK(e.max_term == doctest::Approx(1e6));
  CHECK(e.K_iter == doctest::Approx(1247076581.4495916).epsilon(1e-12));
  CHECK(e.K_cal == doctest::Approx(1.0));
  CHECK(e.eval_prefactor == doctest::Approx(15.287712379549449).epsilon(1e-12));
  CHECK_FALSE(e.eval_prefactor_negative);
  CHECK(e.K_eval == doctest::Approx(19064948092.47313).epsilon(1e-12));
  CHECK(e.K_hat == doctest::Approx(15360000000.0).epsilon(1e-12));
  CHECK(e.ops_per_iteration == doctest::Approx(42.0));  // both Krylov terms clip at n = 20
  CHECK(e.ops_bound == doctest::Approx(645120000000.0).epsilon(1e-12));
  CHECK(e.success_prob == doctest::Approx(-15359.0).epsilon(1e-9));

  CHECK_THROWS_AS(iteration_envelope(k, cfg, -1.0, 20), std::invalid_argument);
  CHECK_THROWS_AS(iteration_envelope(k, cfg, 5.0, 0), std::invalid_argument);
}

TEST_CASE("config U_H overrides the declared one in the operation bound") {
  ProblemConstants k;
  k.L_H = 1.0;
  k.U_g = 1.0;
  k.U_H = 1.0;
  SolverConfig cfg;
  cfg.eps_H = 0.5;
  cfg.eps_g = 0.25;
  const auto a = iteration_envelope(k, cfg, 1.0, 100000);
  cfg.U_H = 50.0;
  const auto b = iteration_envelope(k, cfg, 1.0, 100000);
  CHECK(b.ops_per_iteration > a.ops_per_iteration);
  CHECK(b.K_hat == a.K_hat);
}

TEST_CASE("the three max arguments coincide on eps_H = sqrt(eps_g)") {
  for (double eps : {1e-1, 3e-2, 1e-2, 1e-3}) {
    const double h = std::sqrt(eps);
    const double a = std::pow(eps, -3.0) * h * h * h;
    const double b = std::pow(eps, -1.5);
    const double c = std::pow(h, -3.0);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
    CHECK(c == doctest::Approx(b).epsilon(1e-12));
    CHECK(max_term(eps, h) == doctest::Approx(b).epsilon(1e-12));
  }
}

TEST_CASE("local rate constants") {
  const auto r = local_rate_constants(2.0, 1.0, 1e-2, 0.5);
  CHECK(r.gradient_threshold == doctest::Approx(1e-2));
  CHECK(r.contraction == doctest::Approx(4.0));
  CHECK(local_rate_constants(2.0, 1.0, 1.0, 0.5).gradient_threshold == doctest::Approx(0.0625));
  CHECK_THROWS_AS(local_rate_constants(1.0, 1.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("scalar root inequality, and its forms against the naive ones") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int i = 0; i < 2000; ++i) {
    const double a = std::pow(10.0, u(gen));
    const double b = std::pow(10.0, u(gen));
    const double t = std::pow(10.0, u(gen));
    const double lhs = scalar_root_lhs(a, b, t);
    const double rhs = scalar_root_bound(a, b, t);
    CHECK(lhs >= rhs * (1.0 - 1e-15));
    const double naive = -a + std::sqrt(a * a + b * t);
    if (naive > 1e-6 * a) CHECK(lhs == doctest::Approx(naive).epsilon(1e-8));
  }
  CHECK(scalar_root_bound(1.0, 3.0, 0.5) == doctest::Approx(0.5));
  CHECK(scalar_root_lhs(1.0, 3.0, 1.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(scalar_root_lhs(0.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("decrease floors per kind") {
  const auto c = decrease_constants(0.5, 1.0, 2.0, 0.5);
  SolverConfig cfg;
  cfg.eps_g = 1e-4;
  cfg.eps_H = 1e-2;
  CHECK(oracle::rel_close(decrease_floor(StepKind::NegativeCurvature, c, cfg, -0.5, std::nullopt), c.c_e * 0.125));
  CHECK(decrease_floor(StepKind::ScaledNegCurvGradient, c, cfg, -0.5, std::nullopt) ==
        decrease_floor(StepKind::NegativeCurvature, c, cfg, 0.5, std::nullopt));
  // min{eps_g^3 eps_H^-3, eps_g^1.5} = min{1e-6, 1e-6}
  CHECK(oracle::rel_close(decrease_floor(StepKind::NormalizedGradient, c, cfg, std::nullopt, std::nullopt), c.c_g * 1e-6));
  CHECK(oracle::rel_close(decrease_floor(StepKind::Newton, c, cfg, std::nullopt, 1e-2), c.c_n * 1e-6));
  CHECK(oracle::rel_close(decrease_floor(StepKind::Newton, c, cfg, std::nullopt, 1.0), c.c_n * 1e-6));
  CHECK(oracle::rel_close(decrease_floor(StepKind::RegularizedNewton, c, cfg, std::nullopt, 1e-5), c.c_r * 1e-9));
  CHECK(oracle::rel_close(decrease_floor(StepKind::InexactNewton, c, cfg, std::nullopt, 1e-5), c.c_in * 1e-9));
  CHECK(oracle::rel_close(decrease_floor(StepKind::InexactRegularizedNewton, c, cfg, std::nullopt, 1.0), c.c_ir * 1e-6));
  CHECK_THROWS_AS(decrease_floor(StepKind::Newton, c, cfg, 1.0, std::nullopt), std::invalid_argument);
  CHECK_THROWS_AS(decrease_floor(StepKind::NegativeCurvature, c, cfg, std::nullopt, 1.0), std::invalid_argument);
}
