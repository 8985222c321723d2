#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "soline/errors.hpp"
#include "soline/problems.hpp"
#include "support/oracles.hpp"

using namespace soline;

TEST_CASE("suite ids are unique and buildable") {
  const auto ids = problems::problem_ids();
  CHECK(ids.size() >= 10u);
  CHECK(std::set<std::string>(ids.begin(), ids.end()).size() == ids.size());
  const auto all = problems::suite();
  REQUIRE(all.size() == ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) CHECK(all[i].id == ids[i]);
  CHECK_THROWS_AS(problems::make("no-such-problem"), std::invalid_argument);
}

TEST_CASE("declared stationary points are stationary with the declared curvature") {
  for (const auto& p : problems::suite()) {
    CAPTURE(p.id);
    CHECK(p.x0.size() == p.objective.dim);
    CHECK_NOTHROW(p.config.validate());
    std::vector<problems::StationaryPoint> pts = p.minimizers;
    pts.insert(pts.end(), p.saddles.begin(), p.saddles.end());
    REQUIRE_FALSE(p.minimizers.empty());
    for (const auto& s : pts) {
      CHECK(p.objective.gradient(s.x).norm() <= 1e-12);
      CHECK(p.objective.value(s.x) == doctest::Approx(s.f).epsilon(1e-12));
      CHECK(oracle::lambda_min(p.objective.dense_hessian(s.x)) == doctest::Approx(s.lambda_min).epsilon(1e-9));
    }
    for (const auto& m : p.minimizers) CHECK(m.f >= p.objective.constants.f_low);
    if (p.mu) {
      const double lam = oracle::lambda_min(p.objective.dense_hessian(p.minimizers.front().x));
      CHECK(*p.mu == doctest::Approx(0.5 * std::min(1.0, lam)));
    }
  }
}

TEST_CASE("declared constants survive an independent, denser sampling") {
  for (const auto& p : problems::suite()) {
    CAPTURE(p.id);
    std::vector<Vector> anchors{p.x0};
    for (const auto& m : p.minimizers) anchors.push_back(m.x);
    Rng rng(2024, 7);
    const auto s = problems::verify_constants(p.objective, p.x0, anchors, 400, rng);
    CHECK_MESSAGE(s.ok, s.detail);
    CHECK(s.points == 400);
    CHECK(s.pairs > 300);
    // the 10% margin is a margin, not a blow-up
    CHECK(s.max_H <= p.objective.constants.U_H);
  }
}

TEST_CASE("an understated constant is caught") {
  const auto p = problems::make("rosenbrock-2d");
  Objective o = p.objective;
  o.constants.L_H = 1.0;
  Rng rng(3);
  const auto s = problems::verify_constants(o, p.x0, {p.x0, Vector::Ones(2)}, 64, rng);
  CHECK_FALSE(s.ok);
  CHECK(s.detail == "L_H");
}

TEST_CASE("quadratic constants are exact") {
  Matrix A(2, 2);
  A << 2, 1, 1, 3;
  const Vector x0{{1.0, -1.0}};
  const auto c = problems::quadratic_constants(A, x0);
  const auto ev = oracle::jacobi_eigenvalues(A);
  CHECK(c.U_H == doctest::Approx(ev.back()));
  CHECK(c.L_H == 0.0);
  CHECK(c.U_g == doctest::Approx(std::sqrt(2.0 * 0.5 * x0.dot(A * x0) * ev.back())));
  Matrix N(2, 2);
  N << 1, 0, 0, -1;
  CHECK_THROWS_AS(problems::quadratic_constants(N, x0), std::invalid_argument);
  const auto q = problems::quadratic(A, c);
  CHECK(q.value(x0) == doctest::Approx(1.5));
  CHECK((q.gradient(x0) - A * x0).norm() <= 1e-15);
}

TEST_CASE("quartic has the saddle at the origin and minimizers on the unit cube corners") {
  const auto p = problems::make("quartic-2d");
  CHECK(p.objective.gradient(Vector::Zero(2)).isZero());
  CHECK(oracle::lambda_min(p.objective.dense_hessian(Vector::Zero(2))) == doctest::Approx(-1.0));
  CHECK(p.objective.value(Vector{{1.0, -1.0}}) == 0.0);
  CHECK(oracle::lambda_min(p.objective.dense_hessian(Vector{{1.0, -1.0}})) == doctest::Approx(2.0));
}

TEST_CASE("Rosenbrock minimum and start") {
  const auto p = problems::make("rosenbrock-2d");
  CHECK(p.objective.value(Vector::Ones(2)) == 0.0);
  CHECK(p.objective.constants.f_low == 0.0);
  CHECK(p.objective.value(p.x0) == doctest::Approx(24.2));
  const Vector g = p.objective.gradient(p.x0);
  CHECK((g - oracle::fd_gradient(p.objective.value, p.x0, 1e-6)).norm() <= 1e-4);
}

TEST_CASE("every exact step kind is declared by some problem") {
  std::set<StepKind> covered;
  for (const auto& p : problems::suite()) covered.insert(p.branch_coverage.begin(), p.branch_coverage.end());
  for (StepKind k : {StepKind::ScaledNegCurvGradient, StepKind::NormalizedGradient, StepKind::NegativeCurvature,
                     StepKind::Newton, StepKind::RegularizedNewton}) {
    CAPTURE(step_kind_name(k));
    CHECK(covered.count(k) == 1u);
  }
}
