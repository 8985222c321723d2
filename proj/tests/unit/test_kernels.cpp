#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "soline/driver.hpp"
#include "soline/kernels.hpp"
#include "soline/problems.hpp"

using namespace soline;
namespace k = soline::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(gen);
  return v;
}

double naive_dot(const std::vector<double>& a, const std::vector<double>& b) {
  long double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
  return static_cast<double>(s);
}

struct IsaGuard {
  k::Isa saved = k::active().isa;
  ~IsaGuard() { k::set_active(saved); }
};

}  // namespace

TEST_CASE("scalar table is always available and named") {
  CHECK(k::isa_available(k::Isa::scalar));
  CHECK(k::scalar_table().isa == k::Isa::scalar);
  CHECK(k::isa_name(k::Isa::avx2) == "avx2");
  const auto isas = k::available_isas();
  REQUIRE_FALSE(isas.empty());
  CHECK(isas.front() == k::Isa::scalar);
}

TEST_CASE("every ISA matches a long-double reference on ragged lengths") {
  std::mt19937_64 gen(7);
  for (k::Isa isa : k::available_isas()) {
    CAPTURE(k::isa_name(isa));
    const auto& t = k::table_for(isa);
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 15u, 16u, 17u, 33u, 100u, 257u}) {
      CAPTURE(n);
      const auto a = random_vec(n, gen);
      const auto b = random_vec(n, gen);
      const double ref = naive_dot(a, b);
      CHECK(std::abs(t.dot(a.data(), b.data(), n) - ref) <= 1e-13 * (1.0 + static_cast<double>(n)));

      auto y = b;
      t.axpy(0.37, a.data(), y.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == doctest::Approx(b[i] + 0.37 * a[i]).epsilon(1e-15));

      auto s = a;
      t.scale(-1.5, s.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(s[i] == -1.5 * a[i]);
    }
  }
}

TEST_CASE("gemv agrees across ISAs for non-square shapes") {
  std::mt19937_64 gen(11);
  for (auto [rows, cols] : {std::pair<std::size_t, std::size_t>{1, 1}, {3, 5}, {9, 4}, {17, 17}, {50, 13}}) {
    const auto A = random_vec(rows * cols, gen);
    const auto x = random_vec(cols, gen);
    std::vector<double> ref(rows, 0.0);
    for (std::size_t c = 0; c < cols; ++c)
      for (std::size_t r = 0; r < rows; ++r) ref[r] += A[c * rows + r] * x[c];
    for (k::Isa isa : k::available_isas()) {
      std::vector<double> y(rows, 123.0);
      k::table_for(isa).gemv(A.data(), rows, cols, x.data(), y.data());
      for (std::size_t r = 0; r < rows; ++r) CHECK(y[r] == doctest::Approx(ref[r]).epsilon(1e-13));
    }
  }
}

TEST_CASE("span front-ends reject length mismatch and unavailable ISAs") {
  std::vector<double> a(3, 1.0), b(4, 1.0);
  CHECK_THROWS_AS(k::dot(a, b), std::invalid_argument);
  CHECK(k::nrm2(std::vector<double>{3.0, 4.0}) == doctest::Approx(5.0));
  for (k::Isa isa : {k::Isa::avx2, k::Isa::neon}) {
    if (!k::isa_available(isa)) CHECK_THROWS_AS(k::set_active(isa), std::invalid_argument);
  }
}

TEST_CASE("whole solver runs agree between scalar and the widest ISA") {
  const auto isas = k::available_isas();
  if (isas.size() < 2) return;
  IsaGuard guard;
  for (const char* id : {"quad-convex-10d", "quartic-50d"}) {
    CAPTURE(id);
    const auto p = problems::make(id);
    SolverConfig cfg = p.config;
    cfg.rng_seed = 3;
    k::set_active(k::Isa::scalar);
    const RunReport a = run_inexact(p.objective, p.x0, cfg);
    k::set_active(isas.back());
    const RunReport b = run_inexact(p.objective, p.x0, cfg);
    CHECK(a.status == b.status);
    CHECK(a.total_iterations == b.total_iterations);
    CHECK(a.f_final == doctest::Approx(b.f_final).epsilon(1e-9));
    CHECK((a.x_final - b.x_final).norm() <= 1e-6 * (1.0 + a.x_final.norm()));
  }
}
