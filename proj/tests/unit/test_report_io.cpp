#include <doctest.h>

#include <sstream>

#include "soline/problems.hpp"
#include "soline/report_io.hpp"

using namespace soline;

namespace {

IterationRecord sample_row() {
  IterationRecord r;
  r.k = 7;
  r.phase = Phase::local;
  r.kind = StepKind::InexactRegularizedNewton;
  r.x_norm = 0.1;
  r.f = 1.0 / 3.0;
  r.g_norm = 2e-7;
  r.lambda = -1e-300;
  r.j = 2;
  r.alpha = 0.25;
  r.d_norm = 3.5;
  r.decrease = 1e-20;
  r.f_next = r.f - r.decrease;
  r.g_next_norm = 1e-9;
  r.counters = {10, 4, 33};
  r.cg_iters = 5;
  return r;
}

}  // namespace

TEST_CASE("columns follow the record field order") {
  const auto& cols = io::trace_columns();
  REQUIRE(cols.size() == 19u);
  CHECK(cols.front() == "k");
  CHECK(cols[2] == "kind");
  CHECK(cols[14] == "n_f");
  CHECK(cols.back() == "cg_iters");
  CHECK(io::trace_header().rfind("k,phase,kind,", 0) == 0);
}

TEST_CASE("trace rows round-trip bit for bit") {
  const IterationRecord r = sample_row();
  const std::string line = io::trace_row(r);
  CHECK(line.find(",,") != std::string::npos);  // empty R
  CHECK(line.back() == '5');
  std::stringstream ss;
  io::CsvTraceWriter w(ss);
  w(r);
  auto sink = w.sink();
  IterationRecord r2 = r;
  r2.k = 8;
  r2.cg_iters.reset();
  r2.lanczos_iters = 12;
  sink(r2);
  const auto back = io::read_trace(ss);
  REQUIRE(back.size() == 2u);
  CHECK(back[0].k == 7);
  CHECK(back[0].phase == Phase::local);
  CHECK(back[0].kind == StepKind::InexactRegularizedNewton);
  CHECK(back[0].f == r.f);
  CHECK(back[0].f_next == r.f_next);
  CHECK(*back[0].lambda == r.lambda);
  CHECK_FALSE(back[0].R);
  CHECK(back[0].counters == r.counters);
  CHECK(*back[0].cg_iters == 5);
  CHECK_FALSE(back[1].cg_iters);
  CHECK(*back[1].lanczos_iters == 12);
  CHECK(io::trace_row(back[1]) == io::trace_row(r2));
}

TEST_CASE("malformed traces are rejected") {
  std::stringstream bad_header("k,phase\n");
  CHECK_THROWS(io::read_trace(bad_header));
  std::stringstream short_row(io::trace_header() + "\n1,main,newton\n");
  CHECK_THROWS(io::read_trace(short_row));
  std::stringstream bad_kind(io::trace_header() + "\n" + [] {
    std::string s = io::trace_row(sample_row());
    return s.replace(s.find("inexact_regularized_newton"), 26, "bogus");
  }());
  CHECK_THROWS(io::read_trace(bad_kind));
}

TEST_CASE("format_real keeps full precision") {
  CHECK(io::format_real(0.1) == "0.10000000000000001");
  CHECK(std::stod(io::format_real(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("report json carries schema, checks and certificate") {
  const auto p = problems::make("quad-convex-2d");
  const auto rep = run_exact(p.objective, p.x0, p.config);
  io::RunMeta meta{p.id, p.config, p.objective.constants, "t.csv"};
  const auto j = io::report_to_json(rep, meta);
  CHECK(j.at("schema_version") == io::kReportSchemaVersion);
  CHECK(j.at("status") == "converged");
  CHECK(j.at("algorithm") == "exact");
  CHECK(j.at("total_iterations") == 1);
  CHECK(j.at("first_optwcc").at("iterations") == 1);
  CHECK(j.at("checks").size() == 2u);
  CHECK(j.at("checks")[0].at("name") == "iterations");
  CHECK(j.at("envelopes_ok") == true);
  CHECK(j.at("config").at("U_H").is_null());
  CHECK(j.at("envelope").at("decrease_constants").contains("c_hat"));
  // key order is stable
  auto it = j.begin();
  CHECK(it.key() == "schema_version");
}
