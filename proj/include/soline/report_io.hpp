#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "soline/driver.hpp"
#include "soline/operators.hpp"
#include "soline/steps.hpp"

namespace soline::io {

inline constexpr int kReportSchemaVersion = 1;

/// Column names, in IterationRecord field order (counters expand to
/// n_f, n_grad, n_hv).
const std::vector<std::string>& trace_columns();

std::string trace_header();
/// One CSV line without the newline. Reals use %.17g; absent optionals are
/// empty fields.
std::string trace_row(const IterationRecord& r);

/// Parses a trace written by CsvTraceWriter. Throws std::runtime_error on a
/// header mismatch or malformed row.
std::vector<IterationRecord> read_trace(std::istream& in);

/// Streams rows as they arrive; writes the header on construction.
class CsvTraceWriter {
 public:
  explicit CsvTraceWriter(std::ostream& out);
  void operator()(const IterationRecord& r);
  TraceSink sink();

 private:
  std::ostream* out_;
};

struct RunMeta {
  std::string problem;
  SolverConfig config;
  ProblemConstants constants;
  std::string trace_file;  ///< relative to the report
};

nlohmann::ordered_json config_to_json(const SolverConfig& c);
nlohmann::ordered_json report_to_json(const RunReport& report, const RunMeta& meta);

/// Number formatting shared by traces and summaries.
std::string format_real(double v);

}  // namespace soline::io
