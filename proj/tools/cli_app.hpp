#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "soline/driver.hpp"
#include "soline/steps.hpp"

namespace soline::cli {

enum ExitCode : int { kOk = 0, kNotConverged = 1, kUsage = 2, kSolverError = 3 };

struct RunSpec {
  std::string problem;
  Algorithm algorithm = Algorithm::exact;
  SolverConfig config;
  std::vector<std::uint64_t> seeds{0};
  std::string out_dir;
  int jobs = 1;
};

/// "1,2,5" or ranges "1..20" (inclusive), mixed freely.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

/// Flat "key = value" file, '#' starts a comment. Keys are SolverConfig
/// field names. Throws ConfigError on unknown keys or bad values.
void apply_config_file(const std::string& path, SolverConfig& config);

/// Base names of the files a run writes, relative to the output directory.
std::string trace_file_name(const RunSpec& spec, std::uint64_t seed);
std::string report_file_name(const RunSpec& spec);

int cmd_run(const RunSpec& spec, std::ostream& out, std::ostream& err);
int cmd_envelope(const std::string& in_dir, const std::vector<double>& sweep, const std::string& sweep_problem,
                 std::ostream& out, std::ostream& err);
int cmd_list_problems(std::ostream& out);

/// Full command line entry point.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace soline::cli
