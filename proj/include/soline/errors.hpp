#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace soline {

/// Invalid SolverConfig or run request.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base class for failures inside a solver run.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values or a failed factorization/eigendecomposition.
class NumericalError : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Backtracking exceeded max_ls_steps. Carries every trial value tried.
class LineSearchStall : public SolverError {
 public:
  LineSearchStall(const std::string& what, std::vector<double> trial_values)
      : SolverError(what), trial_values_(std::move(trial_values)) {}
  const std::vector<double>& trial_values() const noexcept { return trial_values_; }

 private:
  std::vector<double> trial_values_;
};

/// Capped CG exhausted its iteration cap without meeting its stopping test.
class CgCapReached : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace soline
