#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace pantry::lp {

struct LinearRow {
  std::vector<double> coeffs;
  double bound = 0.0;
};

/// minimize objective . x  subject to  ge rows (row . x >= bound), le rows (row . x <= bound),
/// optional per-variable caps, and x >= 0.
struct LpProblem {
  std::size_t var_count = 0;
  std::vector<double> objective;
  std::vector<LinearRow> ge_constraints;
  std::vector<LinearRow> le_constraints;
  std::vector<std::optional<double>> var_upper_bounds;  // empty, or one entry per variable

  /// Throws ContractViolation on dimension mismatch, non-finite data or negative caps.
  void validate() const;

  std::size_t constraint_count() const;
};

enum class LpStatus { optimal, infeasible, unbounded };

const char* to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> x;
  double objective_value = 0.0;
  std::size_t iterations = 0;
};

/// Plain-text listing of a problem for bug reports.
std::string dump(const LpProblem& problem);

}  // namespace pantry::lp
