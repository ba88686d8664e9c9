#include "pantry/lp/problem.hpp"

#include <cmath>
#include <sstream>

#include "pantry/error.hpp"

namespace pantry::lp {

namespace {

void check_row(const LinearRow& row, std::size_t n, const char* kind, std::size_t index) {
  if (row.coeffs.size() != n) {
    throw ContractViolation(std::string(kind) + " row " + std::to_string(index) + " has " +
                            std::to_string(row.coeffs.size()) + " coefficients, expected " + std::to_string(n));
  }
  if (!std::isfinite(row.bound)) throw ContractViolation(std::string(kind) + " row bound must be finite");
  for (double v : row.coeffs) {
    if (!std::isfinite(v)) throw ContractViolation(std::string(kind) + " row has a non-finite coefficient");
  }
}

}  // namespace

void LpProblem::validate() const {
  if (objective.size() != var_count) throw ContractViolation("objective length does not match var_count");
  for (double v : objective) {
    if (!std::isfinite(v)) throw ContractViolation("objective has a non-finite coefficient");
  }
  for (std::size_t i = 0; i < ge_constraints.size(); ++i) check_row(ge_constraints[i], var_count, "ge", i);
  for (std::size_t i = 0; i < le_constraints.size(); ++i) check_row(le_constraints[i], var_count, "le", i);
  if (!var_upper_bounds.empty()) {
    if (var_upper_bounds.size() != var_count) throw ContractViolation("var_upper_bounds length mismatch");
    for (const auto& cap : var_upper_bounds) {
      if (cap && (!std::isfinite(*cap) || *cap < 0.0)) throw ContractViolation("variable caps must be finite and >= 0");
    }
  }
}

std::size_t LpProblem::constraint_count() const {
  std::size_t caps = 0;
  for (const auto& cap : var_upper_bounds) caps += cap.has_value();
  return ge_constraints.size() + le_constraints.size() + caps;
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "infeasible";
}

std::string dump(const LpProblem& problem) {
  std::ostringstream out;
  out.precision(17);
  auto write_row = [&](const std::vector<double>& coeffs) {
    bool first = true;
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
      if (coeffs[j] == 0.0) continue;
      out << (first ? "" : " + ") << coeffs[j] << " x" << j;
      first = false;
    }
    if (first) out << "0";
  };
  out << "vars " << problem.var_count << "\nminimize ";
  write_row(problem.objective);
  out << "\nsubject to\n";
  for (std::size_t i = 0; i < problem.ge_constraints.size(); ++i) {
    out << "  ge" << i << ": ";
    write_row(problem.ge_constraints[i].coeffs);
    out << " >= " << problem.ge_constraints[i].bound << '\n';
  }
  for (std::size_t i = 0; i < problem.le_constraints.size(); ++i) {
    out << "  le" << i << ": ";
    write_row(problem.le_constraints[i].coeffs);
    out << " <= " << problem.le_constraints[i].bound << '\n';
  }
  for (std::size_t j = 0; j < problem.var_upper_bounds.size(); ++j) {
    if (problem.var_upper_bounds[j]) out << "  x" << j << " <= " << *problem.var_upper_bounds[j] << '\n';
  }
  out << "  x >= 0\n";
  return out.str();
}

}  // namespace pantry::lp
