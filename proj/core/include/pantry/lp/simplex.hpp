#pragma once

#include <cstddef>

#include "pantry/lp/problem.hpp"

namespace pantry::lp {

struct SimplexOptions {
  double pivot_tolerance = 1e-9;
  double feasibility_tolerance = 1e-6;
  double optimality_tolerance = 1e-9;
  std::size_t iteration_factor = 50;  // cap = factor * (vars + constraints)
};

/// Two-phase primal simplex on a dense tableau.
///
/// Rows are equilibrated to unit max-norm and the objective to unit max-norm before
/// pivoting; results are reported in the caller's units. Entering columns use the most
/// negative reduced cost (lowest index on ties); after a degenerate pivot the rule drops
/// to Bland's lowest-index choice until progress resumes, which rules out cycling. The
/// leaving row is the minimum ratio, ties broken by the lowest basic variable index.
///
/// Pure and deterministic: identical problems give bit-identical solutions.
/// Throws ContractViolation on malformed problems and SolverStalledError past the cap.
LpSolution solve(const LpProblem& problem, const SimplexOptions& options = {});

}  // namespace pantry::lp
