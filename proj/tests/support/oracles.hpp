#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pantry/diet/model.hpp"
#include "pantry/lp/problem.hpp"

namespace pantry::testing {

/// Exact check of a point against every row, with an absolute slack (0 for grid oracles).
bool satisfies(const lp::LpProblem& p, const std::vector<double>& x, double slack = 0.0);

double objective(const lp::LpProblem& p, const std::vector<double>& x);

struct GridOptions {
  double coarse_step = 0.5;
  double final_step = 1e-9;        // refinement stops below this cell size
  double gap = 1e-9;               // or once upper - lower <= gap * max(1, |upper|)
  std::size_t max_cells = 4000000;  // give up (nullopt) rather than exhaust memory
};

struct OracleResult {
  double objective = 0.0;  // best exactly feasible point found
  std::vector<double> x;
  double lower_bound = 0.0;  // no feasible point is cheaper than this
};

/// Brute force by grid refinement over [0, box[i]]: all coarse cells, then every surviving cell
/// split in half per axis, repeatedly. A cell survives while its box meets every constraint
/// halfspace and min c.x over the box does not exceed the incumbent, so the optimum's cell is
/// never discarded. The incumbent is the best exactly feasible cell centre or cost-minimizing
/// corner seen so far.
std::optional<OracleResult> grid_minimum(const lp::LpProblem& p, const std::vector<double>& box,
                                         const GridOptions& options = {});

/// Optimum over all basic solutions: every choice of var_count tight constraints (rows,
/// x_j = 0, x_j = cap) solved by Gaussian elimination. Requires a bounded feasible set.
std::optional<OracleResult> vertex_minimum(const lp::LpProblem& p, double tol = 1e-9);

/// Random bounded LP with at most `max_vars` variables and `max_rows` rows and a strictly
/// feasible point inside [0.5, 6]^d; every variable is capped at `cap`.
lp::LpProblem random_bounded_lp(std::mt19937_64& rng, std::size_t max_vars, std::size_t max_rows, double cap = 10.0);

struct DietInstance {
  diet::DietModelConfig config;
  std::map<std::string, double> requirements;
  std::map<std::string, double> prices;
  double budget = 0.0;
  std::map<std::string, double> witness;  // a feasible plan baked into the data
};

/// Random diet LP over the standard nutrients, feasible by construction.
DietInstance random_diet_instance(std::mt19937_64& rng, std::size_t min_items = 3, std::size_t max_items = 30);

struct Residuals {
  double floor = 0.0;      // worst (R_n - supplied) / R_n
  double budget = 0.0;     // (cost - B) / B
  double cap = 0.0;        // worst (supplied - U_n) / U_n
  double diversity = 0.0;  // worst (x_j - limit) / limit
  double negativity = 0.0; // worst -x_j
  double cost_identity = 0.0;  // |total_cost - sum p x| / max(1, total_cost)

  double worst() const;
};

/// Constraint residuals of `quantities` against the instance (positive values are violations).
Residuals residuals(const DietInstance& instance, const std::map<std::string, double>& quantities,
                    double reported_cost);

}  // namespace pantry::testing
