#include "pantry/lp/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "pantry/error.hpp"

namespace pantry::lp {

namespace {

enum class Sense { ge, le };

struct StandardRow {
  std::vector<double> coeffs;
  double rhs;
  Sense sense;
};

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * (cols + 1), 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  double rhs(std::size_t r) const { return at(r, cols_); }
  double* row(std::size_t r) { return &data_[r * (cols_ + 1)]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

class SimplexEngine {
 public:
  SimplexEngine(Tableau tableau, std::vector<std::size_t> basis, std::size_t first_artificial,
                const SimplexOptions& options, std::size_t iteration_cap)
      : t_(std::move(tableau)),
        basis_(std::move(basis)),
        first_artificial_(first_artificial),
        options_(options),
        cap_(iteration_cap),
        cost_(t_.cols() + 1, 0.0) {}

  // Loads a cost vector (length cols) and prices out the current basis.
  void set_costs(const std::vector<double>& costs) {
    std::fill(cost_.begin(), cost_.end(), 0.0);
    std::copy(costs.begin(), costs.end(), cost_.begin());
    for (std::size_t i = 0; i < t_.rows(); ++i) {
      double cb = cost_[basis_[i]];
      if (cb == 0.0) continue;
      const double* r = t_.row(i);
      for (std::size_t j = 0; j <= t_.cols(); ++j) cost_[j] -= cb * r[j];
    }
  }

  double objective() const { return -cost_[t_.cols()]; }

  enum class Outcome { optimal, unbounded };

  Outcome run(bool allow_artificial) {
    const std::size_t limit = allow_artificial ? t_.cols() : first_artificial_;
    bool bland = false;
    for (;;) {
      std::size_t entering = pick_entering(limit, bland);
      if (entering == npos) return Outcome::optimal;
      std::size_t leaving = pick_leaving(entering);
      if (leaving == npos) return Outcome::unbounded;
      if (++iterations_ > cap_) {
        throw SolverStalledError("simplex exceeded " + std::to_string(cap_) + " iterations");
      }
      double step = t_.rhs(leaving) / t_.at(leaving, entering);
      bland = step <= degenerate_step_;
      pivot(leaving, entering);
    }
  }

  // Pivots zero-level artificials out of the basis where a real column can replace them.
  void drive_out_artificials() {
    for (std::size_t i = 0; i < t_.rows(); ++i) {
      if (basis_[i] < first_artificial_) continue;
      std::size_t best = npos;
      double best_mag = options_.pivot_tolerance;
      for (std::size_t j = 0; j < first_artificial_; ++j) {
        double mag = std::abs(t_.at(i, j));
        if (mag > best_mag) {
          best_mag = mag;
          best = j;
        }
      }
      // a row with no real column left is redundant; its artificial stays basic at zero
      if (best != npos) pivot(i, best);
    }
  }

  const Tableau& tableau() const { return t_; }
  const std::vector<std::size_t>& basis() const { return basis_; }
  std::size_t iterations() const { return iterations_; }

 private:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
  static constexpr double degenerate_step_ = 1e-12;

  std::size_t pick_entering(std::size_t limit, bool bland) const {
    std::size_t best = npos;
    double best_value = -options_.optimality_tolerance;
    for (std::size_t j = 0; j < limit; ++j) {
      double d = cost_[j];
      if (d < best_value) {
        best = j;
        if (bland) return j;
        best_value = d;
      }
    }
    return best;
  }

  std::size_t pick_leaving(std::size_t entering) const {
    std::size_t best = npos;
    double best_ratio = 0.0;
    for (std::size_t i = 0; i < t_.rows(); ++i) {
      double a = t_.at(i, entering);
      if (a <= options_.pivot_tolerance) continue;
      double ratio = std::max(t_.rhs(i), 0.0) / a;
      if (best == npos) {
        best = i;
        best_ratio = ratio;
        continue;
      }
      double slack = 1e-12 * (1.0 + best_ratio);
      if (ratio < best_ratio - slack) {
        best = i;
        best_ratio = ratio;
      } else if (ratio <= best_ratio + slack && basis_[i] < basis_[best]) {
        best = i;
        best_ratio = std::min(best_ratio, ratio);
      }
    }
    return best;
  }

  void pivot(std::size_t r, std::size_t c) {
    const std::size_t width = t_.cols() + 1;
    double* pr = t_.row(r);
    const double inv = 1.0 / pr[c];
    for (std::size_t j = 0; j < width; ++j) pr[j] *= inv;
    pr[c] = 1.0;
    for (std::size_t i = 0; i < t_.rows(); ++i) {
      if (i == r) continue;
      double* pi = t_.row(i);
      double factor = pi[c];
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j < width; ++j) pi[j] -= factor * pr[j];
      pi[c] = 0.0;
    }
    double factor = cost_[c];
    if (factor != 0.0) {
      for (std::size_t j = 0; j < width; ++j) cost_[j] -= factor * pr[j];
      cost_[c] = 0.0;
    }
    basis_[r] = c;
  }

  Tableau t_;
  std::vector<std::size_t> basis_;
  std::size_t first_artificial_;
  SimplexOptions options_;
  std::size_t cap_;
  std::vector<double> cost_;
  std::size_t iterations_ = 0;
};

double max_abs(const std::vector<double>& values) {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

LpSolution solve(const LpProblem& problem, const SimplexOptions& options) {
  problem.validate();
  const std::size_t n = problem.var_count;
  LpSolution solution;
  solution.x.assign(n, 0.0);

  std::vector<StandardRow> rows;
  rows.reserve(problem.constraint_count());
  bool trivially_infeasible = false;
  auto add_row = [&](const std::vector<double>& coeffs, double bound, Sense sense) {
    double scale = max_abs(coeffs);
    if (scale == 0.0) {
      double tol = options.feasibility_tolerance * std::max(1.0, std::abs(bound));
      if ((sense == Sense::ge && bound > tol) || (sense == Sense::le && bound < -tol)) trivially_infeasible = true;
      return;
    }
    StandardRow row{coeffs, bound / scale, sense};
    for (double& v : row.coeffs) v /= scale;
    if (row.rhs < 0.0 || (row.rhs == 0.0 && sense == Sense::ge)) {
      for (double& v : row.coeffs) v = -v;
      row.rhs = -row.rhs;
      row.sense = sense == Sense::ge ? Sense::le : Sense::ge;
    }
    rows.push_back(std::move(row));
  };
  for (const auto& row : problem.ge_constraints) add_row(row.coeffs, row.bound, Sense::ge);
  for (const auto& row : problem.le_constraints) add_row(row.coeffs, row.bound, Sense::le);
  for (std::size_t j = 0; j < problem.var_upper_bounds.size(); ++j) {
    if (!problem.var_upper_bounds[j]) continue;
    std::vector<double> unit(n, 0.0);
    unit[j] = 1.0;
    add_row(unit, *problem.var_upper_bounds[j], Sense::le);
  }
  if (trivially_infeasible) {
    solution.status = LpStatus::infeasible;
    return solution;
  }

  const std::size_t m = rows.size();
  std::size_t artificial_count = 0;
  for (const auto& row : rows) artificial_count += row.sense == Sense::ge;
  const std::size_t first_artificial = n + m;
  const std::size_t cols = n + m + artificial_count;

  Tableau tableau(m, cols);
  std::vector<std::size_t> basis(m);
  std::size_t next_artificial = first_artificial;
  double max_rhs = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& row = rows[i];
    for (std::size_t j = 0; j < n; ++j) tableau.at(i, j) = row.coeffs[j];
    tableau.rhs(i) = row.rhs;
    max_rhs = std::max(max_rhs, row.rhs);
    if (row.sense == Sense::le) {
      tableau.at(i, n + i) = 1.0;
      basis[i] = n + i;
    } else {
      tableau.at(i, n + i) = -1.0;
      tableau.at(i, next_artificial) = 1.0;
      basis[i] = next_artificial++;
    }
  }

  const std::size_t cap = options.iteration_factor * (n + problem.constraint_count()) + 1;
  SimplexEngine engine(std::move(tableau), std::move(basis), first_artificial, options, cap);

  if (artificial_count > 0) {
    std::vector<double> phase_one(cols, 0.0);
    for (std::size_t j = first_artificial; j < cols; ++j) phase_one[j] = 1.0;
    engine.set_costs(phase_one);
    engine.run(true);
    if (engine.objective() > options.feasibility_tolerance * max_rhs) {
      solution.status = LpStatus::infeasible;
      solution.iterations = engine.iterations();
      return solution;
    }
    engine.drive_out_artificials();
  }

  const double cost_scale = max_abs(problem.objective);
  std::vector<double> phase_two(cols, 0.0);
  if (cost_scale > 0.0) {
    for (std::size_t j = 0; j < n; ++j) phase_two[j] = problem.objective[j] / cost_scale;
  }
  engine.set_costs(phase_two);
  auto outcome = engine.run(false);
  solution.iterations = engine.iterations();
  if (outcome == SimplexEngine::Outcome::unbounded) {
    solution.status = LpStatus::unbounded;
    return solution;
  }

  const auto& final_basis = engine.basis();
  for (std::size_t i = 0; i < m; ++i) {
    if (final_basis[i] < n) solution.x[final_basis[i]] = engine.tableau().rhs(i);
  }
  solution.status = LpStatus::optimal;
  double z = 0.0;
  for (std::size_t j = 0; j < n; ++j) z += problem.objective[j] * solution.x[j];
  solution.objective_value = z;
  return solution;
}

}  // namespace pantry::lp
