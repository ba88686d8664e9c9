#include "pantry/diet/planner.hpp"

#include <algorithm>
#include <sstream>

namespace pantry::diet {

namespace {

lp::LpProblem without_le_row(const lp::LpProblem& problem, std::size_t row) {
  lp::LpProblem copy = problem;
  copy.le_constraints.erase(copy.le_constraints.begin() + static_cast<std::ptrdiff_t>(row));
  return copy;
}

}  // namespace

const char* to_string(InfeasibilityKind kind) {
  switch (kind) {
    case InfeasibilityKind::budget_bound: return "budget-bound";
    case InfeasibilityKind::nutrient_bound: return "nutrient-bound";
    case InfeasibilityKind::mixed: return "mixed";
  }
  return "budget-bound";
}

std::string InfeasibilityDiagnosis::summary() const {
  std::ostringstream out;
  out << to_string(kind);
  if (minimum_budget) out << ", minimum budget " << *minimum_budget;
  if (!unsatisfiable_nutrients.empty()) {
    out << ", unsatisfiable:";
    for (const auto& n : unsatisfiable_nutrients) out << ' ' << n;
  }
  return out.str();
}

std::map<std::string, double> nutrient_totals(const std::map<std::string, double>& quantities,
                                              std::span<const kb::FoodItem> items) {
  std::map<std::string, double> totals;
  for (const auto& item : items) {
    auto q = quantities.find(item.id);
    if (q == quantities.end() || q->second == 0.0) continue;
    for (const auto& [nutrient, amount] : item.nutrients) totals[nutrient] += amount * q->second;
  }
  return totals;
}

AdequacyReport adequacy(const std::map<std::string, double>& quantities, std::span<const kb::FoodItem> items,
                        const std::map<std::string, double>& requirements) {
  const auto totals = nutrient_totals(quantities, items);
  AdequacyReport report;
  double sum = 0.0;
  std::vector<std::pair<double, std::string>> short_of;
  for (const auto& [id, required] : requirements) {
    if (!(required > 0.0)) throw ContractViolation("requirement for '" + id + "' must be > 0");
    auto it = totals.find(id);
    double ratio = (it == totals.end() ? 0.0 : it->second) / required;
    report.per_nutrient[id] = ratio;
    bool met = ratio >= 1.0 - kAdequacyTolerance;
    sum += met ? 1.0 : ratio;
    if (!met) short_of.emplace_back(ratio, id);
  }
  report.aggregate_pct = requirements.empty() ? 100.0 : 100.0 * sum / static_cast<double>(requirements.size());
  std::sort(short_of.begin(), short_of.end());
  for (auto& [ratio, id] : short_of) report.violations.push_back(std::move(id));
  return report;
}

double plan_cost(const std::map<std::string, double>& quantities, const std::map<std::string, double>& prices) {
  double cost = 0.0;
  std::vector<std::string> missing;
  for (const auto& [id, q] : quantities) {
    auto p = prices.find(id);
    if (p == prices.end()) {
      missing.push_back(id);
      continue;
    }
    cost += p->second * q;
  }
  if (!missing.empty()) throw MissingPriceError(std::move(missing));
  return cost;
}

MealPlan solve_model(const DietModel& model, std::span<const kb::FoodItem> items,
                     const std::map<std::string, double>& requirements) {
  auto solution = lp::solve(model.problem);
  if (solution.status == lp::LpStatus::unbounded) {
    throw ContractViolation("diet model reported unbounded; prices must be nonnegative");
  }
  if (solution.status == lp::LpStatus::infeasible) throw InfeasiblePlanError(diagnose_infeasibility(model));

  MealPlan plan;
  double cost = 0.0;
  for (std::size_t j = 0; j < model.item_ids.size(); ++j) {
    plan.prices_used[model.item_ids[j]] = model.prices[j];
    double q = solution.x[j];
    if (q <= 1e-9) continue;
    plan.quantities[model.item_ids[j]] = q;
    cost += model.prices[j] * q;
  }
  plan.total_cost = cost;
  plan.adequacy = adequacy(plan.quantities, items, requirements);
  return plan;
}

MealPlan plan(const DietModelConfig& config, const std::map<std::string, double>& requirements,
              const std::map<std::string, double>& prices, double budget, const kb::NutrientRegistry& registry) {
  auto model = build_model(config, requirements, prices, budget, registry);
  return solve_model(model, config.candidate_items, requirements);
}

InfeasibilityDiagnosis diagnose_infeasibility(const DietModel& model) {
  if (lp::solve(model.problem).status == lp::LpStatus::optimal) {
    throw ContractViolation("diagnose_infeasibility called on a feasible model");
  }
  InfeasibilityDiagnosis diagnosis;
  const lp::LpProblem unbudgeted = without_le_row(model.problem, model.budget_row);
  auto relaxed = lp::solve(unbudgeted);
  if (relaxed.status == lp::LpStatus::optimal) {
    diagnosis.kind = InfeasibilityKind::budget_bound;
    diagnosis.minimum_budget = relaxed.objective_value;
    return diagnosis;
  }

  // Which floors cannot be met even alone (caps and diversity rows still apply)?
  std::vector<bool> unsatisfiable(model.floor_nutrients.size(), false);
  for (std::size_t i = 0; i < model.floor_nutrients.size(); ++i) {
    lp::LpProblem single = unbudgeted;
    single.ge_constraints = {model.problem.ge_constraints[i]};
    if (lp::solve(single).status != lp::LpStatus::optimal) unsatisfiable[i] = true;
  }
  if (std::none_of(unsatisfiable.begin(), unsatisfiable.end(), [](bool b) { return b; })) {
    // jointly unsatisfiable: no single floor is to blame
    std::fill(unsatisfiable.begin(), unsatisfiable.end(), true);
  }
  for (std::size_t i = 0; i < unsatisfiable.size(); ++i) {
    if (unsatisfiable[i]) diagnosis.unsatisfiable_nutrients.push_back(model.floor_nutrients[i]);
  }

  lp::LpProblem remaining = model.problem;
  remaining.ge_constraints.clear();
  for (std::size_t i = 0; i < unsatisfiable.size(); ++i) {
    if (!unsatisfiable[i]) remaining.ge_constraints.push_back(model.problem.ge_constraints[i]);
  }
  if (lp::solve(remaining).status == lp::LpStatus::optimal) {
    diagnosis.kind = InfeasibilityKind::nutrient_bound;
    return diagnosis;
  }
  diagnosis.kind = InfeasibilityKind::mixed;
  auto cheapest = lp::solve(without_le_row(remaining, model.budget_row));
  if (cheapest.status == lp::LpStatus::optimal) diagnosis.minimum_budget = cheapest.objective_value;
  return diagnosis;
}

}  // namespace pantry::diet
