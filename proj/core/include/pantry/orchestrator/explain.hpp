#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pantry/budget/budget.hpp"
#include "pantry/budget/requirements.hpp"
#include "pantry/diet/meal_plan.hpp"
#include "pantry/diet/planner.hpp"
#include "pantry/orchestrator/procurement.hpp"
#include "pantry/price/replan.hpp"

namespace pantry::orchestrator {

struct ExplanationEntry {
  std::string agent;  // budget, health, nutrition, price-monitor, substitution, procurement
  std::string decision;
  std::vector<std::pair<std::string, double>> evidence;

  std::optional<double> value(const std::string& key) const;
};

struct Explanation {
  std::vector<ExplanationEntry> entries;

  std::vector<const ExplanationEntry*> by_agent(const std::string& agent) const;
};

/// Floors whose slack is below this fraction of R_n are reported as binding.
inline constexpr double kBindingSlack = 1e-6;

struct ExplainInputs {
  const budget::WeeklyBudget* budget = nullptr;
  const std::vector<std::string>* applied_conditions = nullptr;  // conditions that changed r
  const std::map<std::string, double>* requirements = nullptr;   // R_n
  std::span<const kb::FoodItem> catalog;
  const price::ReplanTrace* trace = nullptr;                      // set for shock re-plans
  const ShoppingList* shopping = nullptr;
  const diet::InfeasibilityDiagnosis* diagnosis = nullptr;        // set when the cycle failed
};

/// One entry per agent that acted; each substitution in the plan gets its own entry.
Explanation explain(const diet::MealPlan* plan, const ExplainInputs& inputs);

nlohmann::json explanation_to_json(const Explanation& explanation);

}  // namespace pantry::orchestrator
