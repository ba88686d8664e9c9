#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pantry/diet/meal_plan.hpp"
#include "pantry/diet/model.hpp"
#include "pantry/error.hpp"
#include "pantry/lp/simplex.hpp"

namespace pantry::diet {

enum class InfeasibilityKind { budget_bound, nutrient_bound, mixed };

const char* to_string(InfeasibilityKind kind);

struct InfeasibilityDiagnosis {
  InfeasibilityKind kind = InfeasibilityKind::budget_bound;
  /// Cheapest budget restoring feasibility (budget-bound and mixed, when one exists).
  std::optional<double> minimum_budget;
  std::vector<std::string> unsatisfiable_nutrients;

  std::string summary() const;
};

class InfeasiblePlanError : public Error {
 public:
  explicit InfeasiblePlanError(InfeasibilityDiagnosis diagnosis)
      : Error("no feasible plan: " + diagnosis.summary()), diagnosis_(std::move(diagnosis)) {}

  const InfeasibilityDiagnosis& diagnosis() const noexcept { return diagnosis_; }

 private:
  InfeasibilityDiagnosis diagnosis_;
};

/// Ratios within this distance of a requirement count as met (LP feasibility tolerance).
inline constexpr double kAdequacyTolerance = 1e-6;

/// Per-nutrient achieved/R_n, aggregate mean of min(1, ratio) x 100, violations ascending.
AdequacyReport adequacy(const std::map<std::string, double>& quantities, std::span<const kb::FoodItem> items,
                        const std::map<std::string, double>& requirements);

/// Solves an already-built model. Throws InfeasiblePlanError with a diagnosis.
MealPlan solve_model(const DietModel& model, std::span<const kb::FoodItem> items,
                     const std::map<std::string, double>& requirements);

MealPlan plan(const DietModelConfig& config, const std::map<std::string, double>& requirements,
              const std::map<std::string, double>& prices, double budget,
              const kb::NutrientRegistry& registry = kb::NutrientRegistry::standard());

/// Classifies an infeasible model. Throws ContractViolation if the model is feasible.
InfeasibilityDiagnosis diagnose_infeasibility(const DietModel& model);

/// Sum of price * quantity at the given prices. Throws MissingPriceError for unpriced items.
double plan_cost(const std::map<std::string, double>& quantities, const std::map<std::string, double>& prices);

/// Nutrient totals supplied by a set of quantities.
std::map<std::string, double> nutrient_totals(const std::map<std::string, double>& quantities,
                                              std::span<const kb::FoodItem> items);

}  // namespace pantry::diet
