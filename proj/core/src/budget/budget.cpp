#include "pantry/budget/budget.hpp"

#include <algorithm>
#include <sstream>

#include "pantry/error.hpp"

namespace pantry::budget {

WeeklyBudget weekly_budget(const kb::HouseholdProfile& profile, const BudgetPolicy& policy) {
  if (!(policy.weeks_per_month > 0.0)) throw ConfigError("weeks_per_month must be > 0");
  WeeklyBudget result;
  result.food_share = profile.food_share.value_or(policy.food_share);
  result.monthly_income = profile.monthly_income;
  result.fixed_expenses = profile.fixed_expenses;
  result.disposable = profile.monthly_income - profile.fixed_expenses;

  if (!(result.food_share > 0.0 && result.food_share < 1.0)) throw ConfigError("food share must be in (0, 1)");
  if (!policy.unsafe && (result.food_share < policy.min_share || result.food_share > policy.max_share)) {
    std::ostringstream msg;
    msg << "food share " << result.food_share << " outside [" << policy.min_share << ", " << policy.max_share << "]";
    throw ConfigError(msg.str());
  }
  if (result.disposable <= 0.0) throw BudgetError("disposable income is not positive");

  result.share_budget = result.food_share * profile.monthly_income / policy.weeks_per_month;
  const double ceiling = result.disposable / policy.weeks_per_month;
  result.clamped = result.share_budget > ceiling;
  result.amount = std::min(result.share_budget, ceiling);
  return result;
}

}  // namespace pantry::budget
