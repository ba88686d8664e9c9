#pragma once

#include "pantry/kb/types.hpp"

namespace pantry::budget {

struct BudgetPolicy {
  double food_share = 0.20;  // used when the household does not set its own share
  double weeks_per_month = 4.0;
  double min_share = 0.15;
  double max_share = 0.25;
  bool unsafe = false;  // allows shares outside [min_share, max_share]
};

struct WeeklyBudget {
  double amount = 0.0;  // B_w
  double food_share = 0.0;
  double monthly_income = 0.0;
  double fixed_expenses = 0.0;
  double disposable = 0.0;  // income - fixed, per month
  double share_budget = 0.0;  // share * income / weeks, before the ceiling
  bool clamped = false;
};

/// B_w = share * income / weeks_per_month, capped so a month of food fits the disposable income.
/// Throws BudgetError when disposable income is not positive and ConfigError for an
/// out-of-band share without the unsafe flag.
WeeklyBudget weekly_budget(const kb::HouseholdProfile& profile, const BudgetPolicy& policy = {});

}  // namespace pantry::budget
