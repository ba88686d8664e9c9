#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pantry/kb/registry.hpp"
#include "pantry/kb/types.hpp"
#include "pantry/lp/problem.hpp"

namespace pantry::diet {

/// Adult-equivalent weight of one member for the plan-mass estimate.
double adult_equivalent(int age);
double adult_equivalents(const kb::HouseholdProfile& profile);

struct DietModelConfig {
  /// Max share of the mass estimate any single item may take. nullopt removes the rows.
  std::optional<double> diversity_cap = 0.25;
  /// Weekly plan mass per adult-equivalent, in base units (100 g).
  double baseline_mass_per_adult = 40.0;
  double adult_equivalents = 1.0;
  std::map<std::string, double> upper_bound_nutrients;  // nutrient id -> weekly cap U_n
  std::vector<kb::FoodItem> candidate_items;

  double mass_estimate() const { return baseline_mass_per_adult * adult_equivalents; }
  void validate() const;
};

/// LP instance plus the row/column labels needed to read a solution back.
struct DietModel {
  lp::LpProblem problem;
  std::vector<std::string> item_ids;         // column order
  std::vector<double> prices;                // objective, by column
  std::vector<std::string> floor_nutrients;  // ge row i
  std::size_t budget_row = 0;                // le row holding sum p_j x_j <= B_w
  std::vector<std::string> cap_nutrients;    // le rows budget_row+1 ...
  std::size_t first_diversity_row = 0;       // le rows from here on are x_j <= cap * M
  double budget = 0.0;
  std::vector<std::string> warnings;
};

/// One variable per candidate; ge rows for each floor nutrient with a requirement; le rows for
/// the budget, each capped nutrient and (optionally) per-item diversity. Throws MissingPriceError
/// when a candidate has no price and ContractViolation for non-positive requirements.
DietModel build_model(const DietModelConfig& config, const std::map<std::string, double>& requirements,
                      const std::map<std::string, double>& prices, double budget,
                      const kb::NutrientRegistry& registry = kb::NutrientRegistry::standard());

}  // namespace pantry::diet
