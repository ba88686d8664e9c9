#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pantry/diet/meal_plan.hpp"
#include "pantry/kb/types.hpp"

namespace pantry::orchestrator {

struct ShoppingLine {
  std::string item_id;
  long packs = 0;
  double pack_size = 1.0;   // base units per pack
  double unit_price = 0.0;  // per base unit
  double line_cost = 0.0;   // packs * pack_size * unit_price
};

struct ShoppingList {
  std::vector<ShoppingLine> lines;
  double total = 0.0;
  double planned_cost = 0.0;  // LP cost before rounding to packs

  double overshoot() const { return total - planned_cost; }
};

/// Smallest whole pack count per planned item, priced at the plan's own prices.
/// Throws LookupError for an item missing from `catalog` or from the plan's prices.
ShoppingList shopping_list(const diet::MealPlan& plan, std::span<const kb::FoodItem> catalog);

/// Smallest integer n with n * pack_size >= quantity, compared exactly.
long packs_needed(double quantity, double pack_size);

nlohmann::json shopping_list_to_json(const ShoppingList& list);

}  // namespace pantry::orchestrator
