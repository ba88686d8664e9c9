#pragma once

#include <map>
#include <string>
#include <vector>

namespace pantry::diet {

struct AdequacyReport {
  std::map<std::string, double> per_nutrient;  // achieved / R_n, uncapped
  double aggregate_pct = 0.0;                  // mean of min(1, ratio) over floor nutrients, x100
  std::vector<std::string> violations;         // ratio < 1, ascending by ratio

  bool operator==(const AdequacyReport&) const = default;
};

struct Substitution {
  std::string removed;
  std::string added;
  std::string reason;

  bool operator==(const Substitution&) const = default;
};

struct MealPlan {
  std::map<std::string, double> quantities;   // item id -> base units per week (nonzero only)
  double total_cost = 0.0;                    // sum of price * quantity
  AdequacyReport adequacy;
  std::map<std::string, double> prices_used;  // every candidate item priced into the model
  std::vector<Substitution> substitutions;

  double quantity(const std::string& item_id) const {
    auto it = quantities.find(item_id);
    return it == quantities.end() ? 0.0 : it->second;
  }

  bool operator==(const MealPlan&) const = default;
};

}  // namespace pantry::diet
