#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pantry/kb/types.hpp"

namespace pantry::sim {

/// Sampling strata for synthetic households.
///
/// Every household has two adults (25-55, one of each sex). Each further member is a
/// grandparent (60-80) with `grandparent_probability`, otherwise a child (1-17) of either sex.
/// Conditions: vitamin-D deficiency for anyone; anemia mostly for women 12-50; hypertension and
/// diabetes from age 40.
struct HouseholdSampling {
  double income_min = 5000.0;
  double income_max = 15000.0;
  int size_min = 2;
  int size_max = 6;
  double fixed_share_min = 0.40;  // fixed expenses as a share of income
  double fixed_share_max = 0.70;
  double food_share_min = 0.15;
  double food_share_max = 0.25;
  double grandparent_probability = 0.15;
  double basket_share = 0.60;  // chance each rule-compatible item joins the customary basket

  std::vector<std::pair<std::string, double>> rule_probability{
      {"halal", 0.90}, {"vegetarian", 0.10}, {"low-sodium-suitable", 0.15}, {"nut-free", 0.05}, {"gluten-free", 0.03}};
  double vitamin_d_deficiency = 0.30;
  double anemia_women = 0.20;  // women 12-50
  double anemia_other = 0.05;
  double hypertension = 0.20;  // age >= 40
  double diabetes = 0.12;      // age >= 40
};

/// Returns false for a basket that cannot meet the household's needs at any price.
using BasketCheck = std::function<bool(const kb::HouseholdProfile&)>;

inline constexpr int kBasketAttempts = 20;

/// Households "sim-0001" ... drawn from one stream per household index, so the first k of
/// n households do not depend on n. A nonempty catalog adds a preferred basket; a basket
/// rejected by `check` is redrawn from the same stream, and after kBasketAttempts rejections
/// the household plans over every rule-compatible item.
std::vector<kb::HouseholdProfile> generate_households(std::size_t n, std::uint64_t seed,
                                                      std::span<const kb::FoodItem> catalog = {},
                                                      const HouseholdSampling& sampling = {},
                                                      const BasketCheck& check = {});

}  // namespace pantry::sim
