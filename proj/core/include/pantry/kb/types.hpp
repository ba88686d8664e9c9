#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pantry/diet/meal_plan.hpp"

namespace pantry::kb {

using Timestamp = std::int64_t;  // epoch seconds

/// Quantities are in base units of 100 g; nutrient amounts and prices are per base unit.
struct FoodItem {
  std::string id;
  std::string name;
  std::string category;
  std::map<std::string, double> nutrients;
  std::set<std::string> tags;
  double pack_size = 1.0;
  bool available = true;

  double nutrient(std::string_view nutrient_id) const {
    auto it = nutrients.find(std::string(nutrient_id));
    return it == nutrients.end() ? 0.0 : it->second;
  }

  bool operator==(const FoodItem&) const = default;
};

struct PriceQuote {
  std::string item_id;
  std::string vendor;
  double price = 0.0;  // SAR per 100 g
  Timestamp timestamp = 0;

  bool operator==(const PriceQuote&) const = default;
};

enum class Sex { male, female };
enum class ActivityLevel { sedentary, moderate, active };

std::string_view to_string(Sex sex);
std::string_view to_string(ActivityLevel level);
Sex parse_sex(std::string_view text);
ActivityLevel parse_activity(std::string_view text);

struct HouseholdMember {
  int age = 0;
  Sex sex = Sex::female;
  ActivityLevel activity_level = ActivityLevel::moderate;
  std::set<std::string> conditions;

  bool operator==(const HouseholdMember&) const = default;
};

struct HouseholdProfile {
  std::string id;
  std::vector<HouseholdMember> members;
  double monthly_income = 0.0;
  double fixed_expenses = 0.0;
  std::set<std::string> dietary_rules;
  std::optional<double> food_share;  // falls back to the budget policy default when unset
  /// Customary basket. Empty means every rule-compatible item is a regular candidate.
  std::vector<std::string> preferred_items;
  /// Items the household has rejected; never planned.
  std::set<std::string> excluded_items;

  bool operator==(const HouseholdProfile&) const = default;
};

struct RequirementBucket {
  int age_min = 0;
  int age_max = 0;  // inclusive
  Sex sex = Sex::female;
  std::map<std::string, double> weekly;  // nutrient id -> r per week at moderate activity

  bool operator==(const RequirementBucket&) const = default;
};

/// Weekly recommended intakes per demographic bucket (age band x sex); activity scales energy only.
struct RequirementTable {
  std::vector<RequirementBucket> buckets;
  std::map<ActivityLevel, double> activity_energy_multiplier{
      {ActivityLevel::sedentary, 1.0}, {ActivityLevel::moderate, 1.0}, {ActivityLevel::active, 1.0}};
  std::string energy_nutrient = "energy";
  /// Per-member weekly upper limits used when a household-level cap is assembled.
  std::map<std::string, double> member_upper_limits;

  /// r_{m,n} for one member. Throws TableCoverageError when no bucket matches.
  std::map<std::string, double> lookup(const HouseholdMember& member) const;

  bool operator==(const RequirementTable&) const = default;
};

enum class PlanTrigger { initial, shock_replan, manual };

std::string_view to_string(PlanTrigger trigger);
PlanTrigger parse_trigger(std::string_view text);

struct PlanRecord {
  diet::MealPlan plan;
  std::string household_id;
  int week_index = 0;
  PlanTrigger trigger = PlanTrigger::initial;
  Timestamp created_at = 0;

  bool operator==(const PlanRecord&) const = default;
};

}  // namespace pantry::kb
