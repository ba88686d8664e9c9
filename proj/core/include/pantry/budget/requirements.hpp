#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pantry/kb/registry.hpp"
#include "pantry/kb/types.hpp"

namespace pantry::budget {

struct NutrientEffect {
  std::string nutrient;
  std::optional<double> multiplier;  // scales r_{m,n}
  std::optional<double> cap;         // weekly per-member upper limit U
};

struct PersonalizationRule {
  std::string condition;
  std::vector<NutrientEffect> effects;
};

/// Parses `[{condition, effects: [{nutrient, multiplier?|cap?}]}]` and checks registries,
/// positivity and one rule per condition.
std::vector<PersonalizationRule> rules_from_json(
    const nlohmann::json& doc, const kb::NutrientRegistry& nutrients = kb::NutrientRegistry::standard(),
    const kb::ConditionRegistry& conditions = kb::ConditionRegistry::standard());
nlohmann::json rules_to_json(std::span<const PersonalizationRule> rules);

struct HouseholdRequirements {
  std::map<std::string, double> floors;  // R_n
  std::map<std::string, double> caps;    // U_n
};

/// Member r_{m,n} with condition multipliers applied, summed over members.
///
/// A cap appears for nutrient n when at least one member has a capping rule; members with a
/// rule contribute their (tightest) rule cap, the rest contribute the table's default
/// per-member limit.
HouseholdRequirements household_requirements(const kb::HouseholdProfile& profile, const kb::RequirementTable& table,
                                             std::span<const PersonalizationRule> rules);

}  // namespace pantry::budget
