#include "pantry/budget/requirements.hpp"

#include <algorithm>
#include <set>

#include "pantry/error.hpp"

namespace pantry::budget {

using nlohmann::json;

std::vector<PersonalizationRule> rules_from_json(const json& doc, const kb::NutrientRegistry& nutrients,
                                                 const kb::ConditionRegistry& conditions) {
  if (!doc.is_array()) throw ConfigError("personalization rules must be a JSON array");
  std::vector<PersonalizationRule> rules;
  std::set<std::string> seen;
  for (const auto& entry : doc) {
    PersonalizationRule rule;
    rule.condition = entry.at("condition").get<std::string>();
    if (!conditions.contains(rule.condition)) throw RegistryError("unknown condition '" + rule.condition + "'");
    if (!seen.insert(rule.condition).second) throw ConfigError("duplicate rule for '" + rule.condition + "'");
    for (const auto& e : entry.at("effects")) {
      NutrientEffect effect;
      effect.nutrient = e.at("nutrient").get<std::string>();
      if (!nutrients.contains(effect.nutrient)) throw RegistryError("unknown nutrient '" + effect.nutrient + "'");
      if (e.contains("multiplier")) effect.multiplier = e.at("multiplier").get<double>();
      if (e.contains("cap")) effect.cap = e.at("cap").get<double>();
      if (!effect.multiplier && !effect.cap) throw ConfigError("effect needs a multiplier or a cap");
      if (effect.multiplier && !(*effect.multiplier > 0.0)) throw ConfigError("multipliers must be > 0");
      if (effect.cap && !(*effect.cap > 0.0)) throw ConfigError("caps must be > 0");
      rule.effects.push_back(std::move(effect));
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

json rules_to_json(std::span<const PersonalizationRule> rules) {
  json doc = json::array();
  for (const auto& rule : rules) {
    json effects = json::array();
    for (const auto& e : rule.effects) {
      json effect{{"nutrient", e.nutrient}};
      if (e.multiplier) effect["multiplier"] = *e.multiplier;
      if (e.cap) effect["cap"] = *e.cap;
      effects.push_back(effect);
    }
    doc.push_back(json{{"condition", rule.condition}, {"effects", effects}});
  }
  return doc;
}

HouseholdRequirements household_requirements(const kb::HouseholdProfile& profile, const kb::RequirementTable& table,
                                             std::span<const PersonalizationRule> rules) {
  HouseholdRequirements out;
  std::vector<std::map<std::string, double>> member_caps(profile.members.size());
  std::set<std::string> capped;
  for (std::size_t m = 0; m < profile.members.size(); ++m) {
    const auto& member = profile.members[m];
    auto r = table.lookup(member);
    for (const auto& rule : rules) {
      if (!member.conditions.contains(rule.condition)) continue;
      for (const auto& effect : rule.effects) {
        if (effect.multiplier) {
          auto it = r.find(effect.nutrient);
          if (it != r.end()) it->second *= *effect.multiplier;
        }
        if (effect.cap) {
          auto [it, inserted] = member_caps[m].emplace(effect.nutrient, *effect.cap);
          if (!inserted) it->second = std::min(it->second, *effect.cap);
          capped.insert(effect.nutrient);
        }
      }
    }
    for (const auto& [nutrient, value] : r) out.floors[nutrient] += value;
  }
  std::erase_if(out.floors, [](const auto& entry) { return !(entry.second > 0.0); });
  for (const auto& nutrient : capped) {
    double total = 0.0;
    for (const auto& caps : member_caps) {
      auto own = caps.find(nutrient);
      if (own != caps.end()) {
        total += own->second;
        continue;
      }
      auto fallback = table.member_upper_limits.find(nutrient);
      if (fallback != table.member_upper_limits.end()) total += fallback->second;
    }
    out.caps[nutrient] = total;
  }
  return out;
}

}  // namespace pantry::budget
