#include "pantry/kb/types.hpp"

#include "pantry/error.hpp"

namespace pantry::kb {

std::string_view to_string(Sex sex) { return sex == Sex::male ? "male" : "female"; }

std::string_view to_string(ActivityLevel level) {
  switch (level) {
    case ActivityLevel::sedentary: return "sedentary";
    case ActivityLevel::moderate: return "moderate";
    case ActivityLevel::active: return "active";
  }
  return "moderate";
}

Sex parse_sex(std::string_view text) {
  if (text == "male") return Sex::male;
  if (text == "female") return Sex::female;
  throw ValidationError("sex", "expected 'male' or 'female', got '" + std::string(text) + "'");
}

ActivityLevel parse_activity(std::string_view text) {
  if (text == "sedentary") return ActivityLevel::sedentary;
  if (text == "moderate") return ActivityLevel::moderate;
  if (text == "active") return ActivityLevel::active;
  throw ValidationError("activity_level", "unknown level '" + std::string(text) + "'");
}

std::string_view to_string(PlanTrigger trigger) {
  switch (trigger) {
    case PlanTrigger::initial: return "initial";
    case PlanTrigger::shock_replan: return "shock-replan";
    case PlanTrigger::manual: return "manual";
  }
  return "initial";
}

PlanTrigger parse_trigger(std::string_view text) {
  if (text == "initial") return PlanTrigger::initial;
  if (text == "shock-replan") return PlanTrigger::shock_replan;
  if (text == "manual") return PlanTrigger::manual;
  throw ValidationError("trigger", "unknown trigger '" + std::string(text) + "'");
}

std::map<std::string, double> RequirementTable::lookup(const HouseholdMember& member) const {
  for (const auto& bucket : buckets) {
    if (bucket.sex != member.sex || member.age < bucket.age_min || member.age > bucket.age_max) continue;
    auto values = bucket.weekly;
    auto mult = activity_energy_multiplier.find(member.activity_level);
    if (mult != activity_energy_multiplier.end()) {
      auto energy = values.find(energy_nutrient);
      if (energy != values.end()) energy->second *= mult->second;
    }
    return values;
  }
  throw TableCoverageError("no requirement bucket for age " + std::to_string(member.age) + " " +
                           std::string(to_string(member.sex)));
}

}  // namespace pantry::kb
