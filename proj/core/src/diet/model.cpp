#include "pantry/diet/model.hpp"

#include <cmath>

#include "pantry/error.hpp"

namespace pantry::diet {

double adult_equivalent(int age) {
  if (age <= 3) return 0.4;
  if (age <= 8) return 0.6;
  if (age <= 13) return 0.8;
  return 1.0;
}

double adult_equivalents(const kb::HouseholdProfile& profile) {
  double total = 0.0;
  for (const auto& member : profile.members) total += adult_equivalent(member.age);
  return total;
}

void DietModelConfig::validate() const {
  if (diversity_cap && !(*diversity_cap > 0.0 && *diversity_cap <= 1.0)) {
    throw ContractViolation("diversity_cap must be in (0, 1]");
  }
  if (!(baseline_mass_per_adult > 0.0) || !(adult_equivalents > 0.0)) {
    throw ContractViolation("mass estimate must be positive");
  }
  for (const auto& [id, cap] : upper_bound_nutrients) {
    if (!(cap > 0.0)) throw ContractViolation("cap for '" + id + "' must be > 0");
  }
}

DietModel build_model(const DietModelConfig& config, const std::map<std::string, double>& requirements,
                      const std::map<std::string, double>& prices, double budget,
                      const kb::NutrientRegistry& registry) {
  config.validate();
  if (!std::isfinite(budget)) throw ContractViolation("budget must be finite");

  DietModel model;
  model.budget = budget;
  std::vector<std::string> missing;
  for (const auto& item : config.candidate_items) {
    auto price = prices.find(item.id);
    if (price == prices.end()) {
      missing.push_back(item.id);
      continue;
    }
    model.item_ids.push_back(item.id);
    model.prices.push_back(price->second);
  }
  if (!missing.empty()) throw MissingPriceError(std::move(missing));

  for (const auto& [id, value] : requirements) {
    const auto* def = registry.find(id);
    if (def == nullptr) throw RegistryError("requirement for unknown nutrient '" + id + "'");
    if (!def->has_floor()) throw ContractViolation("requirement given for cap-only nutrient '" + id + "'");
    if (!(value > 0.0)) throw ContractViolation("requirement for '" + id + "' must be > 0");
  }

  const auto& items = config.candidate_items;
  const std::size_t n = items.size();
  auto& lp = model.problem;
  lp.var_count = n;
  lp.objective = model.prices;

  for (const auto& def : registry.all()) {
    auto req = requirements.find(def.id);
    if (req == requirements.end()) continue;
    lp::LinearRow row{std::vector<double>(n, 0.0), req->second};
    bool any_source = false;
    for (std::size_t j = 0; j < n; ++j) {
      row.coeffs[j] = items[j].nutrient(def.id);
      any_source = any_source || row.coeffs[j] > 0.0;
    }
    if (!any_source) model.warnings.push_back("guaranteed infeasible: no candidate supplies " + def.id);
    lp.ge_constraints.push_back(std::move(row));
    model.floor_nutrients.push_back(def.id);
  }

  model.budget_row = lp.le_constraints.size();
  lp.le_constraints.push_back({model.prices, budget});

  for (const auto& def : registry.all()) {
    auto cap = config.upper_bound_nutrients.find(def.id);
    if (cap == config.upper_bound_nutrients.end()) continue;
    lp::LinearRow row{std::vector<double>(n, 0.0), cap->second};
    for (std::size_t j = 0; j < n; ++j) row.coeffs[j] = items[j].nutrient(def.id);
    lp.le_constraints.push_back(std::move(row));
    model.cap_nutrients.push_back(def.id);
  }
  for (const auto& [id, cap] : config.upper_bound_nutrients) {
    if (!registry.contains(id)) throw RegistryError("cap for unknown nutrient '" + id + "'");
  }

  model.first_diversity_row = lp.le_constraints.size();
  if (config.diversity_cap) {
    const double limit = *config.diversity_cap * config.mass_estimate();
    for (std::size_t j = 0; j < n; ++j) {
      lp::LinearRow row{std::vector<double>(n, 0.0), limit};
      row.coeffs[j] = 1.0;
      lp.le_constraints.push_back(std::move(row));
    }
  }
  return model;
}

}  // namespace pantry::diet
