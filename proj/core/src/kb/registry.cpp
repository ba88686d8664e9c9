#include "pantry/kb/registry.hpp"

#include <algorithm>
#include <set>

#include "pantry/error.hpp"

namespace pantry::kb {

std::string_view to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::lower: return "lower";
    case BoundKind::upper: return "upper";
    case BoundKind::both: return "both";
  }
  return "lower";
}

NutrientRegistry::NutrientRegistry(std::vector<NutrientDef> defs) : defs_(std::move(defs)) {
  std::set<std::string> seen;
  for (const auto& def : defs_) {
    if (def.id.empty()) throw RegistryError("nutrient with empty id");
    if (!seen.insert(def.id).second) throw RegistryError("duplicate nutrient id '" + def.id + "'");
  }
}

const NutrientRegistry& NutrientRegistry::standard() {
  static const NutrientRegistry registry({
      {"energy", "Energy", "kcal", BoundKind::lower},
      {"protein", "Protein", "g", BoundKind::lower},
      {"fiber", "Dietary fiber", "g", BoundKind::lower},
      {"calcium", "Calcium", "mg", BoundKind::lower},
      {"iron", "Iron", "mg", BoundKind::lower},
      {"vitamin_d", "Vitamin D", "ug", BoundKind::lower},
      {"vitamin_c", "Vitamin C", "mg", BoundKind::lower},
      {"sodium", "Sodium", "mg", BoundKind::upper},
      {"sugar", "Sugars", "g", BoundKind::upper},
  });
  return registry;
}

const NutrientDef* NutrientRegistry::find(std::string_view id) const {
  auto it = std::find_if(defs_.begin(), defs_.end(), [&](const NutrientDef& d) { return d.id == id; });
  return it == defs_.end() ? nullptr : &*it;
}

std::vector<std::string> NutrientRegistry::floor_ids() const {
  std::vector<std::string> ids;
  for (const auto& def : defs_) {
    if (def.has_floor()) ids.push_back(def.id);
  }
  return ids;
}

TagRegistry::TagRegistry(std::vector<TagDef> defs) : defs_(std::move(defs)) {
  std::set<std::string> seen;
  for (const auto& def : defs_) {
    if (!seen.insert(def.id).second) throw RegistryError("duplicate tag '" + def.id + "'");
  }
}

const TagRegistry& TagRegistry::standard() {
  static const TagRegistry registry({
      {"halal", true},
      {"nut-free", true},
      {"gluten-free", true},
      {"vegetarian", false},
      {"low-sodium-suitable", false},
  });
  return registry;
}

const TagDef* TagRegistry::find(std::string_view id) const {
  auto it = std::find_if(defs_.begin(), defs_.end(), [&](const TagDef& d) { return d.id == id; });
  return it == defs_.end() ? nullptr : &*it;
}

bool TagRegistry::is_hard(std::string_view id) const {
  const TagDef* def = find(id);
  return def != nullptr && def->hard;
}

ConditionRegistry::ConditionRegistry(std::vector<std::string> codes) : codes_(std::move(codes)) {}

const ConditionRegistry& ConditionRegistry::standard() {
  static const ConditionRegistry registry({"vitamin-d-deficiency", "anemia", "hypertension", "diabetes"});
  return registry;
}

bool ConditionRegistry::contains(std::string_view code) const {
  return std::find(codes_.begin(), codes_.end(), code) != codes_.end();
}

}  // namespace pantry::kb
