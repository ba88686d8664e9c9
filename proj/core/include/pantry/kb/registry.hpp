#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pantry::kb {

enum class BoundKind { lower, upper, both };

std::string_view to_string(BoundKind kind);

struct NutrientDef {
  std::string id;
  std::string name;
  std::string unit;
  BoundKind bound_kind = BoundKind::lower;

  bool has_floor() const { return bound_kind != BoundKind::upper; }
};

/// Ordered nutrient registry. Iteration order is the column order used
/// everywhere a nutrient vector is materialized.
class NutrientRegistry {
 public:
  explicit NutrientRegistry(std::vector<NutrientDef> defs);

  /// energy, protein, fiber, calcium, iron, vitamin_d, vitamin_c (floors) and sodium, sugar (caps).
  static const NutrientRegistry& standard();

  const std::vector<NutrientDef>& all() const { return defs_; }
  const NutrientDef* find(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id) != nullptr; }

  /// Ids whose bound kind is lower or both, in registry order.
  std::vector<std::string> floor_ids() const;

 private:
  std::vector<NutrientDef> defs_;
};

struct TagDef {
  std::string id;
  bool hard = false;  // hard rules (religious, allergy) survive the preference-agent ablation
};

class TagRegistry {
 public:
  explicit TagRegistry(std::vector<TagDef> defs);

  /// halal, nut-free, gluten-free (hard); vegetarian, low-sodium-suitable (soft).
  static const TagRegistry& standard();

  const std::vector<TagDef>& all() const { return defs_; }
  const TagDef* find(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id) != nullptr; }
  bool is_hard(std::string_view id) const;

 private:
  std::vector<TagDef> defs_;
};

class ConditionRegistry {
 public:
  explicit ConditionRegistry(std::vector<std::string> codes);

  /// vitamin-d-deficiency, anemia, hypertension, diabetes.
  static const ConditionRegistry& standard();

  const std::vector<std::string>& all() const { return codes_; }
  bool contains(std::string_view code) const;

 private:
  std::vector<std::string> codes_;
};

}  // namespace pantry::kb
