#include "pantry/orchestrator/procurement.hpp"

#include <cmath>

#include "pantry/error.hpp"

namespace pantry::orchestrator {

long packs_needed(double quantity, double pack_size) {
  if (!(pack_size > 0.0)) throw ContractViolation("pack size must be > 0");
  if (!(quantity > 0.0)) return 0;
  auto packs = static_cast<long>(std::ceil(quantity / pack_size));
  while (static_cast<double>(packs) * pack_size < quantity) ++packs;
  while (packs > 1 && static_cast<double>(packs - 1) * pack_size >= quantity) --packs;
  return packs;
}

ShoppingList shopping_list(const diet::MealPlan& plan, std::span<const kb::FoodItem> catalog) {
  ShoppingList list;
  list.planned_cost = plan.total_cost;
  for (const auto& [id, quantity] : plan.quantities) {
    if (!(quantity > 0.0)) continue;
    const kb::FoodItem* item = nullptr;
    for (const auto& candidate : catalog) {
      if (candidate.id == id) {
        item = &candidate;
        break;
      }
    }
    if (item == nullptr) throw LookupError("unknown item '" + id + "' in plan");
    auto price = plan.prices_used.find(id);
    if (price == plan.prices_used.end()) throw LookupError("plan has no price for '" + id + "'");

    ShoppingLine line{id, packs_needed(quantity, item->pack_size), item->pack_size, price->second, 0.0};
    line.line_cost = static_cast<double>(line.packs) * line.pack_size * line.unit_price;
    list.total += line.line_cost;
    list.lines.push_back(line);
  }
  return list;
}

nlohmann::json shopping_list_to_json(const ShoppingList& list) {
  nlohmann::json lines = nlohmann::json::array();
  for (const auto& line : list.lines) {
    lines.push_back({{"item_id", line.item_id},
                     {"packs", line.packs},
                     {"pack_size", line.pack_size},
                     {"unit_price", line.unit_price},
                     {"line_cost", line.line_cost}});
  }
  return {{"lines", lines}, {"total", list.total}, {"planned_cost", list.planned_cost},
          {"overshoot", list.overshoot()}};
}

}  // namespace pantry::orchestrator
