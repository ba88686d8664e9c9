#include "pantry/price/replan.hpp"

#include <cmath>
#include <cstdio>

#include "pantry/diet/planner.hpp"
#include "pantry/error.hpp"

namespace pantry::price {

namespace {

constexpr double kQuantityEpsilon = 1e-9;

std::string percent(double rel) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.1f%%", rel * 100.0);
  return buf;
}

}  // namespace

ReplanResult replan_on_shock(const diet::MealPlan& current, std::span<const ShockEvent> events,
                             const PlanningContext& context) {
  if (events.empty()) throw ContractViolation("replan_on_shock needs at least one event");
  if (context.graph == nullptr) throw ContractViolation("planning context has no substitution graph");

  std::set<std::string> in_set;
  for (const auto& item : context.config.candidate_items) in_set.insert(item.id);

  ReplanResult result;
  std::set<std::string> wanted = in_set;
  for (const auto& event : events) {
    ShockTraceEntry entry{event, {}, {}};
    if (context.graph->contains(event.item_id)) {
      entry.candidates = substitution_candidates(*context.graph, event.item_id, context.rules, context.k,
                                                 context.catalog, context.prices);
    }
    for (const auto& id : entry.candidates) {
      if (context.excluded.contains(id) || !context.prices.contains(id)) continue;
      if (wanted.insert(id).second) entry.entrants.push_back(id);
    }
    result.trace.shocks.push_back(std::move(entry));
  }

  // Existing candidates keep their order; entrants follow in catalog order.
  result.candidate_items = context.config.candidate_items;
  for (const auto& item : context.catalog) {
    if (wanted.contains(item.id) && !in_set.contains(item.id)) result.candidate_items.push_back(item);
  }

  diet::DietModelConfig config = context.config;
  config.candidate_items = result.candidate_items;
  result.plan = diet::plan(config, context.requirements, context.prices, context.budget);

  result.trace.old_cost_revalued = diet::plan_cost(current.quantities, context.prices);
  result.trace.new_cost = result.plan.total_cost;

  std::set<std::string> touched;
  for (const auto& [id, q] : current.quantities) touched.insert(id);
  for (const auto& [id, q] : result.plan.quantities) touched.insert(id);
  for (const auto& id : touched) {
    double delta = result.plan.quantity(id) - current.quantity(id);
    if (std::abs(delta) > kQuantityEpsilon) result.trace.quantity_delta[id] = delta;
  }

  for (const auto& entry : result.trace.shocks) {
    const auto& s = entry.event.item_id;
    if (!(result.plan.quantity(s) < current.quantity(s) - kQuantityEpsilon)) continue;
    for (const auto& c : entry.candidates) {
      if (result.plan.quantity(c) > current.quantity(c) + kQuantityEpsilon) {
        result.plan.substitutions.push_back(
            {s, c, s + " " + percent(entry.event.rel_change) + ", replaced in part by " + c});
      }
    }
  }
  return result;
}

nlohmann::json trace_to_json(const ReplanTrace& trace) {
  nlohmann::json shocks = nlohmann::json::array();
  for (const auto& entry : trace.shocks) {
    shocks.push_back({{"item_id", entry.event.item_id},
                      {"rel_change", entry.event.rel_change},
                      {"old_price", entry.event.old_price},
                      {"new_price", entry.event.new_price},
                      {"candidates", entry.candidates},
                      {"entrants", entry.entrants}});
  }
  return {{"shocks", shocks},
          {"quantity_delta", trace.quantity_delta},
          {"old_cost_revalued", trace.old_cost_revalued},
          {"new_cost", trace.new_cost}};
}

}  // namespace pantry::price
