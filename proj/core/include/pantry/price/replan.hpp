#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pantry/diet/meal_plan.hpp"
#include "pantry/diet/model.hpp"
#include "pantry/kb/types.hpp"
#include "pantry/price/shocks.hpp"
#include "pantry/price/substitution.hpp"

namespace pantry::price {

inline constexpr std::size_t kDefaultCandidateCount = 3;

/// Everything a re-solve needs besides the shocked plan.
struct PlanningContext {
  diet::DietModelConfig config;               // candidate_items holds the current candidate set
  std::map<std::string, double> requirements;  // R_n
  double budget = 0.0;
  std::vector<kb::FoodItem> catalog;           // all known foods, source for entrants
  const SubstitutionGraph* graph = nullptr;
  std::set<std::string> rules;                 // hard and soft rules a candidate must carry
  std::set<std::string> excluded;
  std::size_t k = kDefaultCandidateCount;
  std::map<std::string, double> prices;        // current prices for every catalog item in play
};

struct ShockTraceEntry {
  ShockEvent event;
  std::vector<std::string> candidates;  // ranked, as considered
  std::vector<std::string> entrants;    // priced candidates that were not already in the set
};

struct ReplanTrace {
  std::vector<ShockTraceEntry> shocks;
  std::map<std::string, double> quantity_delta;  // new - old, items whose quantity moved
  double old_cost_revalued = 0.0;                // previous quantities at current prices
  double new_cost = 0.0;
};

struct ReplanResult {
  diet::MealPlan plan;
  ReplanTrace trace;
  std::vector<kb::FoodItem> candidate_items;  // expanded set the plan was solved over
};

/// Expands the candidate set with the substitutes of every shocked item and re-solves the full
/// LP at current prices. Throws diet::InfeasiblePlanError when the re-solve is infeasible and
/// ContractViolation for an empty event list.
ReplanResult replan_on_shock(const diet::MealPlan& current, std::span<const ShockEvent> events,
                             const PlanningContext& context);

nlohmann::json trace_to_json(const ReplanTrace& trace);

}  // namespace pantry::price
