#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pantry/budget/budget.hpp"
#include "pantry/budget/requirements.hpp"
#include "pantry/diet/meal_plan.hpp"
#include "pantry/diet/model.hpp"
#include "pantry/diet/planner.hpp"
#include "pantry/kb/knowledge_base.hpp"
#include "pantry/orchestrator/explain.hpp"
#include "pantry/orchestrator/procurement.hpp"
#include "pantry/price/replan.hpp"

namespace pantry::orchestrator {

enum class EventKind {
  data_ingested,
  budget_computed,
  requirements_computed,
  plan_generated,
  shock_detected,
  replanned,
  list_generated,
  explained,
};

std::string_view to_string(EventKind kind);
EventKind parse_event_kind(std::string_view text);

struct WorkflowEvent {
  EventKind kind = EventKind::data_ingested;
  std::uint64_t sequence = 0;
  nlohmann::json payload;
};

struct OrchestratorConfig {
  double tau = price::kDefaultShockThreshold;
  budget::BudgetPolicy budget_policy;
  std::optional<double> diversity_cap = 0.25;
  double baseline_mass_per_adult = 40.0;
  double min_similarity = price::kDefaultMinSimilarity;
  std::size_t candidate_count = price::kDefaultCandidateCount;

  bool price_monitor = true;
  bool health_personalizer = true;
  bool preference_agent = true;
};

/// Budget, requirements and LP configuration for one household, before prices.
struct PlanInputs {
  budget::WeeklyBudget budget;
  budget::HouseholdRequirements requirements;
  std::vector<std::string> applied_conditions;
  std::set<std::string> rules;            // rules a candidate must carry
  diet::DietModelConfig config;           // candidate_items filled
};

struct CycleResult {
  diet::MealPlan plan;
  ShoppingList shopping;
  Explanation explanation;
  budget::WeeklyBudget budget;
  std::vector<WorkflowEvent> events;  // emitted by this call
};

struct ReplanOutcome {
  diet::MealPlan plan;
  ShoppingList shopping;
  Explanation explanation;
  price::ReplanTrace trace;
  std::vector<WorkflowEvent> events;
};

struct IngestReport {
  std::size_t stored = 0;                    // quotes that changed the store
  std::vector<std::string> replanned;        // household ids, in id order
  std::map<std::string, std::string> failed;  // household id -> error message
};

struct WhatIfResult {
  diet::MealPlan baseline;  // active plan
  diet::MealPlan plan;      // hypothetical re-plan
  price::ReplanTrace trace;
  double cost_delta = 0.0;  // plan.total_cost - baseline.total_cost
  double adequacy_delta = 0.0;
};

/// Infeasible cycle; carries the explanation assembled up to the failure.
class CycleInfeasibleError : public diet::InfeasiblePlanError {
 public:
  CycleInfeasibleError(const diet::InfeasiblePlanError& cause, Explanation explanation)
      : diet::InfeasiblePlanError(cause), explanation_(std::move(explanation)) {}

  const Explanation& explanation() const noexcept { return explanation_; }

 private:
  Explanation explanation_;
};

/// Runs the weekly workflow for households stored in a KnowledgeBase.
///
/// Session state (active plan, candidate entrants, event log) lives in the knowledge base;
/// the log is saved after each step while the active plan and PlanRecord are only committed
/// once a cycle succeeds. Calls are serialized.
class Orchestrator {
 public:
  Orchestrator(kb::KnowledgeBase& store, kb::RequirementTable table, std::vector<budget::PersonalizationRule> rules,
               OrchestratorConfig config = {});

  const OrchestratorConfig& config() const { return config_; }
  const kb::RequirementTable& table() const { return table_; }

  /// Budget, requirements and candidate set for a profile, with extra entrant ids appended.
  PlanInputs prepare(const kb::HouseholdProfile& profile, const std::set<std::string>& entrants = {}) const;

  CycleResult run_weekly_cycle(const std::string& household_id, kb::Timestamp as_of);

  /// Stores the quotes, then checks the household's active plan for shocks and re-plans when any
  /// fire. Throws LookupError when the household has no active plan.
  std::optional<ReplanOutcome> ingest_prices_and_maybe_replan(const std::string& household_id,
                                                              std::span<const kb::PriceQuote> quotes);

  /// Stores the quotes once and checks every household holding an active plan.
  IngestReport ingest_prices(std::span<const kb::PriceQuote> quotes);

  /// Re-plan with one price moved by `rel_change`; nothing is stored.
  WhatIfResult what_if(const std::string& household_id, const std::string& item_id, double rel_change);

  std::optional<diet::MealPlan> active_plan(const std::string& household_id) const;
  std::vector<WorkflowEvent> events(const std::string& household_id) const;
  std::set<std::string> entrants(const std::string& household_id) const;

 private:
  struct Session;

  Session load_session(const std::string& household_id) const;
  void save_session(const Session& session);
  void emit(Session& session, EventKind kind, nlohmann::json payload, std::vector<WorkflowEvent>& out);
  kb::HouseholdProfile require_household(const std::string& household_id) const;
  std::map<std::string, double> context_prices(const PlanInputs& inputs, kb::Timestamp as_of) const;
  price::PlanningContext planning_context(const PlanInputs& inputs, const kb::HouseholdProfile& profile,
                                          std::map<std::string, double> prices,
                                          const price::SubstitutionGraph& graph) const;
  std::optional<ReplanOutcome> replan_locked(Session& session, const kb::HouseholdProfile& profile,
                                             kb::Timestamp as_of);

  kb::KnowledgeBase& store_;
  kb::RequirementTable table_;
  std::vector<budget::PersonalizationRule> rules_;
  OrchestratorConfig config_;
  mutable std::recursive_mutex mutex_;
};

}  // namespace pantry::orchestrator
