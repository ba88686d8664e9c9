#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pantry/budget/requirements.hpp"
#include "pantry/kb/types.hpp"
#include "pantry/orchestrator/orchestrator.hpp"
#include "pantry/sim/households.hpp"
#include "pantry/sim/scenario.hpp"

namespace pantry::sim {

struct ExperimentData {
  std::vector<kb::FoodItem> foods;
  std::map<std::string, double> base_prices;  // one price per food
  kb::RequirementTable table;
  std::vector<budget::PersonalizationRule> rules;
};

/// Reads foods.csv, prices.jsonl (latest quote per item), requirements.json and
/// personalization_rules.json from `dir`. Throws DataError when a food has no price.
ExperimentData load_experiment_data(const std::filesystem::path& dir);

/// One method's outcome for one household-week.
struct WeekRecord {
  std::string household_id;
  int repetition = 0;
  int week = 0;
  Method method = Method::agentic;
  std::string variant;  // empty for the full system, else the disabled component

  bool feasible = false;    // a plan within this week's budget at this week's prices
  bool has_plan = false;    // some quantities were bought (possibly scaled down or stale)
  bool solved = false;      // quantities come from a solved plan (the fixed menu: its week-0 solve)
  bool comparable = false;  // every selected method produced a comparable cost this week
  double cost = 0.0;        // bought quantities at this week's prices
  double budget = 0.0;
  double adequacy_pct = 0.0;  // vs the fully personalized requirements, scaled by affordability
  double vitamin_d_pct = 0.0;
  std::map<std::string, double> nutrient_pct;
  int distinct_items = 0;
  bool shock_week = false;
  bool replanned = false;  // agentic: the price monitor fired and a re-plan ran
  int rule_violations = 0;
  std::map<std::string, double> quantities;
};

struct MetricsRow {
  std::string method;
  double mean_cost = 0.0;
  double sd_cost = 0.0;
  double savings_pct = 0.0;  // vs the fixed-menu row of the same run
  double adequacy_pct = 0.0;
  double replan_success = 0.0;  // share of shock weeks with a feasible plan
  double diversity = 0.0;       // mean distinct items in feasible weekly plans
  double vitamin_d_pct = 0.0;
  std::size_t cost_samples = 0;
};

struct ExperimentOptions {
  orchestrator::OrchestratorConfig orchestrator;  // tau is taken from the scenario
  unsigned threads = 0;                           // 0: one per hardware thread
  HouseholdSampling sampling;
  std::string variant;  // label stored on records
};

struct ExperimentResult {
  ScenarioConfig config;
  std::vector<MetricsRow> rows;     // selected methods, fixed-menu first
  std::vector<WeekRecord> records;  // ordered by household, repetition, week, method
  std::size_t dominance_checked = 0;
  std::size_t dominance_violations = 0;
  std::size_t rule_violations = 0;
  std::optional<double> min_feasible_agentic_adequacy;
  std::map<std::string, std::size_t> infeasible_weeks;  // method -> count
};

ExperimentResult run_experiment(const ScenarioConfig& config, const ExperimentData& data,
                                const ExperimentOptions& options = {});

enum class Component { price_monitor, health_personalizer, preference_agent };

std::string_view to_string(Component component);
Component parse_component(std::string_view text);

struct AblationResult {
  Component disabled = Component::price_monitor;
  MetricsRow full;     // agentic, over the weeks both variants planned
  MetricsRow ablated;
  ExperimentResult full_run;
  ExperimentResult ablated_run;
};

AblationResult run_ablation(const ScenarioConfig& config, const ExperimentData& data, Component disabled,
                            const ExperimentOptions& options = {});

/// `method,mean_cost,sd_cost,savings_pct,adequacy_pct,replan_success,diversity`
std::string metrics_csv(std::span<const MetricsRow> rows);
/// The metrics columns plus vitamin_d_pct, one row per variant.
std::string ablation_csv(const AblationResult& result);

nlohmann::json record_to_json(const WeekRecord& record);
WeekRecord record_from_json(const nlohmann::json& doc);
std::string records_jsonl(std::span<const WeekRecord> records);
std::vector<WeekRecord> load_records_jsonl(std::istream& in);

/// Cost per week, adequacy per nutrient and per week, by method.
nlohmann::json plot_data(std::span<const WeekRecord> records, std::span<const MetricsRow> rows = {});

/// Writes results.csv, records.jsonl and plot_data.json into `dir` (created if needed).
void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir);

}  // namespace pantry::sim
