#include "pantry/orchestrator/orchestrator.hpp"

#include <algorithm>
#include <array>

#include "pantry/error.hpp"
#include "pantry/kb/io.hpp"
#include "pantry/kb/registry.hpp"
#include "pantry/price/shocks.hpp"
#include "pantry/price/substitution.hpp"

namespace pantry::orchestrator {

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 8> kEventNames{{
    {EventKind::data_ingested, "data-ingested"},
    {EventKind::budget_computed, "budget-computed"},
    {EventKind::requirements_computed, "requirements-computed"},
    {EventKind::plan_generated, "plan-generated"},
    {EventKind::shock_detected, "shock-detected"},
    {EventKind::replanned, "replanned"},
    {EventKind::list_generated, "list-generated"},
    {EventKind::explained, "explained"},
}};

nlohmann::json plan_summary(const diet::MealPlan& plan) {
  return {{"total_cost", plan.total_cost}, {"items", plan.quantities.size()},
          {"adequacy_pct", plan.adequacy.aggregate_pct}};
}

std::vector<std::string> ids_of(const std::vector<kb::FoodItem>& items) {
  std::vector<std::string> out;
  out.reserve(items.size());
  for (const auto& item : items) out.push_back(item.id);
  return out;
}

std::map<std::string, double> price_values(const std::map<std::string, kb::PriceQuote>& quotes) {
  std::map<std::string, double> out;
  for (const auto& [id, quote] : quotes) out[id] = quote.price;
  return out;
}

}  // namespace

std::string_view to_string(EventKind kind) {
  for (const auto& [k, name] : kEventNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

EventKind parse_event_kind(std::string_view text) {
  for (const auto& [k, name] : kEventNames) {
    if (name == text) return k;
  }
  throw DataError("unknown workflow event kind '" + std::string(text) + "'");
}

struct Orchestrator::Session {
  std::string household_id;
  int week_index = 0;
  std::uint64_t next_sequence = 1;
  std::optional<diet::MealPlan> active;
  kb::Timestamp active_as_of = 0;
  std::set<std::string> entrants;
  std::vector<WorkflowEvent> events;
};

Orchestrator::Orchestrator(kb::KnowledgeBase& store, kb::RequirementTable table,
                           std::vector<budget::PersonalizationRule> rules, OrchestratorConfig config)
    : store_(store), table_(std::move(table)), rules_(std::move(rules)), config_(std::move(config)) {
  if (!(config_.tau > 0.0)) throw ConfigError("shock threshold must be > 0");
}

Orchestrator::Session Orchestrator::load_session(const std::string& household_id) const {
  Session s;
  s.household_id = household_id;
  auto doc = store_.session(household_id);
  if (!doc) return s;
  s.week_index = doc->at("week_index").get<int>();
  s.next_sequence = doc->at("next_sequence").get<std::uint64_t>();
  if (!doc->at("active_plan").is_null()) s.active = kb::plan_from_json(doc->at("active_plan"));
  s.active_as_of = doc->at("active_as_of").get<kb::Timestamp>();
  s.entrants = doc->at("entrants").get<std::set<std::string>>();
  for (const auto& e : doc->at("events")) {
    s.events.push_back({parse_event_kind(e.at("kind").get<std::string>()), e.at("sequence").get<std::uint64_t>(),
                        e.at("payload")});
  }
  return s;
}

void Orchestrator::save_session(const Session& s) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : s.events) {
    events.push_back({{"kind", to_string(e.kind)}, {"sequence", e.sequence}, {"payload", e.payload}});
  }
  store_.put_session(s.household_id, {{"schema", 1},
                                      {"week_index", s.week_index},
                                      {"next_sequence", s.next_sequence},
                                      {"active_plan", s.active ? kb::plan_to_json(*s.active) : nlohmann::json()},
                                      {"active_as_of", s.active_as_of},
                                      {"entrants", s.entrants},
                                      {"events", events}});
}

void Orchestrator::emit(Session& session, EventKind kind, nlohmann::json payload, std::vector<WorkflowEvent>& out) {
  WorkflowEvent event{kind, session.next_sequence++, std::move(payload)};
  session.events.push_back(event);
  out.push_back(std::move(event));
  save_session(session);
}

kb::HouseholdProfile Orchestrator::require_household(const std::string& household_id) const {
  auto profile = store_.household(household_id);
  if (!profile) throw LookupError("unknown household '" + household_id + "'");
  return *profile;
}

PlanInputs Orchestrator::prepare(const kb::HouseholdProfile& profile, const std::set<std::string>& entrants) const {
  PlanInputs in;
  in.budget = budget::weekly_budget(profile, config_.budget_policy);

  const std::span<const budget::PersonalizationRule> rules =
      config_.health_personalizer ? std::span<const budget::PersonalizationRule>(rules_)
                                  : std::span<const budget::PersonalizationRule>();
  in.requirements = budget::household_requirements(profile, table_, rules);
  if (config_.health_personalizer) {
    std::set<std::string> applied;
    for (const auto& member : profile.members) {
      for (const auto& rule : rules_) {
        if (member.conditions.contains(rule.condition)) applied.insert(rule.condition);
      }
    }
    in.applied_conditions.assign(applied.begin(), applied.end());
  }

  const auto& tags = kb::TagRegistry::standard();
  for (const auto& rule : profile.dietary_rules) {
    if (config_.preference_agent || tags.is_hard(rule)) in.rules.insert(rule);
  }

  const bool use_basket = config_.preference_agent && !profile.preferred_items.empty();
  std::set<std::string> basket(profile.preferred_items.begin(), profile.preferred_items.end());
  auto catalog = store_.foods();
  for (auto& item : kb::compatible_items(*catalog, in.rules)) {
    if (profile.excluded_items.contains(item.id)) continue;
    if (use_basket && !basket.contains(item.id) && !entrants.contains(item.id)) continue;
    in.config.candidate_items.push_back(std::move(item));
  }

  in.config.diversity_cap = config_.preference_agent ? config_.diversity_cap : std::nullopt;
  in.config.baseline_mass_per_adult = config_.baseline_mass_per_adult;
  in.config.adult_equivalents = diet::adult_equivalents(profile);
  in.config.upper_bound_nutrients = in.requirements.caps;
  return in;
}

std::map<std::string, double> Orchestrator::context_prices(const PlanInputs& inputs, kb::Timestamp as_of) const {
  auto prices = price_values(store_.latest_prices(as_of, ids_of(inputs.config.candidate_items)));

  // Entrant prices are best effort: an unpriced neighbor simply cannot enter.
  auto catalog = store_.foods();
  std::vector<std::string> others;
  for (const auto& item : kb::compatible_items(*catalog, inputs.rules)) {
    if (!prices.contains(item.id)) others.push_back(item.id);
  }
  for (int attempt = 0; attempt < 2 && !others.empty(); ++attempt) {
    try {
      prices.merge(price_values(store_.latest_prices(as_of, others)));
      break;
    } catch (const MissingPriceError& e) {
      std::set<std::string> missing(e.item_ids().begin(), e.item_ids().end());
      std::erase_if(others, [&](const std::string& id) { return missing.contains(id); });
    }
  }
  return prices;
}

price::PlanningContext Orchestrator::planning_context(const PlanInputs& inputs, const kb::HouseholdProfile& profile,
                                                      std::map<std::string, double> prices,
                                                      const price::SubstitutionGraph& graph) const {
  price::PlanningContext ctx;
  ctx.config = inputs.config;
  ctx.requirements = inputs.requirements.floors;
  ctx.budget = inputs.budget.amount;
  ctx.catalog = *store_.foods();
  ctx.graph = &graph;
  ctx.rules = inputs.rules;
  ctx.excluded = profile.excluded_items;
  ctx.k = config_.candidate_count;
  ctx.prices = std::move(prices);
  return ctx;
}

CycleResult Orchestrator::run_weekly_cycle(const std::string& household_id, kb::Timestamp as_of) {
  std::lock_guard lock(mutex_);
  const auto profile = require_household(household_id);
  Session session = load_session(household_id);
  const auto catalog = store_.foods();

  auto inputs = prepare(profile, session.entrants);
  auto prices = context_prices(inputs, as_of);

  CycleResult result;
  result.budget = inputs.budget;
  emit(session, EventKind::data_ingested,
       {{"as_of", as_of}, {"foods", catalog->size()}, {"candidates", inputs.config.candidate_items.size()}},
       result.events);
  emit(session, EventKind::budget_computed, {{"weekly_budget", inputs.budget.amount}}, result.events);
  emit(session, EventKind::requirements_computed, {{"floors", inputs.requirements.floors}}, result.events);

  ExplainInputs why;
  why.budget = &inputs.budget;
  why.applied_conditions = &inputs.applied_conditions;
  why.requirements = &inputs.requirements.floors;
  why.catalog = *catalog;

  try {
    result.plan = diet::plan(inputs.config, inputs.requirements.floors, prices, inputs.budget.amount);
  } catch (const diet::InfeasiblePlanError& e) {
    why.requirements = nullptr;
    why.diagnosis = &e.diagnosis();
    throw CycleInfeasibleError(e, explain(nullptr, why));
  }
  emit(session, EventKind::plan_generated, plan_summary(result.plan), result.events);

  result.shopping = shopping_list(result.plan, *catalog);
  emit(session, EventKind::list_generated, {{"lines", result.shopping.lines.size()}, {"total", result.shopping.total}},
       result.events);

  why.shopping = &result.shopping;
  result.explanation = explain(&result.plan, why);
  emit(session, EventKind::explained, {{"entries", result.explanation.entries.size()}}, result.events);

  store_.append_plan({result.plan, household_id, session.week_index, kb::PlanTrigger::initial, as_of});
  session.active = result.plan;
  session.active_as_of = as_of;
  ++session.week_index;
  save_session(session);
  return result;
}

std::optional<ReplanOutcome> Orchestrator::replan_locked(Session& session, const kb::HouseholdProfile& profile,
                                                         kb::Timestamp as_of) {
  std::vector<WorkflowEvent> events;
  emit(session, EventKind::data_ingested, {{"as_of", as_of}}, events);
  if (!config_.price_monitor) return std::nullopt;

  const auto& active = *session.active;
  std::vector<std::string> watched;
  for (const auto& [id, p] : active.prices_used) watched.push_back(id);
  auto current = price_values(store_.latest_prices(as_of, watched));
  auto shocks = price::detect_shocks(active.prices_used, current, config_.tau, as_of);
  if (shocks.empty()) return std::nullopt;

  nlohmann::json shock_json = nlohmann::json::array();
  for (const auto& s : shocks) {
    auto entry = price::shock_to_json(s);
    shock_json.push_back(entry);
    entry["household_id"] = session.household_id;
    store_.append_shock_log(entry);
  }
  emit(session, EventKind::shock_detected, {{"events", shock_json}}, events);

  auto inputs = prepare(profile, session.entrants);
  const auto graph = price::build_substitution_graph(*store_.foods(), config_.min_similarity,
                                                     inputs.requirements.floors);
  auto ctx = planning_context(inputs, profile, context_prices(inputs, as_of), graph);

  const auto catalog = store_.foods();
  ExplainInputs why;
  why.budget = &inputs.budget;
  why.applied_conditions = &inputs.applied_conditions;
  why.requirements = &inputs.requirements.floors;
  why.catalog = *catalog;

  price::ReplanResult replan;
  try {
    replan = price::replan_on_shock(active, shocks, ctx);
  } catch (const diet::InfeasiblePlanError& e) {
    why.requirements = nullptr;
    why.diagnosis = &e.diagnosis();
    throw CycleInfeasibleError(e, explain(nullptr, why));
  }

  ReplanOutcome out;
  out.plan = std::move(replan.plan);
  out.trace = std::move(replan.trace);
  std::set<std::string> entrants = session.entrants;
  for (const auto& s : out.trace.shocks) entrants.insert(s.entrants.begin(), s.entrants.end());
  emit(session, EventKind::replanned,
       {{"total_cost", out.plan.total_cost}, {"old_cost_revalued", out.trace.old_cost_revalued},
        {"substitutions", out.plan.substitutions.size()}},
       events);

  out.shopping = shopping_list(out.plan, *catalog);
  emit(session, EventKind::list_generated, {{"lines", out.shopping.lines.size()}, {"total", out.shopping.total}},
       events);

  why.trace = &out.trace;
  why.shopping = &out.shopping;
  out.explanation = explain(&out.plan, why);
  emit(session, EventKind::explained, {{"entries", out.explanation.entries.size()}}, events);

  store_.append_plan({out.plan, session.household_id, std::max(0, session.week_index - 1),
                      kb::PlanTrigger::shock_replan, as_of});
  session.active = out.plan;
  session.active_as_of = as_of;
  session.entrants = std::move(entrants);
  save_session(session);
  out.events = std::move(events);
  return out;
}

std::optional<ReplanOutcome> Orchestrator::ingest_prices_and_maybe_replan(const std::string& household_id,
                                                                          std::span<const kb::PriceQuote> quotes) {
  std::lock_guard lock(mutex_);
  const auto profile = require_household(household_id);
  Session session = load_session(household_id);
  if (!session.active) throw LookupError("household '" + household_id + "' has no active plan");
  store_.ingest_prices(quotes);

  kb::Timestamp as_of = session.active_as_of;
  for (const auto& q : quotes) as_of = std::max(as_of, q.timestamp);
  return replan_locked(session, profile, as_of);
}

IngestReport Orchestrator::ingest_prices(std::span<const kb::PriceQuote> quotes) {
  std::lock_guard lock(mutex_);
  IngestReport report;
  report.stored = store_.ingest_prices(quotes);
  for (const auto& id : store_.household_ids()) {
    Session session = load_session(id);
    if (!session.active) continue;
    kb::Timestamp as_of = session.active_as_of;
    for (const auto& q : quotes) as_of = std::max(as_of, q.timestamp);
    try {
      if (replan_locked(session, require_household(id), as_of)) report.replanned.push_back(id);
    } catch (const Error& e) {
      report.failed[id] = e.what();
    }
  }
  return report;
}

WhatIfResult Orchestrator::what_if(const std::string& household_id, const std::string& item_id, double rel_change) {
  std::lock_guard lock(mutex_);
  const auto profile = require_household(household_id);
  const Session session = load_session(household_id);
  if (!session.active) throw LookupError("household '" + household_id + "' has no active plan");
  if (!store_.food(item_id)) throw LookupError("unknown item '" + item_id + "'");
  if (!(rel_change > -1.0)) throw ValidationError("rel_change", "must be > -1");

  WhatIfResult out;
  out.baseline = *session.active;
  out.plan = out.baseline;
  out.trace.old_cost_revalued = out.baseline.total_cost;
  out.trace.new_cost = out.baseline.total_cost;
  if (rel_change == 0.0) return out;

  auto inputs = prepare(profile, session.entrants);
  auto prices = context_prices(inputs, session.active_as_of);
  for (const auto& [id, p] : out.baseline.prices_used) prices[id] = p;
  auto old_price = prices.find(item_id);
  if (old_price == prices.end()) throw LookupError("no price for '" + item_id + "'");

  price::ShockEvent event{item_id, old_price->second, old_price->second * (1.0 + rel_change), rel_change,
                          session.active_as_of};
  old_price->second = event.new_price;

  const auto graph =
      price::build_substitution_graph(*store_.foods(), config_.min_similarity, inputs.requirements.floors);
  auto ctx = planning_context(inputs, profile, std::move(prices), graph);
  auto replan = price::replan_on_shock(out.baseline, std::span(&event, 1), ctx);
  out.plan = std::move(replan.plan);
  out.trace = std::move(replan.trace);
  out.cost_delta = out.plan.total_cost - out.baseline.total_cost;
  out.adequacy_delta = out.plan.adequacy.aggregate_pct - out.baseline.adequacy.aggregate_pct;
  return out;
}

std::optional<diet::MealPlan> Orchestrator::active_plan(const std::string& household_id) const {
  std::lock_guard lock(mutex_);
  return load_session(household_id).active;
}

std::vector<WorkflowEvent> Orchestrator::events(const std::string& household_id) const {
  std::lock_guard lock(mutex_);
  return load_session(household_id).events;
}

std::set<std::string> Orchestrator::entrants(const std::string& household_id) const {
  std::lock_guard lock(mutex_);
  return load_session(household_id).entrants;
}

}  // namespace pantry::orchestrator
