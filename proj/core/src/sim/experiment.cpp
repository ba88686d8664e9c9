#include "pantry/sim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "pantry/diet/planner.hpp"
#include "pantry/error.hpp"
#include "pantry/kb/io.hpp"
#include "pantry/kb/knowledge_base.hpp"
#include "pantry/kb/registry.hpp"

namespace pantry::sim {

namespace {

constexpr std::uint64_t kPricePurpose = 2;
constexpr kb::Timestamp kStart = 1735689600;  // 2025-01-01T00:00:00Z
constexpr kb::Timestamp kWeek = 7 * 24 * 3600;
constexpr double kDominanceTolerance = 1e-6;
constexpr const char* kVendor = "market";
// Headroom over the minimum budget so the cheapest adequate plan solves cleanly.
constexpr double kMinimumBudgetSlack = 1e-7;

const std::vector<Method> kMethodOrder{Method::fixed_menu, Method::static_optimization, Method::agentic};

struct Evaluation {
  double cost = 0.0;
  double adequacy_pct = 0.0;
  double vitamin_d_pct = 100.0;
  std::map<std::string, double> nutrient_pct;
};

double capped_pct(double ratio) {
  if (ratio >= 1.0 - diet::kAdequacyTolerance) return 100.0;
  return std::max(0.0, ratio) * 100.0;
}

// What a household gets from `q` at `prices`: when the basket costs more than the budget it can
// only buy the affordable fraction.
Evaluation evaluate(const std::map<std::string, double>& q, const std::map<std::string, double>& prices,
                    double budget, const std::map<std::string, double>& floors, std::span<const kb::FoodItem> foods) {
  Evaluation e;
  e.cost = diet::plan_cost(q, prices);
  const double afford = e.cost > budget ? budget / e.cost : 1.0;
  auto totals = diet::nutrient_totals(q, foods);
  double sum = 0.0;
  for (const auto& [n, r] : floors) {
    double pct = capped_pct(afford * totals[n] / r);
    e.nutrient_pct[n] = pct;
    sum += pct;
  }
  e.adequacy_pct = floors.empty() ? 100.0 : sum / static_cast<double>(floors.size());
  auto vd = e.nutrient_pct.find("vitamin_d");
  if (vd != e.nutrient_pct.end()) e.vitamin_d_pct = vd->second;
  return e;
}

std::vector<kb::PriceQuote> make_quotes(const std::map<std::string, double>& prices, kb::Timestamp ts) {
  std::vector<kb::PriceQuote> out;
  out.reserve(prices.size());
  for (const auto& [id, p] : prices) out.push_back({id, kVendor, p, ts});
  return out;
}

int count_violations(const std::map<std::string, double>& q, const std::set<std::string>& rules,
                     std::span<const kb::FoodItem> foods) {
  int bad = 0;
  for (const auto& [id, x] : q) {
    if (!(x > 0.0)) continue;
    auto it = std::find_if(foods.begin(), foods.end(), [&](const kb::FoodItem& f) { return f.id == id; });
    if (it == foods.end()) {
      ++bad;
      continue;
    }
    for (const auto& rule : rules) {
      if (!it->tags.contains(rule)) ++bad;
    }
  }
  return bad;
}

// One week's purchase: a solved plan, or when only the budget stands in the way, the cheapest
// adequate plan shrunk to fit the budget.
struct Purchase {
  std::map<std::string, double> quantities;
  bool solved = false;
};

std::optional<Purchase> scaled_purchase(const diet::InfeasibilityDiagnosis& d, const diet::DietModelConfig& config,
                                        const std::map<std::string, double>& floors,
                                        const std::map<std::string, double>& prices, double budget) {
  if (d.kind != diet::InfeasibilityKind::budget_bound || !d.minimum_budget || !(*d.minimum_budget > 0.0)) {
    return std::nullopt;
  }
  try {
    const double least = *d.minimum_budget * (1.0 + kMinimumBudgetSlack);
    auto q = diet::plan(config, floors, prices, least).quantities;
    const double scale = budget / diet::plan_cost(q, prices);
    if (scale < 1.0) {
      for (auto& [id, x] : q) x *= scale;
    }
    return Purchase{std::move(q), false};
  } catch (const diet::InfeasiblePlanError&) {
    return std::nullopt;
  }
}

std::optional<Purchase> purchase(const diet::DietModelConfig& config, const std::map<std::string, double>& floors,
                                 const std::map<std::string, double>& prices, double budget) {
  try {
    return Purchase{diet::plan(config, floors, prices, budget).quantities, true};
  } catch (const diet::InfeasiblePlanError& e) {
    return scaled_purchase(e.diagnosis(), config, floors, prices, budget);
  }
}

struct MethodState {
  std::optional<std::map<std::string, double>> last;  // last purchase, bought again when nothing else works
};

class HouseholdRun {
 public:
  HouseholdRun(const kb::HouseholdProfile& profile, std::size_t index, int rep, const ScenarioConfig& config,
               const ExperimentData& data, const ExperimentOptions& options)
      : profile_(profile), index_(index), rep_(rep), config_(config), data_(data), options_(options) {}

  std::vector<WeekRecord> run() {
    Rng rng = Rng::stream(config_.seed, index_, static_cast<std::uint64_t>(rep_), kPricePurpose);
    const auto series = shock_series(data_.base_prices, config_.shocks, config_.weeks, config_.jitter, data_.foods, rng);

    kb::KnowledgeBase store;
    store.set_foods(data_.foods);
    store.put_household(profile_);
    auto ocfg = options_.orchestrator;
    ocfg.tau = config_.tau;
    orchestrator::Orchestrator orch(store, data_.table, data_.rules, ocfg);

    const auto truth = budget::household_requirements(profile_, data_.table, data_.rules).floors;
    const auto inputs = orch.prepare(profile_);
    const double budget = inputs.budget.amount;

    std::set<std::string> checked_rules;
    const auto& tags = kb::TagRegistry::standard();
    for (const auto& rule : profile_.dietary_rules) {
      if (ocfg.preference_agent || tags.is_hard(rule)) checked_rules.insert(rule);
    }

    const bool want_fixed = config_.baselines.contains(Method::fixed_menu);
    const bool want_static = config_.baselines.contains(Method::static_optimization);
    const bool want_agentic = config_.baselines.contains(Method::agentic);

    std::optional<Purchase> frozen;
    std::map<Method, MethodState> state;
    std::vector<WeekRecord> out;

    for (int w = 0; w < config_.weeks; ++w) {
      const auto& prices = series[static_cast<std::size_t>(w)];
      const kb::Timestamp ts = kStart + w * kWeek;
      bool shock_week = std::any_of(config_.shocks.begin(), config_.shocks.end(),
                                    [&](const ShockSpec& s) { return s.week == w; });

      std::optional<Purchase> static_q;
      if (want_static || (want_fixed && w == 0)) {
        static_q = purchase(inputs.config, inputs.requirements.floors, prices, budget);
      }
      if (w == 0) frozen = static_q;

      if (want_fixed) {
        WeekRecord r = base_record(w, Method::fixed_menu, budget, shock_week);
        if (frozen) {
          fill(r, frozen->quantities, prices, budget, truth, checked_rules);
          r.solved = frozen->solved;
          r.feasible = frozen->solved && r.cost <= budget * (1.0 + 1e-12);
        }
        out.push_back(std::move(r));
      }
      if (want_static) {
        out.push_back(outcome(w, Method::static_optimization, static_q, state[Method::static_optimization], prices,
                              budget, truth, checked_rules, shock_week, false));
      }
      if (want_agentic) {
        std::optional<Purchase> agentic_q;
        bool replanned = false;
        try {
          const auto quotes = make_quotes(prices, ts);
          if (w > 0 && orch.active_plan(profile_.id)) {
            if (auto outcome = orch.ingest_prices_and_maybe_replan(profile_.id, quotes)) {
              agentic_q = Purchase{outcome->plan.quantities, true};
              replanned = true;
            }
          } else {
            store.ingest_prices(quotes);
          }
          if (!agentic_q) agentic_q = Purchase{orch.run_weekly_cycle(profile_.id, ts).plan.quantities, true};
        } catch (const diet::InfeasiblePlanError& e) {
          const auto current = orch.prepare(profile_, orch.entrants(profile_.id));
          agentic_q = scaled_purchase(e.diagnosis(), current.config, current.requirements.floors, prices, budget);
        }
        out.push_back(outcome(w, Method::agentic, agentic_q, state[Method::agentic], prices, budget, truth,
                              checked_rules, shock_week, replanned));
      }
    }
    return out;
  }

 private:
  WeekRecord base_record(int w, Method m, double budget, bool shock_week) const {
    WeekRecord r;
    r.household_id = profile_.id;
    r.repetition = rep_;
    r.week = w;
    r.method = m;
    r.variant = options_.variant;
    r.budget = budget;
    r.shock_week = shock_week;
    return r;
  }

  void fill(WeekRecord& r, const std::map<std::string, double>& q, const std::map<std::string, double>& prices,
            double budget, const std::map<std::string, double>& truth, const std::set<std::string>& rules) const {
    auto e = evaluate(q, prices, budget, truth, data_.foods);
    r.has_plan = true;
    r.cost = e.cost;
    r.adequacy_pct = e.adequacy_pct;
    r.vitamin_d_pct = e.vitamin_d_pct;
    r.nutrient_pct = std::move(e.nutrient_pct);
    r.quantities = q;
    r.distinct_items = static_cast<int>(std::count_if(q.begin(), q.end(), [](const auto& kv) { return kv.second > 0.0; }));
    r.rule_violations = count_violations(q, rules, data_.foods);
  }

  WeekRecord outcome(int w, Method m, const std::optional<Purchase>& q, MethodState& st,
                     const std::map<std::string, double>& prices, double budget,
                     const std::map<std::string, double>& truth, const std::set<std::string>& rules, bool shock_week,
                     bool replanned) const {
    WeekRecord r = base_record(w, m, budget, shock_week);
    r.replanned = replanned;
    if (q) {
      fill(r, q->quantities, prices, budget, truth, rules);
      r.solved = q->solved;
      r.feasible = q->solved;
      st.last = q->quantities;
    } else if (st.last) {
      fill(r, *st.last, prices, budget, truth, rules);
    }
    return r;
  }

  const kb::HouseholdProfile& profile_;
  std::size_t index_;
  int rep_;
  const ScenarioConfig& config_;
  const ExperimentData& data_;
  const ExperimentOptions& options_;
};

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// Metrics for one method over the given records; cost moments use only the comparable ones.
MetricsRow summarize(const std::string& name, const std::vector<const WeekRecord*>& recs,
                     const std::vector<const WeekRecord*>& costed) {
  MetricsRow row;
  row.method = name;
  std::vector<double> costs;
  for (const auto* r : costed) costs.push_back(r->cost);
  row.mean_cost = mean(costs);
  row.sd_cost = sample_sd(costs);
  row.cost_samples = costs.size();

  std::vector<double> adequacy, vitamin_d, diversity, shock_ok;
  for (const auto* r : recs) {
    adequacy.push_back(r->has_plan ? r->adequacy_pct : 0.0);
    vitamin_d.push_back(r->has_plan ? r->vitamin_d_pct : 0.0);
    if (r->feasible) diversity.push_back(static_cast<double>(r->distinct_items));
    if (r->shock_week) shock_ok.push_back(r->feasible ? 1.0 : 0.0);
  }
  row.adequacy_pct = mean(adequacy);
  row.vitamin_d_pct = mean(vitamin_d);
  row.diversity = mean(diversity);
  row.replan_success = shock_ok.empty() ? 1.0 : mean(shock_ok);
  return row;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string csv_line(const MetricsRow& r, bool vitamin_d) {
  std::string line = r.method + "," + fmt(r.mean_cost) + "," + fmt(r.sd_cost) + "," + fmt(r.savings_pct) + "," +
                     fmt(r.adequacy_pct) + "," + fmt(r.replan_success) + "," + fmt(r.diversity);
  if (vitamin_d) line += "," + fmt(r.vitamin_d_pct);
  return line + "\n";
}

}  // namespace

ExperimentData load_experiment_data(const std::filesystem::path& dir) {
  ExperimentData data;
  data.foods = kb::load_food_file((dir / "foods.csv").string());
  const auto quotes = kb::load_prices_file((dir / "prices.jsonl").string());
  kb::KnowledgeBase store;
  store.set_foods(data.foods);
  store.ingest_prices(quotes);
  auto latest = store.latest_timestamp();
  if (!latest) throw DataError("no price quotes in " + (dir / "prices.jsonl").string());
  try {
    for (const auto& [id, q] : store.latest_prices(*latest)) data.base_prices[id] = q.price;
  } catch (const MissingPriceError& e) {
    throw DataError(std::string("incomplete price data: ") + e.what());
  }
  data.table = kb::requirement_table_from_json(kb::read_json_file((dir / "requirements.json").string()));
  data.rules = budget::rules_from_json(kb::read_json_file((dir / "personalization_rules.json").string()));
  return data;
}

ExperimentResult run_experiment(const ScenarioConfig& config, const ExperimentData& data,
                                const ExperimentOptions& options) {
  config.validate(data.foods);
  // Baskets are drawn against the full system so every ablation arm sees the same households.
  kb::KnowledgeBase scratch;
  scratch.set_foods(data.foods);
  auto full = options.orchestrator;
  full.tau = config.tau;
  full.price_monitor = full.health_personalizer = full.preference_agent = true;
  const orchestrator::Orchestrator checker(scratch, data.table, data.rules, full);
  auto basket_ok = [&](const kb::HouseholdProfile& p) {
    const auto in = checker.prepare(p);
    try {
      diet::plan(in.config, in.requirements.floors, data.base_prices, in.budget.amount);
    } catch (const diet::InfeasiblePlanError& e) {
      return e.diagnosis().kind == diet::InfeasibilityKind::budget_bound;
    }
    return true;
  };
  const auto households = generate_households(static_cast<std::size_t>(config.n_households), config.seed, data.foods,
                                              options.sampling, basket_ok);

  const std::size_t tasks = households.size() * static_cast<std::size_t>(config.repetitions);
  std::vector<std::vector<WeekRecord>> slots(tasks);
  std::vector<std::exception_ptr> errors(tasks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks; t = next++) {
      const std::size_t h = t / static_cast<std::size_t>(config.repetitions);
      const int rep = static_cast<int>(t % static_cast<std::size_t>(config.repetitions));
      try {
        slots[t] = HouseholdRun(households[h], h, rep, config, data, options).run();
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  unsigned threads = options.threads != 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, tasks));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ExperimentResult result;
  result.config = config;
  for (auto& slot : slots) {
    for (auto& r : slot) result.records.push_back(std::move(r));
  }

  // Records of one household-week are contiguous, in method order.
  std::vector<const WeekRecord*> by_method[3];
  std::vector<const WeekRecord*> costed[3];
  for (std::size_t i = 0; i < result.records.size();) {
    std::size_t j = i;
    while (j < result.records.size() && result.records[j].household_id == result.records[i].household_id &&
           result.records[j].repetition == result.records[i].repetition &&
           result.records[j].week == result.records[i].week) {
      ++j;
    }
    bool comparable = true;
    const WeekRecord* fixed = nullptr;
    const WeekRecord* stat = nullptr;
    const WeekRecord* agent = nullptr;
    for (std::size_t k = i; k < j; ++k) {
      const auto& r = result.records[k];
      comparable &= r.method == Method::fixed_menu ? r.has_plan && r.solved : r.feasible;
      if (r.method == Method::fixed_menu) fixed = &r;
      if (r.method == Method::static_optimization) stat = &r;
      if (r.method == Method::agentic) agent = &r;
    }
    for (std::size_t k = i; k < j; ++k) {
      auto& r = result.records[k];
      r.comparable = comparable;
      const auto m = static_cast<std::size_t>(r.method);
      by_method[m].push_back(&r);
      if (comparable) costed[m].push_back(&r);
      result.rule_violations += static_cast<std::size_t>(r.rule_violations);
      if (!r.feasible) ++result.infeasible_weeks[std::string(to_string(r.method))];
      if (r.method == Method::agentic && r.feasible) {
        result.min_feasible_agentic_adequacy =
            std::min(result.min_feasible_agentic_adequacy.value_or(r.adequacy_pct), r.adequacy_pct);
      }
    }
    if (fixed && stat && agent && fixed->feasible && stat->feasible && agent->feasible) {
      ++result.dominance_checked;
      bool ok = agent->cost <= stat->cost + kDominanceTolerance * std::max(1.0, stat->cost) &&
                stat->cost <= fixed->cost + kDominanceTolerance * std::max(1.0, fixed->cost);
      if (!ok) ++result.dominance_violations;
    }
    i = j;
  }

  std::optional<double> fixed_mean;
  for (auto m : kMethodOrder) {
    if (!config.baselines.contains(m)) continue;
    const auto idx = static_cast<std::size_t>(m);
    auto row = summarize(std::string(to_string(m)), by_method[idx], costed[idx]);
    if (m == Method::fixed_menu) fixed_mean = row.mean_cost;
    if (fixed_mean && *fixed_mean > 0.0) row.savings_pct = (*fixed_mean - row.mean_cost) / *fixed_mean * 100.0;
    result.rows.push_back(row);
  }
  return result;
}

std::string_view to_string(Component component) {
  switch (component) {
    case Component::price_monitor: return "price-monitor";
    case Component::health_personalizer: return "health-personalizer";
    case Component::preference_agent: return "preference-agent";
  }
  return "unknown";
}

Component parse_component(std::string_view text) {
  if (text == "price-monitor") return Component::price_monitor;
  if (text == "health-personalizer") return Component::health_personalizer;
  if (text == "preference-agent") return Component::preference_agent;
  throw ConfigError("unknown component '" + std::string(text) + "'");
}

AblationResult run_ablation(const ScenarioConfig& config, const ExperimentData& data, Component disabled,
                            const ExperimentOptions& options) {
  AblationResult out;
  out.disabled = disabled;

  ScenarioConfig full_config = config;
  full_config.baselines.insert(Method::fixed_menu);
  full_config.baselines.insert(Method::agentic);
  out.full_run = run_experiment(full_config, data, options);

  ScenarioConfig ablated_config = config;
  ablated_config.baselines = {Method::agentic};
  ExperimentOptions ablated_options = options;
  ablated_options.variant = "no-" + std::string(to_string(disabled));
  switch (disabled) {
    case Component::price_monitor: ablated_options.orchestrator.price_monitor = false; break;
    case Component::health_personalizer: ablated_options.orchestrator.health_personalizer = false; break;
    case Component::preference_agent: ablated_options.orchestrator.preference_agent = false; break;
  }
  out.ablated_run = run_experiment(ablated_config, data, ablated_options);

  // Pair agentic weeks of both runs; both runs visit household-weeks in the same order.
  std::vector<const WeekRecord*> full_agentic, full_fixed;
  for (const auto& r : out.full_run.records) {
    if (r.method == Method::agentic) full_agentic.push_back(&r);
    if (r.method == Method::fixed_menu) full_fixed.push_back(&r);
  }
  std::vector<const WeekRecord*> ablated;
  for (const auto& r : out.ablated_run.records) ablated.push_back(&r);
  if (ablated.size() != full_agentic.size()) throw ContractViolation("ablation runs are not aligned");

  std::vector<const WeekRecord*> pf, pa, pfix;
  for (std::size_t i = 0; i < ablated.size(); ++i) {
    if (full_agentic[i]->feasible && ablated[i]->feasible && full_fixed[i]->solved) {
      pf.push_back(full_agentic[i]);
      pa.push_back(ablated[i]);
      pfix.push_back(full_fixed[i]);
    }
  }
  out.full = summarize("agentic", full_agentic, pf);
  out.ablated = summarize("agentic-" + ablated_options.variant, ablated, pa);
  auto fixed_row = summarize("fixed-menu", pfix, pfix);
  for (auto* row : {&out.full, &out.ablated}) {
    if (fixed_row.mean_cost > 0.0) row->savings_pct = (fixed_row.mean_cost - row->mean_cost) / fixed_row.mean_cost * 100.0;
  }
  // Nutrient and diversity comparisons use the paired weeks too.
  auto paired = [](MetricsRow& row, const std::vector<const WeekRecord*>& recs) {
    std::vector<double> a, v, d;
    for (const auto* r : recs) {
      a.push_back(r->adequacy_pct);
      v.push_back(r->vitamin_d_pct);
      d.push_back(static_cast<double>(r->distinct_items));
    }
    row.adequacy_pct = mean(a);
    row.vitamin_d_pct = mean(v);
    row.diversity = mean(d);
  };
  paired(out.full, pf);
  paired(out.ablated, pa);
  return out;
}

std::string metrics_csv(std::span<const MetricsRow> rows) {
  std::string out = "method,mean_cost,sd_cost,savings_pct,adequacy_pct,replan_success,diversity\n";
  for (const auto& r : rows) out += csv_line(r, false);
  return out;
}

std::string ablation_csv(const AblationResult& result) {
  std::string out = "method,mean_cost,sd_cost,savings_pct,adequacy_pct,replan_success,diversity,vitamin_d_pct\n";
  out += csv_line(result.full, true);
  out += csv_line(result.ablated, true);
  return out;
}

nlohmann::json record_to_json(const WeekRecord& r) {
  return {{"household_id", r.household_id},
          {"repetition", r.repetition},
          {"week", r.week},
          {"method", to_string(r.method)},
          {"variant", r.variant},
          {"feasible", r.feasible},
          {"has_plan", r.has_plan},
          {"solved", r.solved},
          {"comparable", r.comparable},
          {"cost", r.cost},
          {"budget", r.budget},
          {"adequacy_pct", r.adequacy_pct},
          {"vitamin_d_pct", r.vitamin_d_pct},
          {"nutrient_pct", r.nutrient_pct},
          {"distinct_items", r.distinct_items},
          {"shock_week", r.shock_week},
          {"replanned", r.replanned},
          {"rule_violations", r.rule_violations},
          {"quantities", r.quantities}};
}

WeekRecord record_from_json(const nlohmann::json& d) {
  WeekRecord r;
  r.household_id = d.at("household_id").get<std::string>();
  r.repetition = d.at("repetition").get<int>();
  r.week = d.at("week").get<int>();
  r.method = parse_method(d.at("method").get<std::string>());
  r.variant = d.value("variant", std::string{});
  r.feasible = d.at("feasible").get<bool>();
  r.has_plan = d.at("has_plan").get<bool>();
  r.solved = d.value("solved", r.feasible);
  r.comparable = d.at("comparable").get<bool>();
  r.cost = d.at("cost").get<double>();
  r.budget = d.at("budget").get<double>();
  r.adequacy_pct = d.at("adequacy_pct").get<double>();
  r.vitamin_d_pct = d.at("vitamin_d_pct").get<double>();
  r.nutrient_pct = d.at("nutrient_pct").get<std::map<std::string, double>>();
  r.distinct_items = d.at("distinct_items").get<int>();
  r.shock_week = d.at("shock_week").get<bool>();
  r.replanned = d.at("replanned").get<bool>();
  r.rule_violations = d.at("rule_violations").get<int>();
  r.quantities = d.at("quantities").get<std::map<std::string, double>>();
  return r;
}

std::string records_jsonl(std::span<const WeekRecord> records) {
  std::string out;
  for (const auto& r : records) out += record_to_json(r).dump() + "\n";
  return out;
}

std::vector<WeekRecord> load_records_jsonl(std::istream& in) {
  std::vector<WeekRecord> out;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw ParseError(e.what(), row, "record");
    }
  }
  return out;
}

nlohmann::json plot_data(std::span<const WeekRecord> records, std::span<const MetricsRow> rows) {
  struct Acc {
    std::map<int, std::vector<double>> cost_by_week;
    std::map<int, std::vector<double>> adequacy_by_week;
    std::map<std::string, std::vector<double>> nutrient;
  };
  std::map<std::string, Acc> acc;
  std::set<int> shock_weeks;
  for (const auto& r : records) {
    std::string key(to_string(r.method));
    if (!r.variant.empty()) key += "-" + r.variant;
    auto& a = acc[key];
    if (r.comparable) a.cost_by_week[r.week].push_back(r.cost);
    a.adequacy_by_week[r.week].push_back(r.has_plan ? r.adequacy_pct : 0.0);
    for (const auto& [n, pct] : r.nutrient_pct) a.nutrient[n].push_back(pct);
    if (r.shock_week) shock_weeks.insert(r.week);
  }
  nlohmann::json cost = nlohmann::json::object(), adequacy = nlohmann::json::object(),
                 nutrients = nlohmann::json::object();
  for (const auto& [method, a] : acc) {
    nlohmann::json c = nlohmann::json::array(), ad = nlohmann::json::array();
    for (const auto& [w, v] : a.adequacy_by_week) {
      auto it = a.cost_by_week.find(w);
      c.push_back({{"week", w}, {"mean_cost", it == a.cost_by_week.end() ? 0.0 : mean(it->second)},
                   {"sd_cost", it == a.cost_by_week.end() ? 0.0 : sample_sd(it->second)}});
      ad.push_back({{"week", w}, {"adequacy_pct", mean(v)}});
    }
    cost[method] = c;
    adequacy[method] = ad;
    nlohmann::json nut = nlohmann::json::object();
    for (const auto& [n, v] : a.nutrient) nut[n] = mean(v);
    nutrients[method] = nut;
  }
  nlohmann::json metrics = nlohmann::json::array();
  for (const auto& r : rows) {
    metrics.push_back({{"method", r.method},
                       {"mean_cost", r.mean_cost},
                       {"sd_cost", r.sd_cost},
                       {"savings_pct", r.savings_pct},
                       {"adequacy_pct", r.adequacy_pct},
                       {"replan_success", r.replan_success},
                       {"diversity", r.diversity}});
  }
  return {{"schema", 1},
          {"cost_by_week", cost},
          {"adequacy_by_week", adequacy},
          {"adequacy_by_nutrient", nutrients},
          {"shock_weeks", shock_weeks},
          {"metrics", metrics}};
}

void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const char* name, const std::string& text) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + (dir / name).string());
    out << text;
  };
  write("results.csv", metrics_csv(result.rows));
  write("records.jsonl", records_jsonl(result.records));
  write("plot_data.json", plot_data(result.records, result.rows).dump(2) + "\n");
}

}  // namespace pantry::sim
