#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "pantry/budget/budget.hpp"
#include "pantry/error.hpp"
#include "pantry/kb/io.hpp"
#include "pantry/kb/knowledge_base.hpp"
#include "pantry/sim/experiment.hpp"
#include "pantry/sim/households.hpp"
#include "pantry/sim/rng.hpp"
#include "pantry/sim/scenario.hpp"

using namespace pantry;
using namespace pantry::sim;

namespace {

const ExperimentData& data() {
  static const ExperimentData d = load_experiment_data(PANTRY_DATA_DIR);
  return d;
}

ScenarioConfig small(int households, int reps, int weeks) {
  ScenarioConfig c;
  c.name = "small";
  c.n_households = households;
  c.repetitions = reps;
  c.weeks = weeks;
  c.seed = 11;
  return c;
}

const WeekRecord* find(const ExperimentResult& r, const std::string& id, int rep, int week, Method m) {
  for (const auto& rec : r.records) {
    if (rec.household_id == id && rec.repetition == rep && rec.week == week && rec.method == m) return &rec;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("rng streams are reproducible and independent") {
  Rng a(5), b(5), c(6);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    CHECK(x == b.next());
    differs |= x != c.next();
  }
  CHECK(differs);
  // the first output of the documented construction, pinned so platforms agree
  Rng pinned(42);
  const auto first = pinned.next();
  CHECK(Rng(42).next() == first);

  auto s1 = Rng::stream(42, 3, 1), s2 = Rng::stream(42, 3, 1), s3 = Rng::stream(42, 3, 2), s4 = Rng::stream(42, 4, 1);
  const auto v = s1.next();
  CHECK(v == s2.next());
  CHECK(v != s3.next());
  CHECK(v != s4.next());
  CHECK(Rng::stream(42, 3, 1, 0).next() != Rng::stream(42, 3, 1, 1).next());
}

TEST_CASE("rng draws stay in range with the right frequencies") {
  Rng rng(2024);
  std::vector<int> counts(6, 0);
  int heads = 0;
  double sum = 0.0;
  const int n = 60000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    const double w = rng.uniform(-2.0, 3.0);
    REQUIRE(w >= -2.0);
    REQUIRE(w < 3.0);
    const int k = rng.uniform_int(1, 6);
    REQUIRE(k >= 1);
    REQUIRE(k <= 6);
    ++counts[k - 1];
    heads += rng.bernoulli(0.3);
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.02));
  CHECK(static_cast<double>(heads) / n == doctest::Approx(0.3).epsilon(0.03));
  // chi-square with 5 degrees of freedom; 20.5 is the 0.999 quantile
  double chi = 0.0;
  for (int c : counts) chi += std::pow(c - n / 6.0, 2) / (n / 6.0);
  CHECK(chi < 20.5);
  CHECK(Rng(1).uniform_int(4, 4) == 4);
  CHECK_FALSE(Rng(1).bernoulli(0.0));
  CHECK(Rng(1).bernoulli(1.0));
}

TEST_CASE("synthetic households respect the sampling strata") {
  const auto hs = generate_households(400, 42);
  REQUIRE(hs.size() == 400);
  CHECK(hs.front().id == "sim-0001");
  CHECK(hs.back().id == "sim-0400");
  std::set<int> sizes;
  for (const auto& h : hs) {
    CAPTURE(h.id);
    CHECK(h.monthly_income >= 5000.0);
    CHECK(h.monthly_income <= 15000.0);
    CHECK(h.fixed_expenses >= 0.40 * h.monthly_income - 5.0);
    CHECK(h.fixed_expenses <= 0.70 * h.monthly_income + 5.0);
    REQUIRE(h.food_share);
    CHECK(*h.food_share >= 0.15);
    CHECK(*h.food_share <= 0.25);
    const int size = static_cast<int>(h.members.size());
    CHECK(size >= 2);
    CHECK(size <= 6);
    sizes.insert(size);
    CHECK(h.members[0].sex == kb::Sex::male);
    CHECK(h.members[1].sex == kb::Sex::female);
    for (int k = 0; k < 2; ++k) {
      CHECK(h.members[k].age >= 25);
      CHECK(h.members[k].age <= 55);
    }
    for (std::size_t k = 2; k < h.members.size(); ++k) {
      const int age = h.members[k].age;
      CHECK(((age >= 1 && age <= 17) || (age >= 60 && age <= 80)));
    }
    for (const auto& m : h.members) {
      if (m.age < 40) {
        CHECK_FALSE(m.conditions.contains("hypertension"));
        CHECK_FALSE(m.conditions.contains("diabetes"));
      }
    }
    CHECK(h.preferred_items.empty());
    CHECK_NOTHROW(budget::weekly_budget(h));
  }
  CHECK(sizes == std::set<int>{2, 3, 4, 5, 6});
}

TEST_CASE("household generation is deterministic and prefix-stable") {
  const auto a = generate_households(50, 7, data().foods);
  const auto b = generate_households(50, 7, data().foods);
  CHECK(a == b);
  const auto prefix = generate_households(10, 7, data().foods);
  for (std::size_t i = 0; i < prefix.size(); ++i) CHECK(prefix[i] == a[i]);
  const auto other = generate_households(50, 8, data().foods);
  CHECK(other != a);
  CHECK_THROWS_AS(generate_households(0, 7), ContractViolation);
}

TEST_CASE("baskets draw from rule-compatible items and honour the check") {
  const auto hs = generate_households(60, 42, data().foods);
  for (const auto& h : hs) {
    const auto compatible = kb::compatible_items(data().foods, h.dietary_rules);
    std::set<std::string> ok;
    for (const auto& f : compatible) ok.insert(f.id);
    for (const auto& id : h.preferred_items) CHECK(ok.contains(id));
  }
  // a check that always fails leaves every household on the full compatible catalog
  int calls = 0;
  const auto rejected =
      generate_households(5, 42, data().foods, {}, [&](const kb::HouseholdProfile&) { return ++calls, false; });
  CHECK(calls == 5 * kBasketAttempts);
  for (const auto& h : rejected) CHECK(h.preferred_items.empty());
  // a check that accepts keeps the first draw
  const auto accepted = generate_households(5, 42, data().foods, {}, [](const kb::HouseholdProfile&) { return true; });
  for (std::size_t i = 0; i < accepted.size(); ++i) CHECK(accepted[i] == hs[i]);
}

TEST_CASE("shock series: item, category, compounding and persistence") {
  const std::vector<kb::FoodItem> catalog{testing::food("rice", "grain", {{"energy", 1}}),
                                          testing::food("oats", "grain", {{"energy", 1}}),
                                          testing::food("beans", "legume", {{"protein", 1}})};
  const std::map<std::string, double> base{{"rice", 1.0}, {"oats", 2.0}, {"beans", 4.0}};
  Rng rng(1);
  const std::vector<ShockSpec> shocks{{"rice", 0.20, 1}, {"grain", 0.10, 2}};
  const auto series = shock_series(base, shocks, 4, 0.0, catalog, rng);
  REQUIRE(series.size() == 4);
  CHECK(series[0] == base);
  CHECK(series[1].at("rice") == doctest::Approx(1.2).epsilon(1e-14));
  CHECK(series[1].at("oats") == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(series[2].at("rice") == doctest::Approx(1.32).epsilon(1e-14));
  CHECK(series[2].at("oats") == doctest::Approx(2.2).epsilon(1e-14));
  CHECK(series[3].at("rice") == doctest::Approx(1.32).epsilon(1e-14));
  CHECK(series[3].at("beans") == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("shock series: mixed moves every item by exactly the magnitude") {
  const auto& base = data().base_prices;
  Rng rng(3);
  const std::vector<ShockSpec> shocks{{"mixed", 0.20, 1}, {"mixed", 0.20, 2}};
  const auto series = shock_series(base, shocks, 3, 0.02, data().foods, rng);
  int up = 0, down = 0;
  for (const auto& [id, p] : base) {
    for (int w = 1; w <= 2; ++w) {
      const double ratio = series[w].at(id) / series[w - 1].at(id);
      CHECK(std::abs(std::abs(ratio - 1.0) - 0.20) < 1e-12);
      (ratio > 1.0 ? up : down)++;
    }
  }
  CHECK(up > 0);
  CHECK(down > 0);
}

TEST_CASE("shock series: jitter stays in its band around the level") {
  const auto& base = data().base_prices;
  Rng rng(9);
  const std::vector<ShockSpec> shocks{{"chicken_whole", 0.20, 1}};
  const auto series = shock_series(base, shocks, 5, 0.02, data().foods, rng);
  for (const auto& [id, p] : base) {
    CHECK(series[0].at(id) == p);
    for (int w = 1; w < 5; ++w) {
      if (id == "chicken_whole") {
        CHECK(series[w].at(id) == doctest::Approx(1.2 * p).epsilon(1e-14));
      } else {
        CHECK(std::abs(series[w].at(id) / p - 1.0) <= 0.02 + 1e-12);
      }
    }
  }
  Rng again(9);
  CHECK(shock_series(base, shocks, 5, 0.02, data().foods, again) == series);
  Rng zero(1);
  CHECK_THROWS_AS(shock_series(base, std::vector<ShockSpec>{{"chicken_whole", -1.0, 1}}, 3, 0.0, data().foods, zero),
                  ConfigError);
}

TEST_CASE("scenario configs are validated") {
  auto base = small(2, 1, 4);
  CHECK_NOTHROW(base.validate(data().foods));
  auto bad = [&](auto edit) {
    auto c = base;
    edit(c);
    return c;
  };
  CHECK_THROWS_AS(bad([](auto& c) { c.shocks = {{"rice_white", 0.5, 1}}; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](auto& c) { c.shocks = {{"rice_white", -0.31, 1}}; }).validate(), ConfigError);
  CHECK_NOTHROW(bad([](auto& c) { c.shocks = {{"rice_white", -0.30, 1}}; }).validate(data().foods));
  CHECK_THROWS_AS(bad([](auto& c) { c.shocks = {{"rice_white", 0.1, 4}}; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](auto& c) { c.shocks = {{"caviar", 0.1, 1}}; }).validate(data().foods), ConfigError);
  CHECK_NOTHROW(bad([](auto& c) { c.shocks = {{"caviar", 0.1, 1}}; }).validate());
  CHECK_THROWS_AS(bad([](auto& c) { c.tau = 0.0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](auto& c) { c.n_households = 0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](auto& c) { c.baselines.clear(); }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](auto& c) { c.jitter = 1.0; }).validate(), ConfigError);

  CHECK_THROWS_AS(scenario_from_json(kb::read_json_file(testing::fixture("scenario_bad.json").string())), ConfigError);
  CHECK_THROWS_AS(scenario_from_json(nlohmann::json::parse(R"({"baselines":["oracle"]})")), ConfigError);
  CHECK_THROWS_AS(scenario_from_json(nlohmann::json::parse(R"({"schema":2})")), ConfigError);
  CHECK_THROWS_AS(scenario_from_json(nlohmann::json::parse(R"({"weeks":"four"})")), ConfigError);
  CHECK_THROWS_AS(parse_method("oracle"), ConfigError);
  CHECK_THROWS_AS(parse_component("planner"), ConfigError);
}

TEST_CASE("scenario JSON round trip and defaults") {
  const auto d = default_scenario();
  CHECK(d.n_households == 100);
  CHECK(d.repetitions == 10);
  CHECK(d.weeks == 4);
  CHECK(d.tau == doctest::Approx(0.10));
  REQUIRE(d.shocks.size() == 3);
  for (int w = 1; w <= 3; ++w) CHECK(d.shocks[w - 1] == ShockSpec{"mixed", 0.20, w});
  CHECK(scenario_from_json(scenario_to_json(d)) == d);
  auto tiny = scenario_from_json(kb::read_json_file(testing::fixture("scenario_tiny.json").string()));
  CHECK(tiny.n_households == 4);
  CHECK(tiny.shocks == std::vector<ShockSpec>{{"chicken_whole", 0.2, 1}});
  CHECK(scenario_from_json(scenario_to_json(tiny)) == tiny);
  for (auto m : {Method::fixed_menu, Method::static_optimization, Method::agentic}) CHECK(parse_method(to_string(m)) == m);
  for (auto c : {Component::price_monitor, Component::health_personalizer, Component::preference_agent}) {
    CHECK(parse_component(to_string(c)) == c);
  }
}

TEST_CASE("without shocks or jitter the agentic system matches static re-optimization") {
  auto c = small(6, 1, 3);
  c.jitter = 0.0;
  ExperimentOptions opts;
  opts.threads = 2;
  const auto r = run_experiment(c, data(), opts);
  std::size_t compared = 0;
  for (const auto& rec : r.records) {
    if (rec.method != Method::agentic) continue;
    const auto* st = find(r, rec.household_id, rec.repetition, rec.week, Method::static_optimization);
    REQUIRE(st);
    CHECK(rec.feasible == st->feasible);
    CHECK_FALSE(rec.replanned);
    if (rec.feasible && st->feasible) {
      CHECK(rec.cost == doctest::Approx(st->cost).epsilon(1e-9));
      ++compared;
    }
  }
  CHECK(compared > 0);
  CHECK(r.dominance_violations == 0);
}

TEST_CASE("experiment records are consistent and deterministic across thread counts") {
  auto c = small(5, 2, 3);
  c.shocks = {{"mixed", 0.2, 1}};
  ExperimentOptions one, many;
  one.threads = 1;
  many.threads = 4;
  const auto a = run_experiment(c, data(), one);
  const auto b = run_experiment(c, data(), many);
  CHECK(records_jsonl(a.records) == records_jsonl(b.records));
  CHECK(metrics_csv(a.rows) == metrics_csv(b.rows));
  REQUIRE(a.records.size() == 5u * 2u * 3u * 3u);
  REQUIRE(a.rows.size() == 3);
  CHECK(a.rows[0].method == "fixed-menu");
  CHECK(a.rows[0].savings_pct == doctest::Approx(0.0));
  CHECK(a.rule_violations == 0);
  for (const auto& rec : a.records) {
    CAPTURE(rec.household_id);
    CHECK(rec.rule_violations == 0);
    if (rec.feasible) CHECK(rec.cost <= rec.budget * (1.0 + 1e-6) + 1e-9);
    if (rec.week == 1) CHECK(rec.shock_week);
    if (rec.week == 0) CHECK_FALSE(rec.shock_week);
    CHECK(rec.adequacy_pct >= 0.0);
    CHECK(rec.adequacy_pct <= 100.0 + 1e-9);
    if (rec.method == Method::fixed_menu && rec.week > 0 && rec.has_plan) {
      const auto* first = find(a, rec.household_id, rec.repetition, 0, Method::fixed_menu);
      REQUIRE(first);
      CHECK(rec.solved == first->solved);
      // the frozen week-0 menu: same item set, possibly scaled down
      for (const auto& [id, q] : rec.quantities) CHECK(first->quantities.contains(id));
    }
  }
  // another seed gives another run
  auto c2 = c;
  c2.seed = 12;
  CHECK(records_jsonl(run_experiment(c2, data(), many).records) != records_jsonl(a.records));
}

TEST_CASE("week records survive a JSON round trip") {
  auto c = small(2, 1, 2);
  c.shocks = {{"mixed", 0.2, 1}};
  const auto r = run_experiment(c, data());
  const auto text = records_jsonl(r.records);
  std::istringstream in(text);
  const auto back = load_records_jsonl(in);
  REQUIRE(back.size() == r.records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    const auto &x = r.records[i], &y = back[i];
    CHECK(y.household_id == x.household_id);
    CHECK(y.method == x.method);
    CHECK(y.week == x.week);
    CHECK(y.feasible == x.feasible);
    CHECK(y.cost == x.cost);
    CHECK(y.adequacy_pct == x.adequacy_pct);
    CHECK(y.quantities == x.quantities);
    CHECK(y.nutrient_pct == x.nutrient_pct);
    CHECK(record_to_json(y) == record_to_json(x));
  }
  CHECK(records_jsonl(back) == text);
}

TEST_CASE("outputs and plot data") {
  auto c = small(2, 1, 3);
  c.shocks = {{"mixed", 0.2, 2}};
  const auto r = run_experiment(c, data());
  testing::TempDir dir("sim");
  write_outputs(r, dir.path() / "out");
  for (const char* name : {"results.csv", "records.jsonl", "plot_data.json"}) {
    CHECK(std::filesystem::file_size(dir.path() / "out" / name) > 0);
  }
  std::ifstream csv(dir.path() / "out" / "results.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "method,mean_cost,sd_cost,savings_pct,adequacy_pct,replan_success,diversity");
  const auto plot = plot_data(r.records, r.rows);
  CHECK(plot.at("shock_weeks") == nlohmann::json::array({2}));
  for (const char* m : {"fixed-menu", "static-optimization", "agentic"}) {
    CHECK(plot.at("cost_by_week").at(m).size() == 3);
    CHECK(plot.at("adequacy_by_week").at(m).size() == 3);
  }
  CHECK(plot.at("metrics").size() == 3);
}

TEST_CASE("ablating the price monitor stops shock re-plans") {
  auto c = small(4, 1, 3);
  c.shocks = {{"mixed", 0.2, 1}, {"mixed", 0.2, 2}};
  c.baselines = {Method::agentic};
  const auto a = run_ablation(c, data(), Component::price_monitor);
  bool full_replanned = false;
  for (const auto& rec : a.full_run.records) full_replanned |= rec.replanned;
  CHECK(full_replanned);
  for (const auto& rec : a.ablated_run.records) {
    CHECK_FALSE(rec.replanned);
    CHECK(rec.variant == "no-price-monitor");
  }
  CHECK(a.full.method == "agentic");
  CHECK(a.ablated.method == "agentic-no-price-monitor");
  const auto csv = ablation_csv(a);
  CHECK(csv.find("vitamin_d_pct") != std::string::npos);
}
