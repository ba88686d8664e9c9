#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "pantry/budget/budget.hpp"
#include "pantry/budget/requirements.hpp"
#include "pantry/diet/planner.hpp"
#include "pantry/error.hpp"
#include "pantry/kb/io.hpp"

using namespace pantry;
using testing::food;

namespace {

double rel_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

std::vector<kb::FoodItem> small_foods() { return kb::load_food_file(testing::fixture("foods_small.csv").string()); }

std::map<std::string, double> small_prices() {
  return {{"rice_white", 0.72}, {"lentils_red", 0.8}, {"chicken_whole", 1.4}};
}

// The small household's energy, protein and fiber floors without diversity rows: feasible.
struct SmallWorld {
  diet::DietModelConfig config;
  std::map<std::string, double> requirements;
};

SmallWorld small_world() {
  SmallWorld w;
  w.config.candidate_items = small_foods();
  w.config.diversity_cap.reset();
  const auto profile = kb::household_from_json(kb::read_json_file(testing::fixture("household_small.json").string()));
  const auto full = budget::household_requirements(profile, testing::reference_table(), testing::reference_rules());
  for (const char* n : {"energy", "protein", "fiber"}) w.requirements[n] = full.floors.at(n);
  return w;
}

diet::DietModelConfig two_nutrient_config() {
  diet::DietModelConfig c;
  c.candidate_items = {food("a", "grain", {{"energy", 300}, {"protein", 5}, {"sodium", 2}}),
                       food("b", "legume", {{"energy", 200}, {"protein", 20}, {"sodium", 10}}),
                       food("c", "protein", {{"energy", 150}, {"protein", 25}, {"sodium", 60}})};
  return c;
}

const std::map<std::string, double> abc_prices{{"a", 1.0}, {"b", 2.0}, {"c", 3.0}};

}  // namespace

TEST_CASE("small household model equals the hand-built golden matrix") {
  const auto golden = kb::read_json_file(testing::fixture("diet_small_golden.json").string());
  const auto profile = kb::household_from_json(kb::read_json_file(testing::fixture("household_small.json").string()));
  const auto req = budget::household_requirements(profile, testing::reference_table(), testing::reference_rules());
  const auto wb = budget::weekly_budget(profile);

  diet::DietModelConfig config;
  config.candidate_items = small_foods();
  config.adult_equivalents = diet::adult_equivalents(profile);
  config.upper_bound_nutrients = req.caps;
  const auto model = diet::build_model(config, req.floors, small_prices(), wb.amount);
  const auto& p = model.problem;

  CHECK(model.item_ids == golden.at("columns").get<std::vector<std::string>>());
  CHECK(p.objective == golden.at("objective").get<std::vector<double>>());
  REQUIRE(p.ge_constraints.size() == golden.at("ge").size());
  for (std::size_t i = 0; i < p.ge_constraints.size(); ++i) {
    const auto& row = golden.at("ge")[i];
    CAPTURE(i);
    CHECK(model.floor_nutrients[i] == row.at("nutrient").get<std::string>());
    CHECK(p.ge_constraints[i].coeffs == row.at("coeffs").get<std::vector<double>>());
    CHECK(p.ge_constraints[i].bound == doctest::Approx(row.at("bound").get<double>()).epsilon(1e-12));
  }
  REQUIRE(p.le_constraints.size() == golden.at("le").size());
  CHECK(model.budget_row == 0);
  CHECK(model.cap_nutrients == std::vector<std::string>{"sodium"});
  CHECK(model.first_diversity_row == 2);
  for (std::size_t i = 0; i < p.le_constraints.size(); ++i) {
    const auto& row = golden.at("le")[i];
    CAPTURE(row.at("row").get<std::string>());
    CHECK(p.le_constraints[i].coeffs == row.at("coeffs").get<std::vector<double>>());
    CHECK(p.le_constraints[i].bound == doctest::Approx(row.at("bound").get<double>()).epsilon(1e-12));
  }
}

TEST_CASE("model row counts follow the configuration") {
  auto config = two_nutrient_config();
  const std::map<std::string, double> req{{"energy", 1000}, {"protein", 50}};
  config.upper_bound_nutrients = {{"sodium", 300}};
  auto m = diet::build_model(config, req, abc_prices, 100.0);
  CHECK(m.problem.var_count == 3);
  CHECK(m.problem.ge_constraints.size() == 2);
  CHECK(m.problem.le_constraints.size() == 2 + 3);
  CHECK(m.problem.le_constraints[m.first_diversity_row].bound == doctest::Approx(0.25 * 40.0));

  config.upper_bound_nutrients.clear();
  m = diet::build_model(config, req, abc_prices, 100.0);
  CHECK(m.problem.le_constraints.size() == 1 + 3);

  config.diversity_cap.reset();
  m = diet::build_model(config, req, abc_prices, 100.0);
  CHECK(m.problem.le_constraints.size() == 1);
  CHECK(m.problem.le_constraints[m.budget_row].coeffs == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("model construction errors and warnings") {
  auto config = two_nutrient_config();
  CHECK_THROWS_AS(diet::build_model(config, {{"energy", 1000}}, {{"a", 1.0}, {"b", 2.0}}, 100.0), MissingPriceError);
  try {
    diet::build_model(config, {{"energy", 1000}}, {{"a", 1.0}}, 100.0);
    FAIL("expected MissingPriceError");
  } catch (const MissingPriceError& e) {
    CHECK(e.item_ids() == std::vector<std::string>{"b", "c"});
  }
  CHECK_THROWS_AS(diet::build_model(config, {{"energy", 0.0}}, abc_prices, 100.0), ContractViolation);
  CHECK_THROWS_AS(diet::build_model(config, {{"energy", -5.0}}, abc_prices, 100.0), ContractViolation);

  auto m = diet::build_model(config, {{"energy", 1000}, {"vitamin_d", 10}}, abc_prices, 100.0);
  REQUIRE(m.warnings.size() == 1);
  CHECK(m.warnings[0].find("vitamin_d") != std::string::npos);
}

TEST_CASE("one-food world buys exactly the binding amount") {
  diet::DietModelConfig config;
  config.candidate_items = {food("only", "grain", {{"energy", 100}, {"protein", 10}})};
  config.diversity_cap.reset();
  const std::map<std::string, double> req{{"energy", 250}, {"protein", 20}};
  auto plan = diet::plan(config, req, {{"only", 1.0}}, 1e6);
  CHECK(plan.quantity("only") == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(plan.total_cost == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(plan.adequacy.aggregate_pct == doctest::Approx(100.0));
  CHECK(plan.adequacy.violations.empty());
  CHECK(plan.prices_used == std::map<std::string, double>{{"only", 1.0}});
}

TEST_CASE("zero budget is budget-bound with the unconstrained optimum as minimum") {
  diet::DietModelConfig config;
  config.candidate_items = {food("only", "grain", {{"energy", 100}, {"protein", 10}})};
  config.diversity_cap.reset();
  try {
    diet::plan(config, {{"energy", 250}, {"protein", 20}}, {{"only", 1.0}}, 0.0);
    FAIL("expected InfeasiblePlanError");
  } catch (const diet::InfeasiblePlanError& e) {
    CHECK(e.diagnosis().kind == diet::InfeasibilityKind::budget_bound);
    REQUIRE(e.diagnosis().minimum_budget);
    CHECK(*e.diagnosis().minimum_budget == doctest::Approx(2.5).epsilon(1e-9));
    CHECK(e.diagnosis().unsatisfiable_nutrients.empty());
  }
}

TEST_CASE("a nutrient without any source is nutrient-bound; with a short budget it is mixed") {
  auto config = two_nutrient_config();
  config.diversity_cap.reset();
  const std::map<std::string, double> req{{"energy", 1000}, {"vitamin_d", 10}};
  try {
    diet::plan(config, req, abc_prices, 100.0);
    FAIL("expected InfeasiblePlanError");
  } catch (const diet::InfeasiblePlanError& e) {
    CHECK(e.diagnosis().kind == diet::InfeasibilityKind::nutrient_bound);
    CHECK(e.diagnosis().unsatisfiable_nutrients == std::vector<std::string>{"vitamin_d"});
  }
  try {
    diet::plan(config, req, abc_prices, 1.0);
    FAIL("expected InfeasiblePlanError");
  } catch (const diet::InfeasiblePlanError& e) {
    CHECK(e.diagnosis().kind == diet::InfeasibilityKind::mixed);
    CHECK(e.diagnosis().unsatisfiable_nutrients == std::vector<std::string>{"vitamin_d"});
    REQUIRE(e.diagnosis().minimum_budget);
    // cheapest energy is item a: 1000 / 300 units at price 1
    CHECK(*e.diagnosis().minimum_budget == doctest::Approx(1000.0 / 300.0).epsilon(1e-9));
  }
}

TEST_CASE("diagnosis refuses a feasible model") {
  auto config = two_nutrient_config();
  auto m = diet::build_model(config, {{"energy", 100}}, abc_prices, 100.0);
  CHECK_THROWS_AS(diet::diagnose_infeasibility(m), ContractViolation);
}

TEST_CASE("small foods plan cost equals the grid oracle") {
  auto w = small_world();
  const double budget = 400.0;
  auto model = diet::build_model(w.config, w.requirements, small_prices(), budget);
  std::vector<double> box;
  for (double p : model.prices) box.push_back(budget / p);
  testing::GridOptions grid;
  grid.coarse_step = 8.0;
  auto oracle = testing::grid_minimum(model.problem, box, grid);
  REQUIRE(oracle);
  auto plan = diet::plan(w.config, w.requirements, small_prices(), budget);
  CHECK(rel_gap(plan.total_cost, oracle->objective) <= 1e-4);
  CHECK(plan.total_cost >= oracle->lower_bound - 1e-9);
  // Frozen from the oracle run: energy and fiber bind, rice 28.118 and lentils 18.652 units.
  CHECK(oracle->objective == doctest::Approx(35.1668089).epsilon(1e-7));
  CHECK(plan.quantity("rice_white") == doctest::Approx(28.1178052).epsilon(1e-6));
  CHECK(plan.quantity("lentils_red") == doctest::Approx(18.6524864).epsilon(1e-6));
  CHECK(plan.adequacy.aggregate_pct == doctest::Approx(100.0));
}

TEST_CASE("budget at 90% of the minimum diet cost reports that minimum") {
  auto w = small_world();
  const double oracle_minimum = diet::plan(w.config, w.requirements, small_prices(), 1e9).total_cost;
  try {
    diet::plan(w.config, w.requirements, small_prices(), 0.9 * oracle_minimum);
    FAIL("expected InfeasiblePlanError");
  } catch (const diet::InfeasiblePlanError& e) {
    CHECK(e.diagnosis().kind == diet::InfeasibilityKind::budget_bound);
    REQUIRE(e.diagnosis().minimum_budget);
    CHECK(rel_gap(*e.diagnosis().minimum_budget, oracle_minimum) <= 1e-4);
  }
}

TEST_CASE("adequacy examples") {
  const std::vector<kb::FoodItem> items{food("a", "grain", {{"energy", 100}, {"protein", 10}})};
  const std::map<std::string, double> req{{"energy", 200}, {"protein", 40}};

  auto exact = diet::adequacy({{"a", 4.0}}, items, req);
  CHECK(exact.per_nutrient.at("energy") == doctest::Approx(2.0));
  CHECK(exact.per_nutrient.at("protein") == doctest::Approx(1.0));
  CHECK(exact.aggregate_pct == doctest::Approx(100.0));
  CHECK(exact.violations.empty());

  auto half = diet::adequacy({{"a", 1.0}}, items, {{"energy", 200}, {"protein", 20}});
  CHECK(half.aggregate_pct == doctest::Approx(50.0));

  auto none = diet::adequacy({}, items, req);
  CHECK(none.aggregate_pct == doctest::Approx(0.0));
  CHECK(none.violations.size() == 2);

  // over-supply of energy does not mask the protein gap; violations sort ascending by ratio
  auto mixed = diet::adequacy({{"a", 1.0}}, items, {{"energy", 50}, {"protein", 40}});
  CHECK(mixed.aggregate_pct == doctest::Approx(62.5));
  CHECK(mixed.violations == std::vector<std::string>{"protein"});
  auto two = diet::adequacy({{"a", 1.0}}, items, {{"energy", 300}, {"protein", 20}});
  CHECK(two.violations == std::vector<std::string>{"energy", "protein"});

  CHECK_THROWS_AS(diet::adequacy({}, items, {{"energy", 0.0}}), ContractViolation);
}

TEST_CASE("plan cost and nutrient totals") {
  const std::vector<kb::FoodItem> items{food("a", "g", {{"energy", 100}}), food("b", "g", {{"energy", 50}, {"iron", 2}})};
  auto totals = diet::nutrient_totals({{"a", 2.0}, {"b", 1.0}}, items);
  CHECK(totals.at("energy") == doctest::Approx(250.0));
  CHECK(totals.at("iron") == doctest::Approx(2.0));
  CHECK(diet::plan_cost({{"a", 2.0}, {"b", 1.0}}, {{"a", 1.5}, {"b", 4.0}}) == doctest::Approx(7.0));
  CHECK_THROWS_AS(diet::plan_cost({{"c", 1.0}}, {{"a", 1.5}}), MissingPriceError);
}

TEST_CASE("500 random diet LPs: every optimal plan satisfies floors, budget, caps and diversity") {
  std::mt19937_64 rng(31337);
  int solved = 0;
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    auto inst = testing::random_diet_instance(rng);
    CAPTURE(i);
    auto plan = diet::plan(inst.config, inst.requirements, inst.prices, inst.budget);
    ++solved;
    auto r = testing::residuals(inst, plan.quantities, plan.total_cost);
    worst = std::max(worst, r.worst());
    CHECK(r.worst() <= 1e-6);
    CHECK(plan.adequacy.aggregate_pct == doctest::Approx(100.0));
    // the witness is feasible, so the optimum is no dearer
    double witness_cost = 0.0;
    for (const auto& [id, x] : inst.witness) witness_cost += inst.prices.at(id) * x;
    CHECK(plan.total_cost <= witness_cost + 1e-7 * std::max(1.0, witness_cost));
  }
  CHECK(solved == 500);
  MESSAGE("worst residual " << worst);
}

TEST_CASE("optimal cost is non-increasing in budget and in requirement scale") {
  std::mt19937_64 rng(4242);
  for (int i = 0; i < 100; ++i) {
    auto inst = testing::random_diet_instance(rng, 3, 15);
    CAPTURE(i);
    double previous = std::numeric_limits<double>::infinity();
    for (double factor : {1.0, 1.1, 1.5, 3.0, 100.0}) {
      const double z = diet::plan(inst.config, inst.requirements, inst.prices, inst.budget * factor).total_cost;
      CHECK(z <= previous + 1e-9 * std::max(1.0, std::abs(z)));
      previous = z;
    }
    previous = std::numeric_limits<double>::infinity();
    for (double k : {1.0, 0.8, 0.5, 0.2, 0.01}) {
      auto scaled = inst.requirements;
      for (auto& [n, r] : scaled) r *= k;
      const double z = diet::plan(inst.config, scaled, inst.prices, inst.budget).total_cost;
      CHECK(z <= previous + 1e-9 * std::max(1.0, std::abs(z)));
      previous = z;
    }
  }
}

TEST_CASE("plan JSON carries the documented fields") {
  auto w = small_world();
  auto plan = diet::plan(w.config, w.requirements, small_prices(), 400.0);
  auto doc = kb::plan_to_json(plan);
  for (const char* key : {"quantities", "total_cost", "adequacy", "substitutions", "prices_used", "schema"}) {
    CHECK(doc.contains(key));
  }
  CHECK(kb::plan_from_json(doc) == plan);
}

TEST_CASE("adult-equivalent weights") {
  CHECK(diet::adult_equivalent(30) == doctest::Approx(1.0));
  CHECK(diet::adult_equivalent(5) < 1.0);
  auto profile = testing::case_study_household();
  double sum = 0.0;
  for (const auto& m : profile.members) sum += diet::adult_equivalent(m.age);
  CHECK(diet::adult_equivalents(profile) == doctest::Approx(sum));
}
