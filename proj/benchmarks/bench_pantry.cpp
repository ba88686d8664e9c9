#include <random>

#include <benchmark/benchmark.h>

#include "pantry/budget/requirements.hpp"
#include "pantry/diet/planner.hpp"
#include "pantry/kb/io.hpp"
#include "pantry/kb/knowledge_base.hpp"
#include "pantry/lp/simplex.hpp"
#include "pantry/orchestrator/orchestrator.hpp"
#include "pantry/price/replan.hpp"
#include "pantry/price/shocks.hpp"
#include "pantry/price/substitution.hpp"
#include "pantry/sim/experiment.hpp"

using namespace pantry;

namespace {

const sim::ExperimentData& data() {
  static const sim::ExperimentData d = sim::load_experiment_data(PANTRY_DATA_DIR);
  return d;
}

const kb::HouseholdProfile& case_study() {
  static const kb::HouseholdProfile p =
      kb::household_from_json(kb::read_json_file(std::string(PANTRY_DATA_DIR) + "/household.json"));
  return p;
}

// Diet-shaped LP: nonnegative nutrient floors met by x = 1, a loose budget row, caps at 50.
lp::LpProblem random_diet_lp(std::size_t vars, std::size_t floors, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coeff(0.0, 10.0), price(0.5, 5.0);
  lp::LpProblem p;
  p.var_count = vars;
  for (std::size_t j = 0; j < vars; ++j) p.objective.push_back(price(rng));
  for (std::size_t i = 0; i < floors; ++i) {
    lp::LinearRow row;
    double at_one = 0.0;
    for (std::size_t j = 0; j < vars; ++j) {
      row.coeffs.push_back(coeff(rng));
      at_one += row.coeffs.back();
    }
    row.bound = 0.6 * at_one;
    p.ge_constraints.push_back(std::move(row));
  }
  lp::LinearRow budget{p.objective, 0.0};
  for (double c : p.objective) budget.bound += 2.0 * c;
  p.le_constraints.push_back(std::move(budget));
  p.var_upper_bounds.assign(vars, 50.0);
  return p;
}

struct CaseStudyInputs {
  kb::KnowledgeBase store;
  orchestrator::PlanInputs inputs;
  price::SubstitutionGraph graph;

  CaseStudyInputs() {
    store.set_foods(data().foods);
    orchestrator::Orchestrator orch(store, data().table, data().rules);
    inputs = orch.prepare(case_study());
    graph = price::build_substitution_graph(data().foods, price::kDefaultMinSimilarity, inputs.requirements.floors);
  }
};

const CaseStudyInputs& inputs() {
  static const CaseStudyInputs c;
  return c;
}

void BM_Simplex(benchmark::State& state) {
  const auto vars = static_cast<std::size_t>(state.range(0));
  const auto p = random_diet_lp(vars, 9, 17);
  for (auto _ : state) benchmark::DoNotOptimize(lp::solve(p));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Simplex)->RangeMultiplier(2)->Range(8, 128)->Complexity();

void BM_PlanCaseStudy(benchmark::State& state) {
  const auto& c = inputs();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        diet::plan(c.inputs.config, c.inputs.requirements.floors, data().base_prices, c.inputs.budget.amount));
  }
}
BENCHMARK(BM_PlanCaseStudy)->Unit(benchmark::kMicrosecond);

void BM_BuildSubstitutionGraph(benchmark::State& state) {
  const auto& floors = inputs().inputs.requirements.floors;
  for (auto _ : state) {
    benchmark::DoNotOptimize(price::build_substitution_graph(data().foods, price::kDefaultMinSimilarity, floors));
  }
}
BENCHMARK(BM_BuildSubstitutionGraph)->Unit(benchmark::kMicrosecond);

void BM_DetectShocks(benchmark::State& state) {
  std::map<std::string, double> moved = data().base_prices;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> step(-0.25, 0.25);
  for (auto& [id, p] : moved) p *= 1.0 + step(rng);
  for (auto _ : state) benchmark::DoNotOptimize(price::detect_shocks(data().base_prices, moved, 0.10));
}
BENCHMARK(BM_DetectShocks);

void BM_ReplanOnShock(benchmark::State& state) {
  const auto& c = inputs();
  price::PlanningContext context;
  context.config = c.inputs.config;
  context.requirements = c.inputs.requirements.floors;
  context.budget = c.inputs.budget.amount;
  context.catalog = data().foods;
  context.graph = &c.graph;
  context.rules = c.inputs.rules;
  context.prices = data().base_prices;
  const auto current = diet::plan(context.config, context.requirements, context.prices, context.budget);
  // +25% on the largest line of the current basket
  std::string top;
  double spend = -1.0;
  for (const auto& [id, q] : current.quantities) {
    if (q * context.prices.at(id) > spend) {
      spend = q * context.prices.at(id);
      top = id;
    }
  }
  auto moved = context.prices;
  moved.at(top) *= 1.25;
  const auto events = price::detect_shocks(context.prices, moved, 0.10);
  context.prices = moved;
  for (auto _ : state) benchmark::DoNotOptimize(price::replan_on_shock(current, events, context));
}
BENCHMARK(BM_ReplanOnShock)->Unit(benchmark::kMicrosecond);

void BM_ExperimentSmall(benchmark::State& state) {
  auto config = sim::default_scenario();
  config.n_households = static_cast<int>(state.range(0));
  config.repetitions = 1;
  sim::ExperimentOptions options;
  options.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(sim::run_experiment(config, data(), options));
}
BENCHMARK(BM_ExperimentSmall)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
