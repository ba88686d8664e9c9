// pantry: weekly meal planning against a food budget, from the command line.

#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pantry/budget/requirements.hpp"
#include "pantry/error.hpp"
#include "pantry/kb/io.hpp"
#include "pantry/kb/knowledge_base.hpp"
#include "pantry/orchestrator/http_service.hpp"
#include "pantry/orchestrator/orchestrator.hpp"
#include "pantry/sim/experiment.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pantry;

namespace {

struct Reference {
  kb::RequirementTable table;
  std::vector<budget::PersonalizationRule> rules;
};

Reference load_reference(const fs::path& dir) {
  return {kb::requirement_table_from_json(kb::read_json_file((dir / "requirements.json").string())),
          budget::rules_from_json(kb::read_json_file((dir / "personalization_rules.json").string()))};
}

std::unique_ptr<kb::KnowledgeBase> open_store() {
  if (const char* root = std::getenv("PANTRY_DATA_DIR"); root != nullptr && *root != '\0') {
    return std::make_unique<kb::KnowledgeBase>(fs::path(root));
  }
  return std::make_unique<kb::KnowledgeBase>();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  std::ofstream out(target, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

json budget_json(const budget::WeeklyBudget& b) {
  return {{"amount", b.amount}, {"food_share", b.food_share}, {"monthly_income", b.monthly_income},
          {"fixed_expenses", b.fixed_expenses}, {"disposable", b.disposable}, {"clamped", b.clamped}};
}

void print_rows(std::span<const sim::MetricsRow> rows) {
  std::cout << sim::metrics_csv(rows);
}

orchestrator::HttpService* g_service = nullptr;

void on_signal(int) {
  if (g_service != nullptr) g_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Budget-aware weekly meal planner"};
  app.require_subcommand(1);

  std::string data_dir = PANTRY_DEFAULT_DATA_DIR;
  app.add_option("--data", data_dir, "Directory with requirements.json and personalization_rules.json")
      ->capture_default_str();

  // plan
  auto* plan_cmd = app.add_subcommand("plan", "Plan one week for a household");
  std::string household_file, foods_file, prices_file, plan_out = "-";
  std::optional<long long> as_of;
  plan_cmd->add_option("--household", household_file, "Household profile JSON")->required()->check(CLI::ExistingFile);
  plan_cmd->add_option("--foods", foods_file, "Food table (CSV or JSON)")->required()->check(CLI::ExistingFile);
  plan_cmd->add_option("--prices", prices_file, "Price quotes (JSONL)")->required()->check(CLI::ExistingFile);
  plan_cmd->add_option("--out", plan_out, "Output file, '-' for stdout");
  plan_cmd->add_option("--as-of", as_of, "Price timestamp (epoch seconds); default latest quote");

  // ingest-prices
  auto* ingest_cmd = app.add_subcommand("ingest-prices", "Store quotes and re-plan households hit by shocks");
  std::string ingest_file, ingest_foods;
  ingest_cmd->add_option("file", ingest_file, "Quotes (JSONL or JSON array)")->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--foods", ingest_foods, "Food table; default <data>/foods.csv");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Run the synthetic household experiment");
  std::string config_file, sim_out = "results";
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  sim_cmd->add_option("--config", config_file, "Scenario JSON; default scenario when omitted")->check(CLI::ExistingFile);
  sim_cmd->add_option("--seed", seed, "Override the scenario seed");
  sim_cmd->add_option("--out", sim_out, "Output directory")->capture_default_str();
  sim_cmd->add_option("--threads", threads, "Worker threads, 0 for all cores");

  // ablate
  auto* ablate_cmd = app.add_subcommand("ablate", "Compare the full system with one component disabled");
  std::string disable, ablate_out = "ablation";
  ablate_cmd->add_option("--disable", disable, "Component to disable")
      ->required()
      ->check(CLI::IsMember({"price-monitor", "health-personalizer", "preference-agent"}));
  ablate_cmd->add_option("--config", config_file, "Scenario JSON")->check(CLI::ExistingFile);
  ablate_cmd->add_option("--seed", seed, "Override the scenario seed");
  ablate_cmd->add_option("--out", ablate_out, "Output directory")->capture_default_str();
  ablate_cmd->add_option("--threads", threads, "Worker threads, 0 for all cores");

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP API");
  int port = 8080;
  std::string serve_foods, serve_prices, plot_file, host = "127.0.0.1";
  serve_cmd->add_option("--port", port, "Port, 0 picks a free one")->capture_default_str();
  serve_cmd->add_option("--host", host, "Bind address")->capture_default_str();
  serve_cmd->add_option("--foods", serve_foods, "Food table; default <data>/foods.csv");
  serve_cmd->add_option("--prices", serve_prices, "Quotes to load at startup")->check(CLI::ExistingFile);
  serve_cmd->add_option("--plot-data", plot_file, "plot_data.json served at /plot-data");

  // plot
  auto* plot_cmd = app.add_subcommand("plot", "Rebuild chart data from simulation records");
  std::string records_file, plot_out = "-";
  plot_cmd->add_option("--records", records_file, "records.jsonl from simulate")->required()->check(CLI::ExistingFile);
  plot_cmd->add_option("--out", plot_out, "Output file, '-' for stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    const fs::path data(data_dir);
    auto scenario = [&] {
      sim::ScenarioConfig c = config_file.empty() ? sim::default_scenario()
                                                  : sim::scenario_from_json(kb::read_json_file(config_file));
      if (seed) c.seed = *seed;
      return c;
    };

    if (plan_cmd->parsed()) {
      auto ref = load_reference(data);
      auto store = open_store();
      store->set_foods(kb::load_food_file(foods_file));
      store->ingest_prices(kb::load_prices_file(prices_file));
      auto id = store->put_household(kb::household_from_json(kb::read_json_file(household_file)));
      orchestrator::Orchestrator orch(*store, ref.table, ref.rules);
      auto ts = as_of ? *as_of : store->latest_timestamp().value_or(0);
      try {
        auto cycle = orch.run_weekly_cycle(id, ts);
        json out{{"schema", 1},
                 {"household_id", id},
                 {"plan", kb::plan_to_json(cycle.plan)},
                 {"shopping_list", orchestrator::shopping_list_to_json(cycle.shopping)},
                 {"explanation", orchestrator::explanation_to_json(cycle.explanation)},
                 {"weekly_budget", budget_json(cycle.budget)}};
        write_text(plan_out, out.dump(2) + "\n");
      } catch (const orchestrator::CycleInfeasibleError& e) {
        std::cerr << "pantry: " << e.what() << "\n";
        for (const auto& entry : e.explanation().entries) std::cerr << "  " << entry.agent << ": " << entry.decision << "\n";
        return 3;
      }
      return 0;
    }

    if (ingest_cmd->parsed()) {
      auto ref = load_reference(data);
      auto store = open_store();
      store->set_foods(kb::load_food_file(ingest_foods.empty() ? (data / "foods.csv").string() : ingest_foods));
      orchestrator::Orchestrator orch(*store, ref.table, ref.rules);
      auto quotes = kb::load_prices_file(ingest_file);
      auto report = orch.ingest_prices(quotes);
      std::cout << json{{"stored", report.stored}, {"replanned", report.replanned}, {"failed", report.failed}}.dump(2)
                << "\n";
      return report.failed.empty() ? 0 : 3;
    }

    if (sim_cmd->parsed()) {
      auto config = scenario();
      auto exp_data = sim::load_experiment_data(data);
      sim::ExperimentOptions options;
      options.threads = threads;
      auto start = std::chrono::steady_clock::now();
      auto result = sim::run_experiment(config, exp_data, options);
      sim::write_outputs(result, sim_out);
      double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      print_rows(result.rows);
      std::cerr << "households=" << config.n_households << " repetitions=" << config.repetitions
                << " dominance_violations=" << result.dominance_violations << "/" << result.dominance_checked
                << " rule_violations=" << result.rule_violations << " seconds=" << secs << "\n";
      return 0;
    }

    if (ablate_cmd->parsed()) {
      auto config = scenario();
      auto exp_data = sim::load_experiment_data(data);
      sim::ExperimentOptions options;
      options.threads = threads;
      auto result = sim::run_ablation(config, exp_data, sim::parse_component(disable), options);
      fs::create_directories(ablate_out);
      write_text((fs::path(ablate_out) / "ablation.csv").string(), sim::ablation_csv(result));
      sim::write_outputs(result.full_run, fs::path(ablate_out) / "full");
      sim::write_outputs(result.ablated_run, fs::path(ablate_out) / ("no-" + disable));
      std::cout << sim::ablation_csv(result);
      return 0;
    }

    if (serve_cmd->parsed()) {
      auto ref = load_reference(data);
      auto store = open_store();
      store->set_foods(kb::load_food_file(serve_foods.empty() ? (data / "foods.csv").string() : serve_foods));
      if (!serve_prices.empty()) store->ingest_prices(kb::load_prices_file(serve_prices));
      orchestrator::Orchestrator orch(*store, ref.table, ref.rules);
      orchestrator::ServiceOptions options;
      options.host = host;
      if (!plot_file.empty()) options.plot_data = plot_file;
      orchestrator::HttpService service(orch, *store, options);
      int bound = service.bind(port);
      if (bound < 0) {
        std::cerr << "pantry: cannot bind " << host << ":" << port << "\n";
        return 1;
      }
      g_service = &service;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on http://" << host << ":" << bound << "\n";
      service.serve();
      g_service = nullptr;
      return 0;
    }

    if (plot_cmd->parsed()) {
      std::ifstream in(records_file);
      auto records = sim::load_records_jsonl(in);
      write_text(plot_out, sim::plot_data(records).dump(2) + "\n");
      return 0;
    }
  } catch (const ValidationError& e) {
    std::cerr << "pantry: invalid " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "pantry: " << e.what() << "\n";
    return 3;
  } catch (const ContractViolation& e) {
    std::cerr << "pantry: internal error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
