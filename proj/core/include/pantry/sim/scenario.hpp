#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pantry/kb/types.hpp"
#include "pantry/sim/rng.hpp"

namespace pantry::sim {

enum class Method { fixed_menu, static_optimization, agentic };

std::string_view to_string(Method method);
Method parse_method(std::string_view text);

inline constexpr double kMaxShock = 0.30;

/// A relative price change applied from `week` onward. `target` is an item id, a category, or
/// "mixed" (every item, each moving up or down by |rel_change| with a seeded coin flip).
struct ShockSpec {
  std::string target;
  double rel_change = 0.0;
  int week = 1;

  bool operator==(const ShockSpec&) const = default;
};

struct ScenarioConfig {
  std::string name = "default";
  int n_households = 100;
  int repetitions = 10;
  std::uint64_t seed = 42;
  int weeks = 4;
  std::vector<ShockSpec> shocks;
  double tau = 0.10;
  double jitter = 0.02;  // +/- uniform noise on untargeted items, from week 1
  std::set<Method> baselines{Method::fixed_menu, Method::static_optimization, Method::agentic};

  /// Throws ConfigError. Targets are checked against `catalog` when it is nonempty.
  void validate(std::span<const kb::FoodItem> catalog = {}) const;

  bool operator==(const ScenarioConfig&) const = default;
};

ScenarioConfig scenario_from_json(const nlohmann::json& doc);
nlohmann::json scenario_to_json(const ScenarioConfig& config);

/// The default experiment: mixed +/-20% shocks in weeks 1-3 over four weeks.
ScenarioConfig default_scenario();

/// Per-week price maps, week 0 equal to `base`. Shocks compound and persist; jitter is drawn
/// fresh each week around the shocked price. Throws ConfigError when a price would reach <= 0.
std::vector<std::map<std::string, double>> shock_series(const std::map<std::string, double>& base,
                                                        std::span<const ShockSpec> shocks, int weeks, double jitter,
                                                        std::span<const kb::FoodItem> catalog, Rng& rng);

}  // namespace pantry::sim
