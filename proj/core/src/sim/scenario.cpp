#include "pantry/sim/scenario.hpp"

#include <cmath>

#include "pantry/error.hpp"

namespace pantry::sim {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::fixed_menu: return "fixed-menu";
    case Method::static_optimization: return "static-optimization";
    case Method::agentic: return "agentic";
  }
  return "unknown";
}

Method parse_method(std::string_view text) {
  if (text == "fixed-menu") return Method::fixed_menu;
  if (text == "static-optimization") return Method::static_optimization;
  if (text == "agentic") return Method::agentic;
  throw ConfigError("unknown method '" + std::string(text) + "'");
}

void ScenarioConfig::validate(std::span<const kb::FoodItem> catalog) const {
  if (n_households < 1) throw ConfigError("n_households must be >= 1");
  if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
  if (weeks < 1) throw ConfigError("weeks must be >= 1");
  if (!(tau > 0.0)) throw ConfigError("tau must be > 0");
  if (!(jitter >= 0.0 && jitter < 1.0)) throw ConfigError("jitter must be in [0, 1)");
  if (baselines.empty()) throw ConfigError("at least one baseline required");
  for (const auto& s : shocks) {
    if (!(std::abs(s.rel_change) <= kMaxShock)) {
      throw ConfigError("shock on '" + s.target + "' exceeds +/-30%");
    }
    if (s.week < 0 || s.week >= weeks) throw ConfigError("shock week out of range for '" + s.target + "'");
    if (s.target.empty()) throw ConfigError("shock target must not be empty");
    if (s.target == "mixed" || catalog.empty()) continue;
    bool known = false;
    for (const auto& item : catalog) {
      if (item.id == s.target || item.category == s.target) {
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError("shock target '" + s.target + "' is neither an item nor a category");
  }
}

ScenarioConfig scenario_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("scenario must be a JSON object");
  if (doc.contains("schema") && doc.at("schema") != 1) throw ConfigError("unsupported scenario schema");
  ScenarioConfig c;
  try {
    c.name = doc.value("name", c.name);
    c.n_households = doc.value("n_households", c.n_households);
    c.repetitions = doc.value("repetitions", c.repetitions);
    c.seed = doc.value("seed", c.seed);
    c.weeks = doc.value("weeks", c.weeks);
    c.tau = doc.value("tau", c.tau);
    c.jitter = doc.value("jitter", c.jitter);
    if (doc.contains("shocks")) {
      for (const auto& s : doc.at("shocks")) {
        c.shocks.push_back({s.at("target").get<std::string>(), s.at("rel_change").get<double>(), s.value("week", 1)});
      }
    }
    if (doc.contains("baselines")) {
      c.baselines.clear();
      for (const auto& m : doc.at("baselines")) c.baselines.insert(parse_method(m.get<std::string>()));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad scenario: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json scenario_to_json(const ScenarioConfig& c) {
  nlohmann::json shocks = nlohmann::json::array();
  for (const auto& s : c.shocks) shocks.push_back({{"target", s.target}, {"rel_change", s.rel_change}, {"week", s.week}});
  nlohmann::json baselines = nlohmann::json::array();
  for (auto m : c.baselines) baselines.push_back(to_string(m));
  return {{"schema", 1},           {"name", c.name},   {"n_households", c.n_households},
          {"repetitions", c.repetitions}, {"seed", c.seed}, {"weeks", c.weeks},
          {"tau", c.tau},          {"jitter", c.jitter}, {"shocks", shocks},
          {"baselines", baselines}};
}

ScenarioConfig default_scenario() {
  ScenarioConfig c;
  c.shocks = {{"mixed", 0.20, 1}, {"mixed", 0.20, 2}, {"mixed", 0.20, 3}};
  return c;
}

std::vector<std::map<std::string, double>> shock_series(const std::map<std::string, double>& base,
                                                        std::span<const ShockSpec> shocks, int weeks, double jitter,
                                                        std::span<const kb::FoodItem> catalog, Rng& rng) {
  if (weeks < 1) throw ConfigError("weeks must be >= 1");
  std::map<std::string, std::string> category;
  for (const auto& item : catalog) category[item.id] = item.category;

  std::vector<std::map<std::string, double>> series;
  series.reserve(static_cast<std::size_t>(weeks));
  std::map<std::string, double> level = base;  // compounded shocks, no jitter
  std::set<std::string> targeted;
  for (int w = 0; w < weeks; ++w) {
    for (const auto& s : shocks) {
      if (s.week != w) continue;
      for (auto& [id, price] : level) {
        double rel = 0.0;
        if (s.target == "mixed") {
          rel = rng.bernoulli(0.5) ? s.rel_change : -s.rel_change;
        } else if (id == s.target || category[id] == s.target) {
          rel = s.rel_change;
        } else {
          continue;
        }
        targeted.insert(id);
        price *= 1.0 + rel;
        if (!(price > 0.0)) throw ConfigError("shock drives price of '" + id + "' to <= 0");
      }
    }
    auto week = level;
    if (w > 0 && jitter > 0.0) {
      for (auto& [id, price] : week) {
        double noise = rng.uniform(-jitter, jitter);
        if (targeted.contains(id)) continue;
        price *= 1.0 + noise;
        if (!(price > 0.0)) throw ConfigError("jitter drives price of '" + id + "' to <= 0");
      }
    }
    series.push_back(std::move(week));
  }
  return series;
}

}  // namespace pantry::sim
