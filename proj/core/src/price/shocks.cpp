#include "pantry/price/shocks.hpp"

#include <algorithm>
#include <cmath>

#include "pantry/error.hpp"

namespace pantry::price {

namespace {
constexpr double kThresholdGuard = 1e-12;
}

ShockScan scan_prices(const std::map<std::string, double>& previous, const std::map<std::string, double>& current,
                      double tau, kb::Timestamp timestamp) {
  if (!(tau > 0.0)) throw ContractViolation("shock threshold must be > 0");
  ShockScan scan;
  for (const auto& [id, new_price] : current) {
    auto prev = previous.find(id);
    if (prev == previous.end()) {
      scan.ignored_items.push_back(id);
      continue;
    }
    if (!(prev->second > 0.0)) throw DataError("previous price for '" + id + "' must be > 0");
    const double rel = (new_price - prev->second) / prev->second;
    if (std::abs(rel) > tau + kThresholdGuard) {
      scan.events.push_back({id, prev->second, new_price, rel, timestamp});
    }
  }
  std::sort(scan.events.begin(), scan.events.end(), [](const ShockEvent& a, const ShockEvent& b) {
    double ma = std::abs(a.rel_change);
    double mb = std::abs(b.rel_change);
    if (ma != mb) return ma > mb;
    return a.item_id < b.item_id;
  });
  return scan;
}

std::vector<ShockEvent> detect_shocks(const std::map<std::string, double>& previous,
                                      const std::map<std::string, double>& current, double tau,
                                      kb::Timestamp timestamp) {
  return scan_prices(previous, current, tau, timestamp).events;
}

nlohmann::json shock_to_json(const ShockEvent& event) {
  return {{"item_id", event.item_id},
          {"old_price", event.old_price},
          {"new_price", event.new_price},
          {"rel_change", event.rel_change},
          {"timestamp", event.timestamp}};
}

ShockEvent shock_from_json(const nlohmann::json& doc) {
  return {doc.at("item_id").get<std::string>(), doc.at("old_price").get<double>(), doc.at("new_price").get<double>(),
          doc.at("rel_change").get<double>(), doc.at("timestamp").get<kb::Timestamp>()};
}

}  // namespace pantry::price
