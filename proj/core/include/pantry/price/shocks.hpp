#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pantry/kb/types.hpp"

namespace pantry::price {

inline constexpr double kDefaultShockThreshold = 0.10;

struct ShockEvent {
  std::string item_id;
  double old_price = 0.0;
  double new_price = 0.0;
  double rel_change = 0.0;  // (new - old) / old
  kb::Timestamp timestamp = 0;

  bool operator==(const ShockEvent&) const = default;
};

struct ShockScan {
  std::vector<ShockEvent> events;          // |rel_change| descending, then item id
  std::vector<std::string> ignored_items;  // present only in the current map
};

/// Flags items whose relative change strictly exceeds `tau`. Changes within 1e-12 of the
/// threshold are treated as sitting on it (no event), so decimal prices like 1.10 -> 1.21
/// do not trip on rounding. Throws ContractViolation for tau <= 0, DataError for a
/// non-positive previous price.
ShockScan scan_prices(const std::map<std::string, double>& previous, const std::map<std::string, double>& current,
                      double tau, kb::Timestamp timestamp = 0);

std::vector<ShockEvent> detect_shocks(const std::map<std::string, double>& previous,
                                      const std::map<std::string, double>& current, double tau,
                                      kb::Timestamp timestamp = 0);

nlohmann::json shock_to_json(const ShockEvent& event);
ShockEvent shock_from_json(const nlohmann::json& doc);

}  // namespace pantry::price
