#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pantry/kb/types.hpp"

namespace pantry::kb {

/// Items carrying every tag in `rules` and marked available, in input order.
std::vector<FoodItem> compatible_items(std::span<const FoodItem> items, const std::set<std::string>& rules);

/// Shared store of foods, price quotes, households, session state and plan history.
///
/// Reads take a shared lock; every write is serialized behind a unique lock.
/// When constructed with a root directory the store persists to:
///   store.json    households, session state (rewritten atomically on each write)
///   prices.jsonl  ingested quotes (append-only)
///   plans.jsonl   PlanRecords (append-only)
///   shocks.jsonl  shock audit log (append-only)
class KnowledgeBase {
 public:
  KnowledgeBase() = default;
  explicit KnowledgeBase(std::filesystem::path root);

  KnowledgeBase(const KnowledgeBase&) = delete;
  KnowledgeBase& operator=(const KnowledgeBase&) = delete;

  const std::optional<std::filesystem::path>& root() const { return root_; }

  void set_foods(std::vector<FoodItem> foods);
  std::shared_ptr<const std::vector<FoodItem>> foods() const;
  std::optional<FoodItem> food(std::string_view id) const;

  /// Returns the number of quotes that changed the store. Re-ingesting an identical
  /// (item, vendor, timestamp, price) quote is a no-op.
  std::size_t ingest_prices(std::span<const PriceQuote> quotes);

  /// Latest quote at or before `as_of` per item; cheapest vendor wins at equal timestamps,
  /// then vendor name. Throws MissingPriceError listing every uncovered item.
  std::map<std::string, PriceQuote> latest_prices(Timestamp as_of, std::span<const std::string> item_ids) const;
  /// Same, over every catalog item plus every item that has ever been quoted.
  std::map<std::string, PriceQuote> latest_prices(Timestamp as_of) const;

  std::vector<PriceQuote> quotes(std::string_view item_id) const;
  std::optional<Timestamp> latest_timestamp() const;

  /// Inserts or replaces; assigns an id ("hh-N") when the profile has none.
  std::string put_household(HouseholdProfile profile);
  std::optional<HouseholdProfile> household(std::string_view id) const;
  std::vector<std::string> household_ids() const;

  void put_session(const std::string& household_id, nlohmann::json state);
  std::optional<nlohmann::json> session(std::string_view household_id) const;

  void append_plan(PlanRecord record);
  std::vector<PlanRecord> history(std::string_view household_id) const;

  void append_shock_log(const nlohmann::json& entry);
  std::vector<nlohmann::json> shock_log() const;

 private:
  bool ingest_one(const PriceQuote& quote);
  void persist_store_locked() const;
  void append_line_locked(const char* file, const std::string& line) const;
  void load_from_root();

  mutable std::shared_mutex mutex_;
  std::optional<std::filesystem::path> root_;
  std::shared_ptr<const std::vector<FoodItem>> foods_ = std::make_shared<const std::vector<FoodItem>>();
  // item -> vendor -> quotes sorted by timestamp
  std::map<std::string, std::map<std::string, std::vector<PriceQuote>>> quotes_;
  std::map<std::string, HouseholdProfile> households_;
  std::map<std::string, nlohmann::json> sessions_;
  std::vector<PlanRecord> plans_;
  std::vector<nlohmann::json> shock_log_;
  std::size_t next_household_ = 1;
};

}  // namespace pantry::kb
