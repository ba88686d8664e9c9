#include "pantry/kb/knowledge_base.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <set>

#include "pantry/error.hpp"
#include "pantry/kb/io.hpp"

namespace pantry::kb {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<FoodItem> compatible_items(std::span<const FoodItem> items, const std::set<std::string>& rules) {
  std::vector<FoodItem> out;
  for (const auto& item : items) {
    if (!item.available) continue;
    bool ok = std::includes(item.tags.begin(), item.tags.end(), rules.begin(), rules.end());
    if (ok) out.push_back(item);
  }
  return out;
}

KnowledgeBase::KnowledgeBase(fs::path root) : root_(std::move(root)) {
  fs::create_directories(*root_);
  load_from_root();
}

void KnowledgeBase::load_from_root() {
  const fs::path store = *root_ / "store.json";
  if (fs::exists(store)) {
    json doc = read_json_file(store.string());
    const json households = doc.value("households", json::object());
    for (const auto& [id, profile] : households.items()) {
      households_[id] = household_from_json(profile);
      households_[id].id = id;
    }
    const json sessions = doc.value("sessions", json::object());
    for (const auto& [id, state] : sessions.items()) sessions_[id] = state;
    next_household_ = doc.value("next_household", std::size_t{1});
  }
  const fs::path prices = *root_ / "prices.jsonl";
  if (fs::exists(prices)) {
    for (const auto& quote : load_prices_file(prices.string())) ingest_one(quote);
  }
  const fs::path plans = *root_ / "plans.jsonl";
  if (fs::exists(plans)) {
    std::ifstream in(plans);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty()) plans_.push_back(plan_record_from_json(json::parse(line)));
    }
  }
  const fs::path shocks = *root_ / "shocks.jsonl";
  if (fs::exists(shocks)) {
    std::ifstream in(shocks);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty()) shock_log_.push_back(json::parse(line));
    }
  }
}

void KnowledgeBase::persist_store_locked() const {
  if (!root_) return;
  json households = json::object();
  for (const auto& [id, profile] : households_) households[id] = household_to_json(profile);
  json sessions = json::object();
  for (const auto& [id, state] : sessions_) sessions[id] = state;
  json doc{{"schema", 1}, {"households", households}, {"sessions", sessions}, {"next_household", next_household_}};
  const fs::path tmp = *root_ / "store.json.tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << doc.dump(2) << '\n';
    if (!out) throw DataError("failed writing " + tmp.string());
  }
  fs::rename(tmp, *root_ / "store.json");
}

void KnowledgeBase::append_line_locked(const char* file, const std::string& line) const {
  if (!root_) return;
  std::ofstream out(*root_ / file, std::ios::app);
  out << line << '\n';
  if (!out) throw DataError(std::string("failed appending to ") + file);
}

void KnowledgeBase::set_foods(std::vector<FoodItem> foods) {
  std::unique_lock lock(mutex_);
  foods_ = std::make_shared<const std::vector<FoodItem>>(std::move(foods));
}

std::shared_ptr<const std::vector<FoodItem>> KnowledgeBase::foods() const {
  std::shared_lock lock(mutex_);
  return foods_;
}

std::optional<FoodItem> KnowledgeBase::food(std::string_view id) const {
  auto snapshot = foods();
  for (const auto& item : *snapshot) {
    if (item.id == id) return item;
  }
  return std::nullopt;
}

bool KnowledgeBase::ingest_one(const PriceQuote& quote) {
  auto& series = quotes_[quote.item_id][quote.vendor];
  auto pos = std::lower_bound(series.begin(), series.end(), quote.timestamp,
                              [](const PriceQuote& q, Timestamp t) { return q.timestamp < t; });
  if (pos != series.end() && pos->timestamp == quote.timestamp) {
    if (pos->price == quote.price) return false;
    pos->price = quote.price;
    return true;
  }
  series.insert(pos, quote);
  return true;
}

std::size_t KnowledgeBase::ingest_prices(std::span<const PriceQuote> quotes) {
  std::unique_lock lock(mutex_);
  std::size_t changed = 0;
  for (const auto& quote : quotes) {
    if (!(quote.price > 0.0)) throw DataError("price for '" + quote.item_id + "' must be > 0");
    if (ingest_one(quote)) {
      ++changed;
      append_line_locked("prices.jsonl", to_jsonl_line(quote));
    }
  }
  return changed;
}

std::map<std::string, PriceQuote> KnowledgeBase::latest_prices(Timestamp as_of,
                                                               std::span<const std::string> item_ids) const {
  std::shared_lock lock(mutex_);
  std::map<std::string, PriceQuote> out;
  std::vector<std::string> missing;
  for (const auto& id : item_ids) {
    const PriceQuote* best = nullptr;
    auto item = quotes_.find(id);
    if (item != quotes_.end()) {
      for (const auto& [vendor, series] : item->second) {
        auto it = std::upper_bound(series.begin(), series.end(), as_of,
                                   [](Timestamp t, const PriceQuote& q) { return t < q.timestamp; });
        if (it == series.begin()) continue;
        const PriceQuote& candidate = *std::prev(it);
        // vendors iterate in name order, so a strict comparison keeps the lexicographic tie-break
        if (best == nullptr || candidate.timestamp > best->timestamp ||
            (candidate.timestamp == best->timestamp && candidate.price < best->price)) {
          best = &candidate;
        }
      }
    }
    if (best == nullptr) missing.push_back(id);
    else out.emplace(id, *best);
  }
  if (!missing.empty()) throw MissingPriceError(std::move(missing));
  return out;
}

std::map<std::string, PriceQuote> KnowledgeBase::latest_prices(Timestamp as_of) const {
  std::set<std::string> ids;
  for (const auto& item : *foods()) ids.insert(item.id);
  {
    std::shared_lock lock(mutex_);
    for (const auto& entry : quotes_) ids.insert(entry.first);
  }
  const std::vector<std::string> all(ids.begin(), ids.end());
  return latest_prices(as_of, all);
}

std::vector<PriceQuote> KnowledgeBase::quotes(std::string_view item_id) const {
  std::shared_lock lock(mutex_);
  std::vector<PriceQuote> out;
  auto item = quotes_.find(std::string(item_id));
  if (item == quotes_.end()) return out;
  for (const auto& [vendor, series] : item->second) out.insert(out.end(), series.begin(), series.end());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
  return out;
}

std::optional<Timestamp> KnowledgeBase::latest_timestamp() const {
  std::shared_lock lock(mutex_);
  std::optional<Timestamp> latest;
  for (const auto& [item, vendors] : quotes_) {
    for (const auto& [vendor, series] : vendors) {
      if (!series.empty() && (!latest || series.back().timestamp > *latest)) latest = series.back().timestamp;
    }
  }
  return latest;
}

std::string KnowledgeBase::put_household(HouseholdProfile profile) {
  std::unique_lock lock(mutex_);
  if (profile.id.empty()) {
    do {
      profile.id = "hh-" + std::to_string(next_household_++);
    } while (households_.contains(profile.id));
  }
  std::string id = profile.id;
  households_[id] = std::move(profile);
  persist_store_locked();
  return id;
}

std::optional<HouseholdProfile> KnowledgeBase::household(std::string_view id) const {
  std::shared_lock lock(mutex_);
  auto it = households_.find(std::string(id));
  if (it == households_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> KnowledgeBase::household_ids() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, profile] : households_) ids.push_back(id);
  return ids;
}

void KnowledgeBase::put_session(const std::string& household_id, json state) {
  std::unique_lock lock(mutex_);
  sessions_[household_id] = std::move(state);
  persist_store_locked();
}

std::optional<json> KnowledgeBase::session(std::string_view household_id) const {
  std::shared_lock lock(mutex_);
  auto it = sessions_.find(std::string(household_id));
  if (it == sessions_.end()) return std::nullopt;
  return std::optional<nlohmann::json>(std::in_place, it->second);
}

void KnowledgeBase::append_plan(PlanRecord record) {
  std::unique_lock lock(mutex_);
  if (record.week_index < 0) throw ContractViolation("week_index must be >= 0");
  append_line_locked("plans.jsonl", plan_record_to_json(record).dump());
  plans_.push_back(std::move(record));
}

std::vector<PlanRecord> KnowledgeBase::history(std::string_view household_id) const {
  std::shared_lock lock(mutex_);
  std::vector<PlanRecord> out;
  for (const auto& record : plans_) {
    if (record.household_id == household_id) out.push_back(record);
  }
  return out;
}

void KnowledgeBase::append_shock_log(const json& entry) {
  std::unique_lock lock(mutex_);
  append_line_locked("shocks.jsonl", entry.dump());
  shock_log_.push_back(entry);
}

std::vector<json> KnowledgeBase::shock_log() const {
  std::shared_lock lock(mutex_);
  return shock_log_;
}

}  // namespace pantry::kb
