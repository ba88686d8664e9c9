#include "fixtures.hpp"

#include <atomic>
#include <unistd.h>

#include "pantry/kb/io.hpp"
#include "pantry/kb/knowledge_base.hpp"

namespace pantry::testing {

std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(PANTRY_FIXTURE_DIR) / name; }
std::filesystem::path data_file(const std::string& name) { return std::filesystem::path(PANTRY_DATA_DIR) / name; }

const kb::RequirementTable& reference_table() {
  static const auto table = kb::requirement_table_from_json(kb::read_json_file(data_file("requirements.json")));
  return table;
}

const std::vector<budget::PersonalizationRule>& reference_rules() {
  static const auto rules = budget::rules_from_json(kb::read_json_file(data_file("personalization_rules.json")));
  return rules;
}

const std::vector<kb::FoodItem>& reference_foods() {
  static const auto foods = kb::load_food_file(data_file("foods.csv"));
  return foods;
}

const std::map<std::string, double>& reference_prices() {
  static const auto prices = [] {
    kb::KnowledgeBase store;
    store.set_foods(reference_foods());
    store.ingest_prices(kb::load_prices_file(data_file("prices.jsonl")));
    std::map<std::string, double> out;
    for (const auto& [id, q] : store.latest_prices(*store.latest_timestamp())) out[id] = q.price;
    return out;
  }();
  return prices;
}

kb::FoodItem food(const std::string& id, const std::string& category, std::map<std::string, double> nutrients,
                  std::set<std::string> tags, double pack_size) {
  kb::FoodItem f;
  f.id = id;
  f.name = id;
  f.category = category;
  f.nutrients = std::move(nutrients);
  f.tags = std::move(tags);
  f.pack_size = pack_size;
  return f;
}

kb::HouseholdProfile case_study_household() {
  return kb::household_from_json(kb::read_json_file(data_file("household.json")));
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("pantry-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace pantry::testing
