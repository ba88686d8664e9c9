#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pantry/kb/registry.hpp"
#include "pantry/kb/types.hpp"

namespace pantry::kb {

enum class FoodFormat { csv, json };

/// Reads a food table (`id,name,category,pack_size,tags,<nutrient-id>...` or a JSON array).
/// Throws ParseError naming the row and field, RegistryError for unknown tags or nutrients.
std::vector<FoodItem> load_food_db(std::istream& source, FoodFormat format,
                                   const NutrientRegistry& nutrients = NutrientRegistry::standard(),
                                   const TagRegistry& tags = TagRegistry::standard());

void write_food_db_csv(std::ostream& out, std::span<const FoodItem> items,
                       const NutrientRegistry& nutrients = NutrientRegistry::standard());

/// One `{item_id, vendor, price, timestamp}` object per line; blank lines skipped.
std::vector<PriceQuote> load_prices_jsonl(std::istream& source);

/// Accepts either JSONL or a single JSON array of quotes.
std::vector<PriceQuote> parse_price_batch(std::string_view body);

std::string to_jsonl_line(const PriceQuote& quote);

/// Validates against the closed tag/condition registries. Throws ValidationError naming the field.
HouseholdProfile household_from_json(const nlohmann::json& doc,
                                     const TagRegistry& tags = TagRegistry::standard(),
                                     const ConditionRegistry& conditions = ConditionRegistry::standard());
nlohmann::json household_to_json(const HouseholdProfile& profile);

RequirementTable requirement_table_from_json(const nlohmann::json& doc,
                                             const NutrientRegistry& nutrients = NutrientRegistry::standard());
nlohmann::json requirement_table_to_json(const RequirementTable& table);

nlohmann::json food_to_json(const FoodItem& item);
nlohmann::json quote_to_json(const PriceQuote& quote);
PriceQuote quote_from_json(const nlohmann::json& doc);

nlohmann::json plan_to_json(const diet::MealPlan& plan);
diet::MealPlan plan_from_json(const nlohmann::json& doc);

nlohmann::json plan_record_to_json(const PlanRecord& record);
PlanRecord plan_record_from_json(const nlohmann::json& doc);

nlohmann::json read_json_file(const std::string& path);
std::vector<FoodItem> load_food_file(const std::string& path,
                                     const NutrientRegistry& nutrients = NutrientRegistry::standard());
std::vector<PriceQuote> load_prices_file(const std::string& path);

}  // namespace pantry::kb
