#include "pantry/kb/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "pantry/error.hpp"

namespace pantry::kb {

namespace {

using nlohmann::json;

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else if (c != '\r') {
      current.push_back(c);
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  return out + "\"";
}

double parse_number(const std::string& text, std::size_t row, const std::string& field) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ParseError("not a number: '" + text + "'", row, field);
  }
  return value;
}

std::set<std::string> split_tags(const std::string& text) {
  std::set<std::string> tags;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto bar = text.find('|', start);
    auto token = text.substr(start, bar == std::string::npos ? std::string::npos : bar - start);
    if (!token.empty()) tags.insert(token);
    if (bar == std::string::npos) break;
    start = bar + 1;
  }
  return tags;
}

void validate_item(const FoodItem& item, std::size_t row, const NutrientRegistry& nutrients,
                   const TagRegistry& tags) {
  if (item.id.empty()) throw ParseError("empty id", row, "id");
  if (!(item.pack_size > 0.0)) throw ParseError("pack_size must be > 0", row, "pack_size");
  for (const auto& tag : item.tags) {
    if (!tags.contains(tag)) throw RegistryError("row " + std::to_string(row) + ": unknown tag '" + tag + "'");
  }
  for (const auto& [id, amount] : item.nutrients) {
    if (!nutrients.contains(id)) throw RegistryError("row " + std::to_string(row) + ": unknown nutrient '" + id + "'");
    if (amount < 0.0) throw ParseError("nutrient amount must be >= 0", row, id);
  }
}

std::vector<FoodItem> load_csv(std::istream& source, const NutrientRegistry& nutrients, const TagRegistry& tags) {
  std::vector<FoodItem> items;
  std::string line;
  std::size_t row = 0;
  std::vector<std::string> header;
  while (std::getline(source, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (header.empty()) {
      header = split_csv_line(line);
      static const char* fixed[] = {"id", "name", "category", "pack_size", "tags"};
      if (header.size() < 5) throw ParseError("header needs id,name,category,pack_size,tags", row, "header");
      for (std::size_t i = 0; i < 5; ++i) {
        if (header[i] != fixed[i]) throw ParseError("expected column '" + std::string(fixed[i]) + "'", row, header[i]);
      }
      for (std::size_t i = 5; i < header.size(); ++i) {
        if (!nutrients.contains(header[i])) throw RegistryError("unknown nutrient column '" + header[i] + "'");
      }
      continue;
    }
    auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()),
                       row, "row");
    }
    FoodItem item;
    item.id = fields[0];
    item.name = fields[1];
    item.category = fields[2];
    item.pack_size = parse_number(fields[3], row, "pack_size");
    item.tags = split_tags(fields[4]);
    for (std::size_t i = 5; i < header.size(); ++i) {
      item.nutrients[header[i]] = parse_number(fields[i], row, header[i]);
    }
    validate_item(item, row, nutrients, tags);
    items.push_back(std::move(item));
  }
  return items;
}

template <typename T>
T required(const json& doc, const char* key, std::size_t row) {
  if (!doc.is_object() || !doc.contains(key)) throw ParseError("missing field", row, key);
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError("wrong type", row, key);
  }
}

std::vector<FoodItem> load_json(std::istream& source, const NutrientRegistry& nutrients, const TagRegistry& tags) {
  std::string text((std::istreambuf_iterator<char>(source)), std::istreambuf_iterator<char>());
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return {};
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), 0, "document");
  }
  if (!doc.is_array()) throw ParseError("expected a JSON array of items", 0, "document");
  std::vector<FoodItem> items;
  std::size_t row = 0;
  for (const auto& entry : doc) {
    ++row;
    FoodItem item;
    item.id = required<std::string>(entry, "id", row);
    item.name = required<std::string>(entry, "name", row);
    item.category = required<std::string>(entry, "category", row);
    item.pack_size = required<double>(entry, "pack_size", row);
    for (const auto& tag : required<std::vector<std::string>>(entry, "tags", row)) item.tags.insert(tag);
    item.nutrients = required<std::map<std::string, double>>(entry, "nutrients", row);
    item.available = entry.value("available", true);
    validate_item(item, row, nutrients, tags);
    items.push_back(std::move(item));
  }
  return items;
}

std::string format_double(double value) {
  std::ostringstream out;
  out.precision(17);
  out << value;
  return out.str();
}

PriceQuote quote_from_json_row(const json& doc, std::size_t row) {
  PriceQuote quote;
  quote.item_id = required<std::string>(doc, "item_id", row);
  quote.vendor = required<std::string>(doc, "vendor", row);
  quote.price = required<double>(doc, "price", row);
  quote.timestamp = required<Timestamp>(doc, "timestamp", row);
  if (!(quote.price > 0.0) || !std::isfinite(quote.price)) throw ParseError("price must be > 0", row, "price");
  if (quote.item_id.empty()) throw ParseError("empty item_id", row, "item_id");
  return quote;
}

}  // namespace

std::vector<FoodItem> load_food_db(std::istream& source, FoodFormat format, const NutrientRegistry& nutrients,
                                   const TagRegistry& tags) {
  auto items = format == FoodFormat::csv ? load_csv(source, nutrients, tags) : load_json(source, nutrients, tags);
  std::set<std::string> ids;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!ids.insert(items[i].id).second) throw ParseError("duplicate id '" + items[i].id + "'", i + 1, "id");
  }
  return items;
}

void write_food_db_csv(std::ostream& out, std::span<const FoodItem> items, const NutrientRegistry& nutrients) {
  out << "id,name,category,pack_size,tags";
  for (const auto& def : nutrients.all()) out << ',' << def.id;
  out << '\n';
  for (const auto& item : items) {
    std::string tags;
    for (const auto& tag : item.tags) {
      if (!tags.empty()) tags += '|';
      tags += tag;
    }
    out << csv_escape(item.id) << ',' << csv_escape(item.name) << ',' << csv_escape(item.category) << ','
        << format_double(item.pack_size) << ',' << tags;
    for (const auto& def : nutrients.all()) out << ',' << format_double(item.nutrient(def.id));
    out << '\n';
  }
}

std::vector<PriceQuote> load_prices_jsonl(std::istream& source) {
  std::vector<PriceQuote> quotes;
  std::string line;
  std::size_t row = 0;
  while (std::getline(source, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(e.what(), row, "line");
    }
    quotes.push_back(quote_from_json_row(doc, row));
  }
  return quotes;
}

std::vector<PriceQuote> parse_price_batch(std::string_view body) {
  auto first = body.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  if (body[first] == '[') {
    json doc;
    try {
      doc = json::parse(body);
    } catch (const json::parse_error& e) {
      throw ParseError(e.what(), 0, "document");
    }
    std::vector<PriceQuote> quotes;
    std::size_t row = 0;
    for (const auto& entry : doc) quotes.push_back(quote_from_json_row(entry, ++row));
    return quotes;
  }
  std::istringstream in{std::string(body)};
  return load_prices_jsonl(in);
}

std::string to_jsonl_line(const PriceQuote& quote) { return quote_to_json(quote).dump(); }

json quote_to_json(const PriceQuote& quote) {
  return json{{"item_id", quote.item_id}, {"vendor", quote.vendor}, {"price", quote.price}, {"timestamp", quote.timestamp}};
}

PriceQuote quote_from_json(const json& doc) { return quote_from_json_row(doc, 1); }

json food_to_json(const FoodItem& item) {
  return json{{"id", item.id},
              {"name", item.name},
              {"category", item.category},
              {"pack_size", item.pack_size},
              {"tags", item.tags},
              {"nutrients", item.nutrients},
              {"available", item.available}};
}

HouseholdProfile household_from_json(const json& doc, const TagRegistry& tags, const ConditionRegistry& conditions) {
  auto field = [&](const char* key) -> const json& {
    if (!doc.is_object() || !doc.contains(key)) throw ValidationError(key, "missing");
    return doc.at(key);
  };
  auto number = [&](const char* key) {
    const json& value = field(key);
    if (!value.is_number()) throw ValidationError(key, "must be a number");
    return value.get<double>();
  };
  if (doc.is_object() && doc.contains("schema") && doc.at("schema") != 1) {
    throw ValidationError("schema", "unsupported schema version");
  }
  HouseholdProfile profile;
  if (doc.is_object() && doc.contains("id")) profile.id = doc.at("id").get<std::string>();
  profile.monthly_income = number("monthly_income");
  profile.fixed_expenses = number("fixed_expenses");
  if (profile.monthly_income < 0.0) throw ValidationError("monthly_income", "must be >= 0");
  if (profile.fixed_expenses < 0.0) throw ValidationError("fixed_expenses", "must be >= 0");
  if (profile.fixed_expenses > profile.monthly_income) {
    throw ValidationError("fixed_expenses", "exceeds monthly_income");
  }
  if (doc.contains("food_share") && !doc.at("food_share").is_null()) {
    double share = number("food_share");
    if (!(share > 0.0 && share < 1.0)) throw ValidationError("food_share", "must be in (0, 1)");
    profile.food_share = share;
  }
  if (doc.contains("dietary_rules")) {
    for (const auto& rule : doc.at("dietary_rules")) {
      auto tag = rule.get<std::string>();
      if (!tags.contains(tag)) throw ValidationError("dietary_rules", "unknown rule '" + tag + "'");
      profile.dietary_rules.insert(tag);
    }
  }
  const json& members = field("members");
  if (!members.is_array() || members.empty()) throw ValidationError("members", "at least one member required");
  std::size_t index = 0;
  for (const auto& entry : members) {
    std::string prefix = "members[" + std::to_string(index++) + "]";
    if (!entry.is_object()) throw ValidationError(prefix, "must be an object");
    HouseholdMember member;
    if (!entry.contains("age") || !entry.at("age").is_number()) throw ValidationError(prefix + ".age", "must be a number");
    double age = entry.at("age").get<double>();
    if (age < 0.0) throw ValidationError(prefix + ".age", "must be >= 0");
    member.age = static_cast<int>(age);
    try {
      member.sex = parse_sex(entry.value("sex", std::string{}));
      member.activity_level = parse_activity(entry.value("activity_level", std::string("moderate")));
    } catch (const ValidationError& e) {
      throw ValidationError(prefix + "." + e.field(), e.what());
    }
    if (entry.contains("conditions")) {
      for (const auto& code : entry.at("conditions")) {
        auto text = code.get<std::string>();
        if (!conditions.contains(text)) throw ValidationError(prefix + ".conditions", "unknown condition '" + text + "'");
        member.conditions.insert(text);
      }
    }
    profile.members.push_back(std::move(member));
  }
  if (doc.contains("preferred_items")) profile.preferred_items = doc.at("preferred_items").get<std::vector<std::string>>();
  if (doc.contains("excluded_items")) {
    for (const auto& id : doc.at("excluded_items")) profile.excluded_items.insert(id.get<std::string>());
  }
  return profile;
}

json household_to_json(const HouseholdProfile& profile) {
  json members = json::array();
  for (const auto& m : profile.members) {
    members.push_back(json{{"age", m.age},
                           {"sex", to_string(m.sex)},
                           {"activity_level", to_string(m.activity_level)},
                           {"conditions", m.conditions}});
  }
  json doc{{"schema", 1},
           {"id", profile.id},
           {"monthly_income", profile.monthly_income},
           {"fixed_expenses", profile.fixed_expenses},
           {"dietary_rules", profile.dietary_rules},
           {"members", members},
           {"preferred_items", profile.preferred_items},
           {"excluded_items", profile.excluded_items}};
  doc["food_share"] = profile.food_share ? json(*profile.food_share) : json(nullptr);
  return doc;
}

RequirementTable requirement_table_from_json(const json& doc, const NutrientRegistry& nutrients) {
  RequirementTable table;
  if (doc.contains("activity_energy_multiplier")) {
    for (const auto& [level, mult] : doc.at("activity_energy_multiplier").items()) {
      table.activity_energy_multiplier[parse_activity(level)] = mult.get<double>();
    }
  }
  table.energy_nutrient = doc.value("energy_nutrient", std::string("energy"));
  if (doc.contains("member_upper_limits")) {
    table.member_upper_limits = doc.at("member_upper_limits").get<std::map<std::string, double>>();
  }
  const auto floors = nutrients.floor_ids();
  std::size_t row = 0;
  for (const auto& entry : doc.at("buckets")) {
    ++row;
    RequirementBucket bucket;
    bucket.age_min = entry.at("age_min").get<int>();
    bucket.age_max = entry.at("age_max").get<int>();
    bucket.sex = parse_sex(entry.at("sex").get<std::string>());
    bucket.weekly = entry.at("weekly").get<std::map<std::string, double>>();
    for (const auto& [id, value] : bucket.weekly) {
      if (!nutrients.contains(id)) throw RegistryError("bucket " + std::to_string(row) + ": unknown nutrient '" + id + "'");
      if (value < 0.0) throw ParseError("requirement must be >= 0", row, id);
    }
    for (const auto& id : floors) {
      if (!bucket.weekly.contains(id)) {
        throw TableCoverageError("bucket " + std::to_string(row) + " does not cover nutrient '" + id + "'");
      }
    }
    table.buckets.push_back(std::move(bucket));
  }
  return table;
}

json requirement_table_to_json(const RequirementTable& table) {
  json mult = json::object();
  for (const auto& [level, value] : table.activity_energy_multiplier) mult[std::string(to_string(level))] = value;
  json buckets = json::array();
  for (const auto& b : table.buckets) {
    buckets.push_back(json{{"age_min", b.age_min}, {"age_max", b.age_max}, {"sex", to_string(b.sex)}, {"weekly", b.weekly}});
  }
  return json{{"schema", 1},
              {"activity_energy_multiplier", mult},
              {"energy_nutrient", table.energy_nutrient},
              {"member_upper_limits", table.member_upper_limits},
              {"buckets", buckets}};
}

json plan_to_json(const diet::MealPlan& plan) {
  json subs = json::array();
  for (const auto& s : plan.substitutions) subs.push_back(json{{"removed", s.removed}, {"added", s.added}, {"reason", s.reason}});
  return json{{"schema", 1},
              {"quantities", plan.quantities},
              {"total_cost", plan.total_cost},
              {"adequacy",
               json{{"per_nutrient", plan.adequacy.per_nutrient},
                    {"aggregate_pct", plan.adequacy.aggregate_pct},
                    {"violations", plan.adequacy.violations}}},
              {"substitutions", subs},
              {"prices_used", plan.prices_used}};
}

diet::MealPlan plan_from_json(const json& doc) {
  diet::MealPlan plan;
  plan.quantities = doc.at("quantities").get<std::map<std::string, double>>();
  plan.total_cost = doc.at("total_cost").get<double>();
  const auto& adequacy = doc.at("adequacy");
  plan.adequacy.per_nutrient = adequacy.at("per_nutrient").get<std::map<std::string, double>>();
  plan.adequacy.aggregate_pct = adequacy.at("aggregate_pct").get<double>();
  plan.adequacy.violations = adequacy.at("violations").get<std::vector<std::string>>();
  for (const auto& s : doc.at("substitutions")) {
    plan.substitutions.push_back({s.at("removed").get<std::string>(), s.at("added").get<std::string>(),
                                  s.at("reason").get<std::string>()});
  }
  plan.prices_used = doc.at("prices_used").get<std::map<std::string, double>>();
  return plan;
}

json plan_record_to_json(const PlanRecord& record) {
  return json{{"plan", plan_to_json(record.plan)},
              {"household_id", record.household_id},
              {"week_index", record.week_index},
              {"trigger", to_string(record.trigger)},
              {"created_at", record.created_at}};
}

PlanRecord plan_record_from_json(const json& doc) {
  PlanRecord record;
  record.plan = plan_from_json(doc.at("plan"));
  record.household_id = doc.at("household_id").get<std::string>();
  record.week_index = doc.at("week_index").get<int>();
  record.trigger = parse_trigger(doc.at("trigger").get<std::string>());
  record.created_at = doc.at("created_at").get<Timestamp>();
  return record;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), 0, path);
  }
}

std::vector<FoodItem> load_food_file(const std::string& path, const NutrientRegistry& nutrients) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  bool is_json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
  return load_food_db(in, is_json ? FoodFormat::json : FoodFormat::csv, nutrients);
}

std::vector<PriceQuote> load_prices_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return load_prices_jsonl(in);
}

}  // namespace pantry::kb
