#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "pantry/budget/requirements.hpp"
#include "pantry/kb/types.hpp"

namespace pantry::testing {

std::filesystem::path fixture(const std::string& name);
std::filesystem::path data_file(const std::string& name);

/// Bundled requirement table and personalization rules.
const kb::RequirementTable& reference_table();
const std::vector<budget::PersonalizationRule>& reference_rules();
/// Bundled foods and the cheapest latest quote per item.
const std::vector<kb::FoodItem>& reference_foods();
const std::map<std::string, double>& reference_prices();

kb::FoodItem food(const std::string& id, const std::string& category, std::map<std::string, double> nutrients,
                  std::set<std::string> tags = {}, double pack_size = 1.0);

kb::HouseholdProfile case_study_household();

/// A fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace pantry::testing
