#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pantry {

/// Base class for recoverable failures surfaced to callers (bad input, infeasible plans, ...).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Broken caller contract: dimension mismatches, calling an operation outside its precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row, std::string field)
      : Error("row " + std::to_string(row) + ", field '" + field + "': " + what),
        row_(row),
        field_(std::move(field)) {}

  std::size_t row() const noexcept { return row_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t row_;
  std::string field_;
};

class RegistryError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  ValidationError(const std::string& field, const std::string& what)
      : Error(field + ": " + what), field_(field) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class MissingPriceError : public Error {
 public:
  explicit MissingPriceError(std::vector<std::string> item_ids)
      : Error(build_message(item_ids)), item_ids_(std::move(item_ids)) {}

  const std::vector<std::string>& item_ids() const noexcept { return item_ids_; }

 private:
  static std::string build_message(const std::vector<std::string>& ids) {
    std::string msg = "no price quote for:";
    for (const auto& id : ids) msg += " " + id;
    return msg;
  }

  std::vector<std::string> item_ids_;
};

class BudgetError : public Error {
 public:
  using Error::Error;
};

class TableCoverageError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

/// Simplex exceeded its iteration cap. Distinct from infeasibility.
class SolverStalledError : public Error {
 public:
  using Error::Error;
};

}  // namespace pantry
