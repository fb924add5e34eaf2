#pragma once

#include <stdexcept>
#include <string>

namespace covlab {

/// Raised when an operation would exceed its declared compute budget.
/// The message states the requested and allowed budget so callers can
/// re-issue with a coarser mesh or smaller N.
class BudgetError : public std::runtime_error {
public:
    explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised by config parsing; carries the JSON field path of the offending entry.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field_path, const std::string& what)
        : std::runtime_error(field_path + ": " + what), field(std::move(field_path)) {}
    std::string field;
};

}  // namespace covlab
