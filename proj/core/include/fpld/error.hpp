#pragma once

#include <stdexcept>
#include <string>

namespace fpld {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or inputs. `pointer()` is a JSON pointer when the
/// offending value came from a JSON document, empty otherwise.
class ValidationError : public Error {
public:
  explicit ValidationError(const std::string& what, std::string pointer = {})
      : Error(what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const noexcept { return pointer_; }

private:
  std::string pointer_;
};

/// A computation would exceed its configured enumeration/basis/sample budget.
class BudgetError : public Error {
public:
  using Error::Error;
};

/// A mathematically undefined query (zero mass atom, singular point, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

}  // namespace fpld
