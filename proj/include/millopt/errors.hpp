#pragma once

#include <stdexcept>
#include <string>

namespace millopt {

/// Malformed or invalid plan input. The message names the offending key.
class LoadError : public std::runtime_error {
 public:
  explicit LoadError(const std::string& what) : std::runtime_error(what) {}
};

/// Argument outside the mathematical domain of a model function.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Caller broke a precondition (dimension mismatch, unevaluated individual, ...).
class ContractError : public std::logic_error {
 public:
  explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace millopt
