#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tropical {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structurally invalid model (dimension mismatch, zero coefficient, ...).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Malformed model text. `position` is the byte offset reported by the JSON reader.
class ParseError : public ModelError {
 public:
  ParseError(const std::string& what, std::size_t position)
      : ModelError(what), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Evaluation outside the domain of a field: nonpositive state, vanishing
/// denominator, empty Dom argument.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Violations of the equilibration preconditions (single-signed equation,
/// rational system passed to the linear-feasibility path, branch cap exceeded).
class EquilibrationError : public Error {
 public:
  using Error::Error;
};

class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace tropical
