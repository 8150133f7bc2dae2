#pragma once

#include <stdexcept>
#include <string>

namespace imcdse {

/// Malformed input document (wrong type, missing field, unknown key).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed document whose contents break a domain invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A precondition the caller was responsible for was not met
/// (e.g. estimating latency on an infeasible mapping).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class InitializationExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SpaceTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace imcdse
