#pragma once

#include <stdexcept>
#include <string>

namespace dcx {

/// A distribution or model parameter lies outside its domain.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An operation was called with inputs that violate its precondition.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed text in a law/generator specification or config file.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File-system or serialization failure.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dcx
