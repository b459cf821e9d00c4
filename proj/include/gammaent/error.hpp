#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gammaent {

/// Failure categories shared by every module. The CLI maps them onto
/// structured JSON errors, so the names are part of the output contract.
enum class ErrorKind {
  Domain,       // argument outside a function's domain
  Overflow,     // result not representable as a finite double
  Degenerate,   // sample has fewer than two distinct values
  Size,         // sample too small for the requested operation
  Convergence,  // iterative solver exhausted its budget
  Quadrature,   // integral could not be brought to tolerance
  Config,       // invalid configuration value or key
  Parse,        // malformed input text
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gammaent
