#pragma once

#include <stdexcept>
#include <string>

namespace gssd {

enum class ErrorKind {
  UnsupportedOrder,
  DivisionDegeneracy,
  InsufficientData,
  PhaseUndefined,
  QuadratureFailure,
  TailUndefined,
  EstimationFailure,
  NegativeSignalVariance,
  Domain,
  Parse,
  Config,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a kind so callers (the CLI in
/// particular) can map it onto an exit code without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gssd
