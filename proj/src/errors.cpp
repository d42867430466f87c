#include "gssdecon/errors.hpp"

namespace gssd {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::UnsupportedOrder: return "unsupported-order";
    case ErrorKind::DivisionDegeneracy: return "division-degeneracy";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::PhaseUndefined: return "phase-undefined";
    case ErrorKind::QuadratureFailure: return "quadrature-failure";
    case ErrorKind::TailUndefined: return "tail-undefined";
    case ErrorKind::EstimationFailure: return "estimation-failure";
    case ErrorKind::NegativeSignalVariance: return "negative-signal-variance";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

}  // namespace gssd
