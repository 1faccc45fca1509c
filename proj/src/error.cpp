#include "snodelab/error.hpp"

namespace snodelab {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::PoleAtLambda: return "PoleAtLambda";
    case ErrorKind::PoleAtZ: return "PoleAtZ";
    case ErrorKind::NotContractive: return "NotContractive";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::EvaluationFailure: return "EvaluationFailure";
    case ErrorKind::SingularDenominator: return "SingularDenominator";
    case ErrorKind::InvalidPair: return "InvalidPair";
    case ErrorKind::SingularResolvent: return "SingularResolvent";
    case ErrorKind::NotInUpperHalfPlane: return "NotInUpperHalfPlane";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorKind::ExtractionNotConverged: return "ExtractionNotConverged";
    case ErrorKind::Unsupported: return "Unsupported";
    case ErrorKind::SzegoViolated: return "SzegoViolated";
    case ErrorKind::SingularF: return "SingularF";
    case ErrorKind::SingularOnGrid: return "SingularOnGrid";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::BadInput: return "BadInput";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace snodelab
