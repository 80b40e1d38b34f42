#include "socopf/errors.hpp"

namespace socopf {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingMatrix: return "MissingMatrix";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::UnsupportedCostModel: return "UnsupportedCostModel";
    case ErrorCode::CaseFileNotFound: return "CaseFileNotFound";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::NonpositiveReactance: return "NonpositiveReactance";
    case ErrorCode::EmptyNetwork: return "EmptyNetwork";
    case ErrorCode::InvalidNetwork: return "InvalidNetwork";
    case ErrorCode::AsymmetricAngleBounds: return "AsymmetricAngleBounds";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NumericalLimit: return "NumericalLimit";
    case ErrorCode::IterationLimit: return "IterationLimit";
    case ErrorCode::TightenInfeasible: return "TightenInfeasible";
    case ErrorCode::NoFeasiblePoint: return "NoFeasiblePoint";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace socopf
