#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace socopf {

enum class ErrorCode {
  // matpower_io
  MissingMatrix,
  MalformedRow,
  UnsupportedCostModel,
  CaseFileNotFound,
  // network
  DisconnectedGraph,
  NonpositiveReactance,
  EmptyNetwork,
  InvalidNetwork,
  // formulation / solver
  AsymmetricAngleBounds,
  DimensionMismatch,
  NumericalLimit,
  IterationLimit,
  // gap analysis / oracle
  TightenInfeasible,
  NoFeasiblePoint,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable error code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace socopf
