#pragma once

#include <stdexcept>
#include <string>

namespace dfpp {

enum class ErrorCode {
  NonPoised,
  DimensionMismatch,
  WrongCardinality,
  GeometryFailure,
  SingularSystem,
  UnknownProblem,
  NonFiniteValue,
  DegenerateProblem,
  IncompleteGrid,
  BadInput,
};

const char* to_string(ErrorCode code);

/// Exception carrying one of the library's error codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPoised: return "NonPoised";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::WrongCardinality: return "WrongCardinality";
    case ErrorCode::GeometryFailure: return "GeometryFailure";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::UnknownProblem: return "UnknownProblem";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::DegenerateProblem: return "DegenerateProblem";
    case ErrorCode::IncompleteGrid: return "IncompleteGrid";
    case ErrorCode::BadInput: return "BadInput";
  }
  return "Unknown";
}

}  // namespace dfpp
