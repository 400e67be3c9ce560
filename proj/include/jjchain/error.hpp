#pragma once

#include <stdexcept>
#include <string>

namespace jjchain {

enum class ErrorKind {
  InvalidParameter,
  PlasmaSingularity,
  EvanescentBand,
  AboveLinearBand,
  NumericalFailure,
  NonConvergence,
  AmbiguousOffset,
  DegenerateData,
  MissingAnchor,
  OffResonanceTrace,
  InvertedPyramid,
  Infeasible,
  Parse,
  Io,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::PlasmaSingularity: return "PlasmaSingularity";
    case ErrorKind::EvanescentBand: return "EvanescentBand";
    case ErrorKind::AboveLinearBand: return "AboveLinearBand";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::AmbiguousOffset: return "AmbiguousOffset";
    case ErrorKind::DegenerateData: return "DegenerateData";
    case ErrorKind::MissingAnchor: return "MissingAnchor";
    case ErrorKind::OffResonanceTrace: return "OffResonanceTrace";
    case ErrorKind::InvertedPyramid: return "InvertedPyramid";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

/// Base exception for all library failures. The kind selects the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

namespace detail {

inline void require(bool condition, const std::string& message,
                    ErrorKind kind = ErrorKind::InvalidParameter) {
  if (!condition) throw Error(kind, message);
}

}  // namespace detail

}  // namespace jjchain
