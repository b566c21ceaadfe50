// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace polydiff {

// Failure taxonomy shared by the library and the CLI. A gate rejection never
// asserts "not a diffeomorphism": the operator-norm gate is sufficient only.
enum class ErrorKind {
  Parse,
  EmptyInterior,
  Unbounded,
  NotInPolytope,
  NotASymmetry,
  DomainMismatch,
  CurveNotInM,
  NotStratified,
  GateNotSatisfied,
  ProjectionNotConverged,
  InversionNotConverged,
  NoWitnessFound,
  InternalInvariantViolation,
};

constexpr const char* error_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::EmptyInterior: return "EmptyInterior";
    case ErrorKind::Unbounded: return "Unbounded";
    case ErrorKind::NotInPolytope: return "NotInPolytope";
    case ErrorKind::NotASymmetry: return "NotASymmetry";
    case ErrorKind::DomainMismatch: return "DomainMismatch";
    case ErrorKind::CurveNotInM: return "CurveNotInM";
    case ErrorKind::NotStratified: return "NotStratified";
    case ErrorKind::GateNotSatisfied: return "GateNotSatisfied";
    case ErrorKind::ProjectionNotConverged: return "ProjectionNotConverged";
    case ErrorKind::InversionNotConverged: return "InversionNotConverged";
    case ErrorKind::NoWitnessFound: return "NoWitnessFound";
    case ErrorKind::InternalInvariantViolation: return "InternalInvariantViolation";
  }
  return "Unknown";
}

// CLI contract: 0 ok, 2 parse, 3 geometry, 4 gate rejection, 5 numerical.
constexpr int error_exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parse:
      return 2;
    case ErrorKind::EmptyInterior:
    case ErrorKind::Unbounded:
    case ErrorKind::NotInPolytope:
    case ErrorKind::NotASymmetry:
    case ErrorKind::DomainMismatch:
    case ErrorKind::CurveNotInM:
      return 3;
    case ErrorKind::NotStratified:
    case ErrorKind::GateNotSatisfied:
      return 4;
    default:
      return 5;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_name(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  const char* name() const noexcept { return error_name(kind_); }
  int exit_code() const noexcept { return error_exit_code(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace polydiff
