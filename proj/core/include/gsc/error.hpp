#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gsc {

enum class ErrorKind {
  InvalidArgument,
  GridTooLarge,
  SingularBasis,
  DimensionMismatch,
  NegativeQ,
  NonFiniteState,
  BadScheduleParam,
  ScheduleOverflow,
  NewtonDiverged,
  NotAMaximum,
  EtaTooLarge,
  LengthMismatch,
  NotNormalized,
  InsufficientSamples,
  ParseError,
  ValidationError,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gsc
