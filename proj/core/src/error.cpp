#include "gsc/error.hpp"

namespace gsc {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::GridTooLarge: return "GridTooLarge";
    case ErrorKind::SingularBasis: return "SingularBasis";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NegativeQ: return "NegativeQ";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::BadScheduleParam: return "BadScheduleParam";
    case ErrorKind::ScheduleOverflow: return "ScheduleOverflow";
    case ErrorKind::NewtonDiverged: return "NewtonDiverged";
    case ErrorKind::NotAMaximum: return "NotAMaximum";
    case ErrorKind::EtaTooLarge: return "EtaTooLarge";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace gsc
