#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lacuna {

enum class ErrorKind {
  // configuration / input
  RejectNotDominated,
  RejectNonPositive,
  OutOfDomain,
  ZeroPattern,
  InvalidPattern,
  DimensionMismatch,
  RejectUnit,
  RejectRange,
  AllRowsZero,
  DegenerateTriplet,
  EnclosureTooWide,
  UnsupportedDimension,
  ScheduleOverflow,
  CapacityExceeded,
  ParseError,
  InvalidArgument,
  // certification / internal consistency
  Undecidable,
  Starved,
  PlacementFailure,
  GapViolated,
  MeasureViolated,
  EntryNotProcessed,
  StructureViolated,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::RejectNotDominated: return "RejectNotDominated";
    case ErrorKind::RejectNonPositive: return "RejectNonPositive";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::ZeroPattern: return "ZeroPattern";
    case ErrorKind::InvalidPattern: return "InvalidPattern";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::RejectUnit: return "RejectUnit";
    case ErrorKind::RejectRange: return "RejectRange";
    case ErrorKind::AllRowsZero: return "AllRowsZero";
    case ErrorKind::DegenerateTriplet: return "DegenerateTriplet";
    case ErrorKind::EnclosureTooWide: return "EnclosureTooWide";
    case ErrorKind::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorKind::ScheduleOverflow: return "ScheduleOverflow";
    case ErrorKind::CapacityExceeded: return "CapacityExceeded";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Undecidable: return "Undecidable";
    case ErrorKind::Starved: return "Starved";
    case ErrorKind::PlacementFailure: return "PlacementFailure";
    case ErrorKind::GapViolated: return "GapViolated";
    case ErrorKind::MeasureViolated: return "MeasureViolated";
    case ErrorKind::EntryNotProcessed: return "EntryNotProcessed";
    case ErrorKind::StructureViolated: return "StructureViolated";
  }
  return "Unknown";
}

/// True for failures of a certificate or of construction consistency, as
/// opposed to rejected inputs.
constexpr bool is_certification_failure(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Undecidable:
    case ErrorKind::Starved:
    case ErrorKind::PlacementFailure:
    case ErrorKind::GapViolated:
    case ErrorKind::MeasureViolated:
    case ErrorKind::EntryNotProcessed:
    case ErrorKind::StructureViolated:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace lacuna
