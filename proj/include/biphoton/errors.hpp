#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace biphoton {

/// Failure classes raised by the numerical modules and the front end.
enum class ErrorKind {
  InvalidModel,
  InvalidArgument,
  GridTooCoarse,
  GridTooNarrow,
  GridMismatch,
  OrderOutOfRange,
  BasisEscapesGrid,
  DelayTooLargeForGrid,
  ZeroNorm,
  DegenerateGroupDelay,
  EmptyTrace,
  TooFewSamples,
  NonFiniteData,
  ConfigInvalid,
  Io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), message_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// The text without the kind prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidModel: return "InvalidModel";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::GridTooNarrow: return "GridTooNarrow";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::OrderOutOfRange: return "OrderOutOfRange";
    case ErrorKind::BasisEscapesGrid: return "BasisEscapesGrid";
    case ErrorKind::DelayTooLargeForGrid: return "DelayTooLargeForGrid";
    case ErrorKind::ZeroNorm: return "ZeroNorm";
    case ErrorKind::DegenerateGroupDelay: return "DegenerateGroupDelay";
    case ErrorKind::EmptyTrace: return "EmptyTrace";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::NonFiniteData: return "NonFiniteData";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace biphoton
