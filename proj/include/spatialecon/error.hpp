#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spatialecon {

enum class ErrorCode {
  InvalidArgument,
  InvalidWeight,
  DuplicateEdge,
  UnknownId,
  InvalidK,
  ZeroDistance,
  NoConnectivity,
  ShapeError,
  ZeroVariance,
  WrongModel,
  SingularDesign,
  RequiresNormalizedW,
  SingularMultiplier,
  NotNested,
  TooLargeForDense,
  BadIndex,
  BadCovariance,
  MissingData,
  IdMismatch,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// that callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidWeight: return "InvalidWeight";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::UnknownId: return "UnknownId";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::ZeroDistance: return "ZeroDistance";
    case ErrorCode::NoConnectivity: return "NoConnectivity";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::WrongModel: return "WrongModel";
    case ErrorCode::SingularDesign: return "SingularDesign";
    case ErrorCode::RequiresNormalizedW: return "RequiresNormalizedW";
    case ErrorCode::SingularMultiplier: return "SingularMultiplier";
    case ErrorCode::NotNested: return "NotNested";
    case ErrorCode::TooLargeForDense: return "TooLargeForDense";
    case ErrorCode::BadIndex: return "BadIndex";
    case ErrorCode::BadCovariance: return "BadCovariance";
    case ErrorCode::MissingData: return "MissingData";
    case ErrorCode::IdMismatch: return "IdMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace spatialecon
