#pragma once

#include <stdexcept>
#include <string>

namespace tracegen {

inline constexpr const char* kToolVersion = "0.1.0";

// Failure categories carried by every exception thrown from this library.
// Callers that need to branch on the cause (CLI exit codes, recovery in the
// training loop) switch on the kind instead of parsing message text.
enum class ErrorKind {
  InvalidArgument,
  IoError,
  ShapeMismatch,
  HorizonMismatch,
  NonPositiveDepth,
  BehindCamera,
  BadRotation,
  NoMotionFound,
  NoValidOverlap,
  AllDepthMissing,
  StreamMismatch,
  TauOutOfRange,
  OddGrid,
  EmptyTrace,
  NonFiniteLoss,
  BadCheckpoint,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::HorizonMismatch: return "HorizonMismatch";
    case ErrorKind::NonPositiveDepth: return "NonPositiveDepth";
    case ErrorKind::BehindCamera: return "BehindCamera";
    case ErrorKind::BadRotation: return "BadRotation";
    case ErrorKind::NoMotionFound: return "NoMotionFound";
    case ErrorKind::NoValidOverlap: return "NoValidOverlap";
    case ErrorKind::AllDepthMissing: return "AllDepthMissing";
    case ErrorKind::StreamMismatch: return "StreamMismatch";
    case ErrorKind::TauOutOfRange: return "TauOutOfRange";
    case ErrorKind::OddGrid: return "OddGrid";
    case ErrorKind::EmptyTrace: return "EmptyTrace";
    case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorKind::BadCheckpoint: return "BadCheckpoint";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace tracegen
