#pragma once

#include <stdexcept>
#include <string>

namespace isf {

enum class ErrorCode {
    // framing
    BadMagic,
    UnsupportedVersion,
    LengthMismatch,
    ChecksumMismatch,
    SerializationFailed,
    // staging
    ConnectFailed,
    VersionMismatch,
    InvalidCapacity,
    ReaderGone,
    WriterGone,
    StagingError,
    // producer
    CalibrationFailed,
    // tasks
    ShapeMismatch,
    UnknownCodec,
    DegenerateRange,
    // model
    InvalidCadence,
    DegenerateSamples,
    // orchestrator
    TaskFailed,
    ConsumerCrashed,
    // cli
    ConfigError,
    // construction / validation
    InvalidArgument,
};

const char* error_code_name(ErrorCode code);

/// Exception type carrying a stable error code alongside the message.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

} // namespace isf
