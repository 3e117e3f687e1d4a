#pragma once

#include <stdexcept>
#include <string>

namespace qzeno {

enum class ErrorCode {
    InvalidDimension,
    DimensionMismatch,
    ExcessiveTruncationLeakage,
    NegativeRate,
    FrameUnsupported,
    NanDetected,
    DimensionTooLarge,
    InvalidSchedule,
    EmptySeries,
    MissingObservable,
    InvalidCase,
    IoError,
    ParseError,
    NonpositiveInput,
    TrajectoryFailed,
    NonHermitian,
    InvalidConfig,
};

const char* to_string(ErrorCode code);

/// Exception carrying a machine-readable error code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace qzeno
