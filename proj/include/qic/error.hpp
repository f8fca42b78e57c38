#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qic {

enum class ErrorCode {
    FileNotFound,
    UnsupportedFormat,
    CorruptHeader,
    IoFailure,
    QOutOfRange,
    RegisterTooSmall,
    ImageTooLarge,
    MissingGroupMetadata,
    SchemeMismatch,
    NotPowerOfTwo,
    TooManyQubits,
    InvalidCircuit,
    NondeterministicReset,
    RegisterMismatch,
    MalformedGroup,
    CoefficientOutOfBounds,
    DimensionMismatch,
    InvalidArgument,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::CorruptHeader: return "CorruptHeader";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::QOutOfRange: return "QOutOfRange";
    case ErrorCode::RegisterTooSmall: return "RegisterTooSmall";
    case ErrorCode::ImageTooLarge: return "ImageTooLarge";
    case ErrorCode::MissingGroupMetadata: return "MissingGroupMetadata";
    case ErrorCode::SchemeMismatch: return "SchemeMismatch";
    case ErrorCode::NotPowerOfTwo: return "NotPowerOfTwo";
    case ErrorCode::TooManyQubits: return "TooManyQubits";
    case ErrorCode::InvalidCircuit: return "InvalidCircuit";
    case ErrorCode::NondeterministicReset: return "NondeterministicReset";
    case ErrorCode::RegisterMismatch: return "RegisterMismatch";
    case ErrorCode::MalformedGroup: return "MalformedGroup";
    case ErrorCode::CoefficientOutOfBounds: return "CoefficientOutOfBounds";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

/// Every failure raised by the library. The message is prefixed with the
/// code name so command-line callers can surface it verbatim.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string &detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

} // namespace qic
