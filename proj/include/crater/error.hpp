#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace crater {

enum class ErrorCode {
    SumMismatch,
    EmptyDimensions,
    EmptyMask,
    DegenerateMask,
    EmptyEdges,
    InsufficientSupport,
    SingularFit,
    NotAnEllipse,
    BadStride,
    BadThresholds,
    ManifestMissing,
    SchemaViolation,
    RleError,
    ProcessFailure,
    Timeout,
    InvalidOutput,
    IoFailure,
    ParseError,
    BadBins,
    DimMismatch,
    OutOfBounds,
    PlacementOverflow,
    ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so that
/// callers (the CLI in particular) can map failures onto exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace crater
