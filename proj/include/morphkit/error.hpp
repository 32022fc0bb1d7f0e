#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace morphkit {

enum class ErrorCode {
    ImageTooSmall,
    OutOfBounds,
    DegeneratePolygon,
    NoComponentFound,
    EmptyMask,
    MultipleComponents,
    TooSmall,
    BadN,
    BadM,
    BadParams,
    DimensionMismatch,
    TooLarge,
    EmptyDataset,
    LabelMismatch,
    BadLabel,
    BadPrediction,
    BadGamma,
    LengthMismatch,
    EmptyInput,
    Io,
    Schema,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so
// batch drivers can report and continue.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace morphkit
