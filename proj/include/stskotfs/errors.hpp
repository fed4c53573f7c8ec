#pragma once

#include <stdexcept>
#include <string>

namespace stskotfs {

enum class ErrorKind {
    NonPowerOfTwo,
    IndivisibleUsers,
    DelayDopplerOutOfRange,
    InvalidParameter,
    UnsupportedOrder,
    DimensionMismatch,
    EmptyErrorSpace,
    TooManyPaths,
    CodebookTooLarge,
    SearchSpaceTooLarge,
    SolveFailure,
    InvalidDapIndex,
    LengthMismatch,
    IncompatibleBase,
    NonHermitianInput,
    BadConfigFile,
    IoFailure,
};

const char* to_string(ErrorKind kind);

/// All toolkit errors carry a machine-checkable kind next to the message.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

} // namespace stskotfs
