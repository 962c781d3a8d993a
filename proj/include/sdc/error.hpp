#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sdc {

// Every failure surfaced by the library carries one of these kinds so the CLI
// can print a single machine-parsable reason.
enum class ErrorKind {
    EmptySignal,
    InvalidFactor,
    UnsupportedWav,
    MalformedWav,
    RateMismatch,
    SignalTooShort,
    ShapeMismatch,
    UndefinedReference,
    NotAScalar,
    StaleGraph,
    InvalidConfig,
    InvalidToken,
    NanLoss,
    NoData,
    IncompleteBreakdown,
    ConfigMismatch,
    IoError,
    CorruptStream,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

}  // namespace sdc
