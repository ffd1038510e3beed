#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace palmgrid {

/// Failure categories. The CLI prints `to_string(kind)` as the machine-parseable
/// error tag, so the spelling of these names is part of the external interface.
enum class ErrorKind {
    format,
    truncation,
    io,
    config,
    schema,
    argument,
    shape,
    capacity,
    parse,
    divergence,
    precondition,
    degenerate_input,
    unsupported,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

} // namespace palmgrid
