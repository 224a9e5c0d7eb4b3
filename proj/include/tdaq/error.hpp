#ifndef TDAQ_ERROR_HPP
#define TDAQ_ERROR_HPP

#include <stdexcept>
#include <string>

namespace tdaq {

/// Failure categories. The CLI maps them onto its stable exit codes.
enum class ErrorKind {
    invalid_argument,  // bad input values or flags (exit 1)
    io,                // unreadable / malformed files (exit 2)
    integrity,         // incomparable or mismatched artifacts (exit 3)
    numerical,         // solver or eigensolver failure (exit 4)
};

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

}  // namespace tdaq

#endif
