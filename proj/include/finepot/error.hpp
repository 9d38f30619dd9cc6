#pragma once

#include <stdexcept>
#include <string>

namespace finepot {

enum class ErrorKind {
    InvalidArgument,
    Infeasible,
    Divergence,
    Hypothesis,
    DomainEscape,
    Io,
    Config,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every module error carries a kind so the CLI can emit a machine-readable record.
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

inline void require(bool condition, const std::string& what,
                    ErrorKind kind = ErrorKind::InvalidArgument) {
    if (!condition) throw Error(kind, what);
}

} // namespace finepot
