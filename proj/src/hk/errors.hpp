#pragma once

#include <stdexcept>
#include <string>

namespace hk {

enum class ErrorKind {
    Argument,
    Configuration,
    Index,
    Selection,
    Classification,
    Branch,
    Schedule,
    Integrator,
    Stratification,
    SlidingInfeasible,
    NotConverged,
    Sampling,
    Parse,
    Io,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

}  // namespace hk
