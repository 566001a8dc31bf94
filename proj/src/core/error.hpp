#pragma once

#include <stdexcept>
#include <string>

namespace addnet {

// Error taxonomy shared by the library and the C API boundary.
enum class ErrorCode {
    invalid_argument,
    out_of_range,
    not_found,
    data,
    io,
    parse,
    internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

} // namespace addnet
