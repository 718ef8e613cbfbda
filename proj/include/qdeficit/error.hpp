#pragma once

#include <stdexcept>
#include <string>

namespace qdeficit {

enum class ErrorCode {
    ok = 0,
    configuration,
    invalid_argument,
    domain,
    unsupported_order,
    parity,
    tail_divergence,
    singular_average,
    divergent_potential,
    backend_disagreement,
    resolution,
    not_converged,
    io,
    internal
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
    if (!condition) fail(code, message);
}

}  // namespace qdeficit
