#include "qdeficit/error.hpp"

namespace qdeficit {

const char* error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ok: return "ok";
        case ErrorCode::configuration: return "configuration";
        case ErrorCode::invalid_argument: return "invalid_argument";
        case ErrorCode::domain: return "domain";
        case ErrorCode::unsupported_order: return "unsupported_order";
        case ErrorCode::parity: return "parity";
        case ErrorCode::tail_divergence: return "tail_divergence";
        case ErrorCode::singular_average: return "singular_average";
        case ErrorCode::divergent_potential: return "divergent_potential";
        case ErrorCode::backend_disagreement: return "backend_disagreement";
        case ErrorCode::resolution: return "resolution";
        case ErrorCode::not_converged: return "not_converged";
        case ErrorCode::io: return "io";
        case ErrorCode::internal: return "internal";
    }
    return "unknown";
}

}  // namespace qdeficit
