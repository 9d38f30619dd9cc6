#include "finepot/error.hpp"

namespace finepot {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::Hypothesis: return "hypothesis_violation";
    case ErrorKind::DomainEscape: return "domain_escape";
    case ErrorKind::Io: return "io";
    case ErrorKind::Config: return "config";
    }
    return "unknown";
}

} // namespace finepot
