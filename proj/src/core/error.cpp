#include "hif/core/error.hpp"

namespace hif {

std::string_view to_string(ErrorCategory category) noexcept {
    switch (category) {
        case ErrorCategory::InvalidInput: return "invalid-input";
        case ErrorCategory::Configuration: return "configuration";
        case ErrorCategory::Range: return "range";
        case ErrorCategory::Singular: return "singular";
        case ErrorCategory::Synchronization: return "synchronization";
        case ErrorCategory::Parse: return "parse";
        case ErrorCategory::Estimation: return "estimation";
        case ErrorCategory::Io: return "io";
    }
    return "unknown";
}

int exit_code(ErrorCategory category) noexcept {
    switch (category) {
        case ErrorCategory::Configuration: return 2;
        case ErrorCategory::InvalidInput: return 3;
        case ErrorCategory::Parse: return 4;
        case ErrorCategory::Singular: return 5;
        case ErrorCategory::Synchronization: return 6;
        case ErrorCategory::Range: return 7;
        case ErrorCategory::Estimation: return 8;
        case ErrorCategory::Io: return 9;
    }
    return 1;
}

}  // namespace hif
