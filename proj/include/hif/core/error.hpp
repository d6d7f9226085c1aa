#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hif {

/// Failure classes surfaced by every module. The CLI maps each one to a
/// distinct process exit code.
enum class ErrorCategory {
    InvalidInput,
    Configuration,
    Range,
    Singular,
    Synchronization,
    Parse,
    Estimation,
    Io,
};

[[nodiscard]] std::string_view to_string(ErrorCategory category) noexcept;

/// Nonzero exit code for a failure category (0 is reserved for success).
[[nodiscard]] int exit_code(ErrorCategory category) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category) {}

    [[nodiscard]] ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

[[noreturn]] inline void fail(ErrorCategory category, const std::string& message) {
    throw Error(category, message);
}

}  // namespace hif
