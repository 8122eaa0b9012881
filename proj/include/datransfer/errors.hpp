// errors.hpp — Exception types shared by every datransfer module

#pragma once

#include <stdexcept>
#include <string>

namespace datransfer {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidParameters : Error { using Error::Error; };
struct InvalidState : Error { using Error::Error; };
struct DegenerateEffectiveSystem : Error { using Error::Error; };
struct NegativeFrequency : Error { using Error::Error; };
struct NegativeTime : Error { using Error::Error; };
struct DivergentLimit : Error { using Error::Error; };
struct InfraredDivergent : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };
struct DistributionInvalid : Error { using Error::Error; };
struct DimensionTooLarge : Error { using Error::Error; };

// Carries the offending config field (and source line when known).
struct ConfigError : Error {
    ConfigError(const std::string& field, const std::string& what, int line = 0)
        : Error(format(field, what, line)), field_(field), line_(line) {}

    const std::string& field() const noexcept { return field_; }
    int line() const noexcept { return line_; }

private:
    static std::string format(const std::string& field, const std::string& what, int line) {
        std::string msg = "config error";
        if (line > 0) msg += " (line " + std::to_string(line) + ")";
        if (!field.empty()) msg += " [" + field + "]";
        return msg + ": " + what;
    }
    std::string field_;
    int line_{0};
};

} // namespace datransfer
