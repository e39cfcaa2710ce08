// error.hpp: error codes and exception type shared by all modules

#pragma once

#include <stdexcept>
#include <string>

namespace qgs {

enum class ErrorCode {
    MissingField,
    NonPositiveFrequency,
    NonHermitianCoupling,
    UnknownUnit,
    ParseError,
    InvalidValue,
    DimensionOverBudget,
    KrylovBreakdown,
    NoConvergence,
    ConservationViolation,
    ZeroNormState,
    GridTooCoarse,
    ChannelBudgetExceeded,
    ChannelNotInBasis,
    TailNotConverged,
    BudgetExceeded,
    ConfigError,
    IoError,
};

// Error families map onto CLI exit codes.
enum class ErrorFamily { Config, Model, Numerical, Signal, Io };

const char* to_string(ErrorCode code);
ErrorFamily family_of(ErrorCode code);
int exit_code(ErrorFamily family);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string key, const std::string& detail = {});

    ErrorCode code() const { return code_; }
    // Offending config key, mode, channel, ... (may be empty).
    const std::string& key() const { return key_; }

private:
    ErrorCode code_;
    std::string key_;
};

} // namespace qgs
