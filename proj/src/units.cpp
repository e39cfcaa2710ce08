#include "qgs/units.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <string>

#include "qgs/error.hpp"

namespace qgs {

namespace {

double to_ev(double value, Unit unit) {
    switch (unit) {
    case Unit::ElectronVolt: return value;
    case Unit::Wavenumber: return value * kEvPerWavenumber;
    case Unit::FsPeriod:
        return value == 0.0 ? std::numeric_limits<double>::infinity() : kTwoPi * kHbarEvFs / value;
    case Unit::FsInverse:
        return value == 0.0 ? std::numeric_limits<double>::infinity() : kHbarEvFs / value;
    }
    return value;
}

double from_ev(double ev, Unit unit) {
    switch (unit) {
    case Unit::ElectronVolt: return ev;
    case Unit::Wavenumber: return ev / kEvPerWavenumber;
    case Unit::FsPeriod:
        return ev == 0.0 ? std::numeric_limits<double>::infinity() : kTwoPi * kHbarEvFs / ev;
    case Unit::FsInverse:
        return ev == 0.0 ? std::numeric_limits<double>::infinity() : kHbarEvFs / ev;
    }
    return ev;
}

} // namespace

const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::NonPositiveFrequency: return "NonPositiveFrequency";
    case ErrorCode::NonHermitianCoupling: return "NonHermitianCoupling";
    case ErrorCode::UnknownUnit: return "UnknownUnit";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::DimensionOverBudget: return "DimensionOverBudget";
    case ErrorCode::KrylovBreakdown: return "KrylovBreakdown";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ConservationViolation: return "ConservationViolation";
    case ErrorCode::ZeroNormState: return "ZeroNormState";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::ChannelBudgetExceeded: return "ChannelBudgetExceeded";
    case ErrorCode::ChannelNotInBasis: return "ChannelNotInBasis";
    case ErrorCode::TailNotConverged: return "TailNotConverged";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

ErrorFamily family_of(ErrorCode code) {
    switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::ParseError:
    case ErrorCode::UnknownUnit:
        return ErrorFamily::Config;
    case ErrorCode::MissingField:
    case ErrorCode::NonPositiveFrequency:
    case ErrorCode::NonHermitianCoupling:
    case ErrorCode::InvalidValue:
    case ErrorCode::DimensionOverBudget:
        return ErrorFamily::Model;
    case ErrorCode::KrylovBreakdown:
    case ErrorCode::NoConvergence:
    case ErrorCode::ConservationViolation:
    case ErrorCode::ZeroNormState:
        return ErrorFamily::Numerical;
    case ErrorCode::GridTooCoarse:
    case ErrorCode::ChannelBudgetExceeded:
    case ErrorCode::ChannelNotInBasis:
    case ErrorCode::TailNotConverged:
    case ErrorCode::BudgetExceeded:
        return ErrorFamily::Signal;
    case ErrorCode::IoError:
        return ErrorFamily::Io;
    }
    return ErrorFamily::Config;
}

int exit_code(ErrorFamily family) {
    switch (family) {
    case ErrorFamily::Config: return 2;
    case ErrorFamily::Model: return 3;
    case ErrorFamily::Numerical: return 4;
    case ErrorFamily::Signal: return 5;
    case ErrorFamily::Io: return 6;
    }
    return 1;
}

Error::Error(ErrorCode code, std::string key, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + (key.empty() ? "" : "(" + key + ")") +
                         (detail.empty() ? "" : ": " + detail))
    , code_(code)
    , key_(std::move(key)) {}

Unit parse_unit(std::string_view tag) {
    std::string t(tag);
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "ev") return Unit::ElectronVolt;
    if (t == "cm1" || t == "cm-1" || t == "cm^-1") return Unit::Wavenumber;
    if (t == "fs-period" || t == "fs_period") return Unit::FsPeriod;
    if (t == "fs-inverse" || t == "fs_inverse") return Unit::FsInverse;
    throw Error(ErrorCode::UnknownUnit, std::string(tag));
}

std::string_view unit_name(Unit unit) {
    switch (unit) {
    case Unit::ElectronVolt: return "ev";
    case Unit::Wavenumber: return "cm1";
    case Unit::FsPeriod: return "fs-period";
    case Unit::FsInverse: return "fs-inverse";
    }
    return "?";
}

double convert_units(double value, Unit from, Unit to) {
    if (from == to) return value;
    return from_ev(to_ev(value, from), to);
}

} // namespace qgs
