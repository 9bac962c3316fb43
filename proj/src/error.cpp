#include "cclab/error.hpp"

#include <sstream>

namespace cclab {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::DimensionTooSmall: return "DimensionTooSmall";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::TruncationOverflow: return "TruncationOverflow";
        case ErrorCode::TargetOutsideSubspace: return "TargetOutsideSubspace";
        case ErrorCode::BallCenterOutsideSubspace: return "BallCenterOutsideSubspace";
        case ErrorCode::RecoveryRuleMissing: return "RecoveryRuleMissing";
        case ErrorCode::ScheduleInfeasible: return "ScheduleInfeasible";
        case ErrorCode::LambdaTooSmall: return "LambdaTooSmall";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

namespace {
std::string infeasible_message(std::size_t step, double best, double xi) {
    std::ostringstream os;
    os << "no admissible k at step " << step << " (best bound " << best << ", xi " << xi << ")";
    return os.str();
}
}  // namespace

ScheduleInfeasible::ScheduleInfeasible(std::size_t step, double best_bound, double xi)
    : Error(ErrorCode::ScheduleInfeasible, infeasible_message(step, best_bound, xi)),
      step_(step),
      best_bound_(best_bound),
      xi_(xi) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace cclab
