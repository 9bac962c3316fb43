#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cclab {

enum class ErrorCode {
    InvalidArgument,
    DimensionTooSmall,
    DimensionMismatch,
    TruncationOverflow,
    TargetOutsideSubspace,
    BallCenterOutsideSubspace,
    RecoveryRuleMissing,
    ScheduleInfeasible,
    LambdaTooSmall,
    ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Raised by the cyclic-vector builder when no index in the searchable range
/// satisfies the step bound. `best_bound` is the smallest bound seen.
class ScheduleInfeasible : public Error {
public:
    ScheduleInfeasible(std::size_t step, double best_bound, double xi);

    std::size_t step() const noexcept { return step_; }
    double best_bound() const noexcept { return best_bound_; }
    double xi() const noexcept { return xi_; }

private:
    std::size_t step_;
    double best_bound_;
    double xi_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace cclab
