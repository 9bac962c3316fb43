#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cclab/report.hpp"

namespace cclab {

/// Command-line overrides applied on top of a config.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> horizon;
    std::optional<double> epsilon;
    std::optional<std::size_t> threads;
};

template <Scalar S>
Experiment<S> with_overrides(Experiment<S> e, const Overrides& o);

// Typed runs over one experiment. A missing block raises ConfigError.

template <Scalar S>
BasisIndexSet subspace_of(const Experiment<S>& e);

/// The explicit candidate, or the builder's output for "build".
template <Scalar S>
TruncVector<S> density_candidate(const Experiment<S>& e);

template <Scalar S>
std::vector<TruncVector<S>> density_targets(const Experiment<S>& e);

template <Scalar S>
DensityReport<S> density_of(const Experiment<S>& e);

template <Scalar S>
DensityReport<S> density_of(const Experiment<S>& e, const TruncVector<S>& candidate);

template <Scalar S>
CriterionVerdict criterion_of(const Experiment<S>& e, CriterionKind which);

/// Throws ScheduleInfeasible.
template <Scalar S>
BuildResult<S> build_of(const Experiment<S>& e);

template <Scalar S>
TransitivityReport<S> transitivity_of(const Experiment<S>& e);

template <Scalar S>
ScreenReport screen_of(const Experiment<S>& e);

// Command entry points. Exit codes: 0 held at scale, 1 failed at scale;
// invalid runs throw (the CLI maps that to 2).

RunResult run_density(const AnyExperiment& e, const Overrides& o = {});
RunResult run_criterion(const AnyExperiment& e, CriterionKind which, const Overrides& o = {});
RunResult run_transitivity(const AnyExperiment& e, const Overrides& o = {});
RunResult run_build(const AnyExperiment& e, const Overrides& o = {});
RunResult run_screen(const AnyExperiment& e, const Overrides& o = {});

struct CheckOutcome {
    std::string check;
    std::string expected;
    std::string actual;
    bool ok = false;
    double seconds = 0.0;
};

/// Runs every expectation the experiment declares.
std::vector<CheckOutcome> verify_expectations(const AnyExperiment& e, const Overrides& o = {});

}  // namespace cclab
