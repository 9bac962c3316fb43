#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cclab/criteria.hpp"

namespace cclab {

using json = nlohmann::json;

inline constexpr int kConfigVersion = 1;

struct Tolerances {
    double membership = kMembershipTolerance;
    double convergence = 1e-6;
    double epsilon = 1e-2;
    friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

struct ExperimentOptions {
    bool allow_signed_coefficients = false;
    OverflowPolicy overflow = OverflowPolicy::Error;
    std::size_t grow_cap = 4096;
    bool include_outside = false;
    std::size_t threads = 1;
    friend bool operator==(const ExperimentOptions&, const ExperimentOptions&) = default;
};

template <Scalar S>
struct CriterionBlock {
    std::vector<TruncVector<S>> X;
    std::vector<TruncVector<S>> Y;
    PolySequence polys;
    std::optional<RecoveryRule<S>> recovery;
    std::map<std::size_t, RecoveryRule<S>> recovery_by_index;
    friend bool operator==(const CriterionBlock&, const CriterionBlock&) = default;
};

/// Candidate vector produced by running the builder on the criterion block.
struct BuildCandidate {
    friend bool operator==(const BuildCandidate&, const BuildCandidate&) = default;
};

/// Density targets taken from the criterion block's Y.
struct TargetsFromY {
    friend bool operator==(const TargetsFromY&, const TargetsFromY&) = default;
};

/// Normalized basis vectors of M plus seeded M-ball samples.
struct SampledTargets {
    std::size_t count = 32;
    friend bool operator==(const SampledTargets&, const SampledTargets&) = default;
};

template <Scalar S>
struct DensityBlock {
    std::variant<TruncVector<S>, BuildCandidate> candidate = BuildCandidate{};
    std::variant<std::vector<TruncVector<S>>, TargetsFromY, SampledTargets> targets = SampledTargets{};
    friend bool operator==(const DensityBlock&, const DensityBlock&) = default;
};

template <Scalar S>
struct TransitivityBlock {
    std::vector<BallPair<S>> pairs;
    std::size_t samples_per_ball = 8;
    friend bool operator==(const TransitivityBlock&, const TransitivityBlock&) = default;
};

struct BuildBlock {
    std::size_t j_max = 4;
    double c = 1.0;
    std::size_t k_step = kDefaultKStep;
    friend bool operator==(const BuildBlock&, const BuildBlock&) = default;
};

struct ScreenBlock {
    std::size_t horizon = 10;
    double growth_threshold = kDefaultGrowthThreshold;
    /// Screen only one block of a DirectSum operator.
    std::optional<BlockPosition> block;
    friend bool operator==(const ScreenBlock&, const ScreenBlock&) = default;
};

struct ConditionFlags {
    bool cond1 = true;
    bool cond2 = true;
    bool cond3 = true;
    friend bool operator==(const ConditionFlags&, const ConditionFlags&) = default;
};

enum class TransitivityExpectation { AllFound, AnyFound, NoneFound };
enum class BuildExpectation { Succeeds, Infeasible };

struct Expectations {
    std::optional<ConditionFlags> criterion_I;
    std::optional<ConditionFlags> criterion_II;
    std::optional<DensityVerdict> density;
    std::optional<TransitivityExpectation> transitivity;
    std::optional<BuildExpectation> build;
    std::optional<bool> screen_passes;
    /// Every orbit point of the density candidate lies exactly in M.
    std::optional<bool> orbit_confined;

    bool empty() const;
    friend bool operator==(const Expectations&, const Expectations&) = default;
};

template <Scalar S>
struct Experiment {
    int version = kConfigVersion;
    std::string name;
    std::string description;
    std::size_t dim = 0;
    double p = 2.0;
    OperatorSpec<S> op = OperatorSpec<S>::identity();
    SubspaceSpec subspace;
    std::optional<PolynomialFamily> family;
    Tolerances tolerances;
    std::size_t horizon = 8;
    std::optional<std::uint64_t> seed;
    ExperimentOptions options;

    std::optional<CriterionBlock<S>> criterion;
    std::optional<DensityBlock<S>> density;
    std::optional<TransitivityBlock<S>> transitivity;
    std::optional<BuildBlock> build;
    std::optional<ScreenBlock> screen;
    Expectations expected;

    RunOptions run_options() const;
    /// Throws ConfigError when there is no criterion block.
    CriterionInstance<S> criterion_instance() const;

    friend bool operator==(const Experiment&, const Experiment&) = default;
};

using AnyExperiment = std::variant<Experiment<double>, Experiment<Complex>>;

/// Strict parse: unknown keys, wrong types and invalid domain objects raise
/// ConfigError naming the offending field path.
AnyExperiment parse_experiment(const json& j);
AnyExperiment load_experiment(const std::filesystem::path& path);

template <Scalar S>
json to_json(const Experiment<S>& e);

json to_json(const AnyExperiment& e);

/// Indented JSON with short arrays kept on one line.
std::string format_config(const json& j);

// Encodings shared with report writers.
template <Scalar S>
json vector_to_json(const TruncVector<S>& v);
json poly_to_json(const ConvexPolynomial& p);
json family_to_json(const PolynomialFamily& f);

}  // namespace cclab
