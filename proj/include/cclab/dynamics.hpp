#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "cclab/polynomial.hpp"
#include "cclab/subspace.hpp"

namespace cclab {

struct RunOptions {
    EvalOptions eval{};
    double membership_tol = kMembershipTolerance;
    /// Score orbit points outside M as well (exploratory runs only).
    bool include_outside = false;
    std::size_t threads = 1;
};

/// [P(T)x for P in family], in enumeration order.
template <Scalar S>
std::vector<TruncVector<S>> orbit_segment(const OperatorSpec<S>& op, const TruncVector<S>& x,
                                          const std::vector<ConvexPolynomial>& members,
                                          const EvalOptions& opts = {});

template <Scalar S>
std::vector<TruncVector<S>> orbit_segment(const OperatorSpec<S>& op, const TruncVector<S>& x,
                                          const PolynomialFamily& family,
                                          const EvalOptions& opts = {}) {
    return orbit_segment(op, x, family.enumerate(), opts);
}

enum class DensityVerdict { DenseAtScale, NotCoveredAtScale };

struct TargetResult {
    /// +inf when no orbit point lies in M.
    double best_distance = 0.0;
    std::optional<std::size_t> witness_index;
    std::optional<ConvexPolynomial> witness;
    friend bool operator==(const TargetResult&, const TargetResult&) = default;
};

template <Scalar S>
struct DensityReport {
    std::vector<TruncVector<S>> targets;
    std::vector<TargetResult> per_target;
    double epsilon = 0.0;
    DensityVerdict verdict = DensityVerdict::NotCoveredAtScale;
    PolynomialFamily family;
    std::size_t orbit_size = 0;
    std::size_t orbit_points_in_subspace = 0;

    double worst_distance() const;
    friend bool operator==(const DensityReport&, const DensityReport&) = default;
};

/// For each target y in span(m): min over P in family of |P(T)x - y|, taken
/// over orbit points lying in M (unless include_outside). Witness ties go to
/// the first member within 1e-12 of the minimum. Throws TargetOutsideSubspace.
template <Scalar S>
DensityReport<S> density_score(const OperatorSpec<S>& op, const TruncVector<S>& x,
                               const BasisIndexSet& m, const PolynomialFamily& family,
                               const std::vector<TruncVector<S>>& targets, double epsilon,
                               const RunOptions& opts = {});

struct InvarianceResult {
    bool invariant = true;
    double max_residual = 0.0;
    /// First basis index j in m whose image P(T)e_j leaves M.
    std::optional<std::size_t> violating_basis_index;
    /// Off-M coordinate where that image carries the most mass.
    std::optional<std::size_t> landing_index;
};

/// Checks P(T)e_j in M for every j in m; residuals use tol * max(1, |P(T)e_j|).
template <Scalar S>
InvarianceResult invariance_check(const ConvexPolynomial& p, const OperatorSpec<S>& op,
                                  const BasisIndexSet& m, double tol = kMembershipTolerance,
                                  const EvalOptions& opts = {});

template <Scalar S>
struct BallPair {
    TruncVector<S> u_center;
    TruncVector<S> v_center;
    double radius = 0.0;
    friend bool operator==(const BallPair&, const BallPair&) = default;
};

struct PairResult {
    bool found = false;
    std::optional<ConvexPolynomial> witness;
    std::optional<std::size_t> witness_index;
    std::optional<std::size_t> sample_index;
    /// Invariance residual of the witness over M (0 when nothing was found).
    double invariance_residual = 0.0;
    friend bool operator==(const PairResult&, const PairResult&) = default;
};

template <Scalar S>
struct TransitivityReport {
    std::vector<BallPair<S>> pairs;
    std::vector<PairResult> per_pair;
    PolynomialFamily family;
    std::size_t samples_per_ball = 0;
    std::uint64_t seed = 0;

    bool all_found() const;
    bool any_found() const;
    friend bool operator==(const TransitivityReport&, const TransitivityReport&) = default;
};

/// Seed of pair k's ball samples (a splitmix64 step over seed and k).
std::uint64_t pair_seed(std::uint64_t seed, std::uint64_t k);

/// For each (U, V) pair of M-balls, looks for P in the family and a sampled
/// v in V with P(T)v in U (so P(T)v must lie in M). found == false is
/// evidence at this sampling resolution, not a proof.
/// Throws BallCenterOutsideSubspace.
template <Scalar S>
TransitivityReport<S> transitivity_search(const OperatorSpec<S>& op, const BasisIndexSet& m,
                                          const std::vector<BallPair<S>>& pairs,
                                          const PolynomialFamily& family,
                                          std::size_t samples_per_ball, std::uint64_t seed,
                                          const RunOptions& opts = {});

}  // namespace cclab
