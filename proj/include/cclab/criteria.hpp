#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "cclab/dynamics.hpp"

namespace cclab {

/// k -> stride * k + offset
struct LinearExponents {
    std::size_t stride = 1;
    std::size_t offset = 0;
    friend bool operator==(const LinearExponents&, const LinearExponents&) = default;
};

struct ListedExponents {
    std::vector<std::size_t> values;
    friend bool operator==(const ListedExponents&, const ListedExponents&) = default;
};

/// k -> stride * k + offset (k >= 1), or an explicit list indexed from k = 1.
struct ExponentRule {
    using Linear = LinearExponents;
    using List = ListedExponents;
    std::variant<Linear, List> kind;

    /// Exponent for k (1-based); nothing past the end of a list.
    std::optional<std::size_t> at(std::size_t k) const;
    /// Number of defined k, or nothing when unbounded.
    std::optional<std::size_t> length() const;

    friend bool operator==(const ExponentRule&, const ExponentRule&) = default;
};

/// The sequence {P_k}, k >= 1.
struct PolySequence {
    /// P_k = z^{e(k)}
    struct MonomialPowers {
        ExponentRule exponents;
        friend bool operator==(const MonomialPowers&, const MonomialPowers&) = default;
    };
    struct Explicit {
        std::vector<ConvexPolynomial> polys;
        friend bool operator==(const Explicit&, const Explicit&) = default;
    };
    std::variant<MonomialPowers, Explicit> kind;

    std::optional<ConvexPolynomial> at(std::size_t k) const;
    std::optional<std::size_t> length() const;

    friend bool operator==(const PolySequence&, const PolySequence&) = default;
};

/// How to produce x_k for one target y.
template <Scalar S>
struct RecoveryRule {
    /// x_k = R^{e(k)} y
    struct OperatorPower {
        OperatorSpec<S> op;
        ExponentRule exponents;
        friend bool operator==(const OperatorPower&, const OperatorPower&) = default;
    };
    /// x_k = vectors[k - 1]
    struct ExplicitList {
        std::vector<TruncVector<S>> vectors;
        friend bool operator==(const ExplicitList&, const ExplicitList&) = default;
    };
    std::variant<OperatorPower, ExplicitList> kind;

    friend bool operator==(const RecoveryRule&, const RecoveryRule&) = default;
};

template <Scalar S>
struct CriterionInstance {
    OperatorSpec<S> op;
    SubspaceSpec subspace;
    std::size_t dim = 0;
    double p = 2.0;
    std::vector<TruncVector<S>> X;
    std::vector<TruncVector<S>> Y;
    PolySequence polys;
    /// Rule used for every y without an entry in `recovery_by_index`.
    std::optional<RecoveryRule<S>> recovery;
    std::map<std::size_t, RecoveryRule<S>> recovery_by_index;

    friend bool operator==(const CriterionInstance&, const CriterionInstance&) = default;
};

/// X, Y inside span(M), polys nonempty, vector dims consistent.
template <Scalar S>
void validate(const CriterionInstance<S>& inst, double membership_tol = kMembershipTolerance);

/// P_k, throwing InvalidArgument when the sequence is exhausted.
ConvexPolynomial poly_at(const PolySequence& seq, std::size_t k);

/// x_k for Y[y_index]. A zero target with no rule recovers to x_k = 0.
/// Throws RecoveryRuleMissing; propagates TruncationOverflow.
template <Scalar S>
TruncVector<S> recover(const CriterionInstance<S>& inst, std::size_t y_index, std::size_t k,
                       const EvalOptions& opts = {});

struct ConvergenceSeries {
    std::vector<double> values;  ///< index k - 1
    bool pass = false;
};

struct ConditionOne {
    bool pass = true;
    double worst_tail_norm = 0.0;  ///< max over X of |P_h(T)x|
    ConvergenceSeries series;      ///< max over X per k
};

struct ConditionTwo {
    bool pass = true;
    double worst_x_norm = 0.0;          ///< max over Y of |x_h|
    double worst_recovery_error = 0.0;  ///< max over Y of |P_h(T)x_h - y|
    ConvergenceSeries x_norms;
    ConvergenceSeries recovery_errors;
};

struct ConditionThreeStep {
    std::size_t k = 0;
    bool pass = true;
    double max_residual = 0.0;
    /// Invariance: violating basis index of M. Preimage: index into X.
    std::optional<std::size_t> violating_source;
    std::optional<std::size_t> landing_index;
};

struct ConditionThree {
    bool pass = true;
    std::vector<ConditionThreeStep> steps;
    /// First failing step's landing index, if any.
    std::optional<std::size_t> first_landing_index() const;
};

enum class CriterionKind { Invariance, Preimage };

struct CriterionVerdict {
    CriterionKind kind = CriterionKind::Invariance;
    ConditionOne cond1;
    ConditionTwo cond2;
    ConditionThree cond3;
    std::size_t horizon = 0;
    double tol = 0.0;
    bool all_pass() const { return cond1.pass && cond2.pass && cond3.pass; }
};

/// "-> 0" at a finite horizon: last value <= tol and no increase over the
/// last quarter of the horizon (increases below 1e-12 relative are ignored).
bool converges_to_zero(const std::vector<double>& values, double tol);

/// Invariant-subspace criterion: conditions 1-2 plus M invariant under every P_k.
template <Scalar S>
CriterionVerdict check_criterion_I(const CriterionInstance<S>& inst, std::size_t horizon,
                                   double tol, const RunOptions& opts = {});

/// Preimage criterion: conditions 1-2 plus P_k(T)x in M for every x in X, k <= horizon.
template <Scalar S>
CriterionVerdict check_criterion_II(const CriterionInstance<S>& inst, std::size_t horizon,
                                    double tol, const RunOptions& opts = {});

/// xi_j = c / (j 2^j), j = 1..j_max.
std::vector<double> xi_schedule(std::size_t j_max, double c);

struct BuildStep {
    std::size_t j = 0;
    std::size_t k = 0;
    double xi = 0.0;
    double bound = 0.0;       ///< achieved step bound, < xi
    double post_error = 0.0;  ///< |P_{k_j}(T)x - y_j| for the final x
    double post_bound = 0.0;  ///< j xi_j + sum_{j < i <= J} xi_i
    bool verified = false;
};

template <Scalar S>
struct BuildResult {
    TruncVector<S> x;
    std::vector<BuildStep> trace;
    bool verified() const;
};

inline constexpr std::size_t kDefaultKStep = 64;

/// Greedy cyclic-vector construction. For j = 1..min(j_max, |Y|) picks the
/// smallest k_j in (k_{j-1}, k_{j-1} + k_step] whose recovery summand x_j lies
/// in M, keeps every P_{k_i}(T) x_j and P_{k_j}(T) x_i in M, and satisfies
///   |x_j| + |P_{k_j}x_j - y_j| + max_{i<j}(|P_{k_j}x_i| + |P_{k_i}x_j|) < xi_j.
/// Returns x = sum x_j with the post-verified bounds.
/// Throws ScheduleInfeasible(j) when no k in range works (a truncation
/// overflow ends the range).
template <Scalar S>
BuildResult<S> build_cyclic_vector(const CriterionInstance<S>& inst, std::size_t j_max, double c,
                                   std::size_t k_step = kDefaultKStep,
                                   const RunOptions& opts = {});

}  // namespace cclab
