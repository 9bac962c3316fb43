#pragma once

#include <cstddef>
#include <memory>
#include <variant>
#include <vector>

#include "cclab/vector.hpp"

namespace cclab {

/// Weight sequence of a shift: `per_index[n]` when given, else `constant`.
template <Scalar S>
struct Weights {
    S constant{1.0};
    std::vector<S> per_index;

    /// Weight attached to source index n. Throws DimensionTooSmall when a
    /// per-index list does not reach n.
    S at(std::size_t n) const;

    friend bool operator==(const Weights&, const Weights&) = default;
};

template <Scalar S>
struct OperatorSpec;

template <Scalar S>
using OperatorPtr = std::shared_ptr<const OperatorSpec<S>>;

/// B e_n = w_n e_{n-1}, B e_0 = 0.
template <Scalar S>
struct BackwardShift {
    Weights<S> weights;
    friend bool operator==(const BackwardShift&, const BackwardShift&) = default;
};

/// S e_n = w_n e_{n+1}.
template <Scalar S>
struct ForwardShift {
    Weights<S> weights;
    friend bool operator==(const ForwardShift&, const ForwardShift&) = default;
};

template <Scalar S>
struct Scale {
    S lambda{1.0};
    OperatorPtr<S> inner;
    friend bool operator==(const Scale& a, const Scale& b) {
        return a.lambda == b.lambda && *a.inner == *b.inner;
    }
};

/// left acts on coordinates [0, left_dim), right on [left_dim, dim).
template <Scalar S>
struct DirectSum {
    std::size_t left_dim = 0;
    OperatorPtr<S> left;
    OperatorPtr<S> right;
    friend bool operator==(const DirectSum& a, const DirectSum& b) {
        return a.left_dim == b.left_dim && *a.left == *b.left && *a.right == *b.right;
    }
};

/// Square matrix, row-major.
template <Scalar S>
struct Dense {
    std::size_t n = 0;
    std::vector<S> entries;
    friend bool operator==(const Dense&, const Dense&) = default;
};

struct Identity {
    friend bool operator==(const Identity&, const Identity&) = default;
};

template <Scalar S>
struct Power {
    OperatorPtr<S> inner;
    std::size_t exponent = 1;
    friend bool operator==(const Power& a, const Power& b) {
        return a.exponent == b.exponent && *a.inner == *b.inner;
    }
};

template <Scalar S>
struct OperatorSpec {
    std::variant<BackwardShift<S>, ForwardShift<S>, Scale<S>, DirectSum<S>, Dense<S>,
                 Identity, Power<S>>
        kind;

    static OperatorSpec backward_shift(S weight = S{1.0});
    static OperatorSpec forward_shift(S weight = S{1.0});
    static OperatorSpec scaled(S lambda, OperatorSpec inner);
    static OperatorSpec direct_sum(std::size_t left_dim, OperatorSpec left, OperatorSpec right);
    static OperatorSpec dense(std::size_t n, std::vector<S> entries);
    static OperatorSpec identity();
    static OperatorSpec power(OperatorSpec inner, std::size_t exponent);

    friend bool operator==(const OperatorSpec&, const OperatorSpec&) = default;
};

/// Throws InvalidArgument on zero/non-finite weights, non-square matrices or
/// missing children.
template <Scalar S>
void validate(const OperatorSpec<S>& op);

enum class OverflowPolicy {
    Error,     ///< forward shifts pushing mass past dim raise TruncationOverflow
    AutoGrow,  ///< re-embed into a larger dimension, up to grow_cap
};

struct EvalOptions {
    OverflowPolicy overflow = OverflowPolicy::Error;
    std::size_t grow_cap = 4096;
};

/// Exact action on the truncation. Backward shifts drop coordinate 0's image;
/// forward shifts raise TruncationOverflow unless the policy allows growth.
/// Growth is never applied inside a DirectSum block.
template <Scalar S>
TruncVector<S> apply(const OperatorSpec<S>& op, const TruncVector<S>& v,
                     const EvalOptions& opts = {});

/// Norm of the n-th power of the truncated operator on `dim` coordinates.
/// Exact for everything built from shifts, scalars, identities and sums
/// (one nonzero per row/column, so the norm is the largest entry for any p).
/// Dense blocks use a power-iteration estimate of the spectral norm.
/// This is the truncation's norm, a lower bound for the full operator.
template <Scalar S>
double power_norm(const OperatorSpec<S>& op, std::size_t dim, std::size_t n);

template <Scalar S>
double operator_norm_estimate(const OperatorSpec<S>& op, std::size_t dim) {
    return power_norm(op, dim, 1);
}

/// Outcome of the two cheap necessary conditions for convex-cyclicity:
/// |T| > 1 and unbounded powers. A failed screen rules the operator out;
/// a passed screen proves nothing.
struct ScreenReport {
    double norm = 0.0;
    bool norm_exceeds_one = false;
    std::vector<double> power_norms;  ///< |T^n| for n = 1..horizon
    double growth_threshold = 0.0;
    bool powers_grow = false;
    bool passed() const { return norm_exceeds_one && powers_grow; }
};

inline constexpr double kDefaultGrowthThreshold = 10.0;

template <Scalar S>
ScreenReport screen_necessary_conditions(const OperatorSpec<S>& op, std::size_t dim,
                                         std::size_t horizon,
                                         double growth_threshold = kDefaultGrowthThreshold);

}  // namespace cclab
