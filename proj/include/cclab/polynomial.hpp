#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cclab/operator.hpp"

namespace cclab {

enum class CoefficientPolicy {
    Nonnegative,  ///< a_i >= 0 (convex combinations of powers)
    Signed,       ///< only the unit-sum constraint
};

/// P(z) = a_0 + a_1 z + ... + a_n z^n with sum a_i = 1 (within 1e-12).
/// Trailing zero coefficients are trimmed on construction, so a_n != 0
/// unless n == 0.
class ConvexPolynomial {
public:
    explicit ConvexPolynomial(std::vector<double> coeffs,
                              CoefficientPolicy policy = CoefficientPolicy::Nonnegative);

    static ConvexPolynomial identity() { return ConvexPolynomial({1.0}); }
    static ConvexPolynomial monomial(std::size_t degree);

    std::size_t degree() const noexcept { return coeffs_.size() - 1; }
    std::span<const double> coeffs() const noexcept { return coeffs_; }
    double operator[](std::size_t i) const noexcept { return i < coeffs_.size() ? coeffs_[i] : 0.0; }

    bool has_negative() const noexcept;

    /// Nonzero (degree, coefficient) pairs in ascending degree.
    std::vector<std::pair<std::size_t, double>> terms() const;

    friend bool operator==(const ConvexPolynomial&, const ConvexPolynomial&) = default;

private:
    std::vector<double> coeffs_;
};

inline constexpr double kUnitSumTolerance = 1e-12;

/// Coefficient convolution (the product P*Q). Convex inputs give a convex output.
ConvexPolynomial compose_polys(const ConvexPolynomial& p, const ConvexPolynomial& q);

/// "1:0.5 3:0.5"-style compact form used in tables.
std::string degree_profile(const ConvexPolynomial& p);

// Finite search families standing in for the set of all convex polynomials.

/// z^0, z^stride, z^(2 stride), ... up to max_degree.
struct Monomials {
    std::size_t max_degree = 0;
    std::size_t stride = 1;
    friend bool operator==(const Monomials&, const Monomials&) = default;
};

/// (1 + z + ... + z^n) / (n + 1) for n = 0..max_degree.
struct CesaroMeans {
    std::size_t max_degree = 0;
    friend bool operator==(const CesaroMeans&, const CesaroMeans&) = default;
};

/// Every coefficient vector with entries k_i / resolution, sum k_i = resolution,
/// i = 0..degree. Lexicographically descending in (k_0, k_1, ...), so the
/// identity comes first.
struct SimplexGrid {
    std::size_t degree = 0;
    std::size_t resolution = 1;
    friend bool operator==(const SimplexGrid&, const SimplexGrid&) = default;
};

/// `count` points drawn uniformly from the simplex of dimension degree + 1.
struct RandomSimplex {
    std::size_t degree = 0;
    std::size_t count = 0;
    std::uint64_t seed = 0;
    friend bool operator==(const RandomSimplex&, const RandomSimplex&) = default;
};

struct ExplicitFamily {
    std::vector<ConvexPolynomial> members;
    friend bool operator==(const ExplicitFamily&, const ExplicitFamily&) = default;
};

struct PolynomialFamily {
    std::variant<Monomials, CesaroMeans, SimplexGrid, RandomSimplex, ExplicitFamily> kind;

    /// Deterministic given the fields (including the seed).
    std::vector<ConvexPolynomial> enumerate() const;
    std::string describe() const;

    friend bool operator==(const PolynomialFamily&, const PolynomialFamily&) = default;
};

/// Upper bound on enumerated family size.
inline constexpr std::size_t kMaxFamilySize = 2'000'000;

/// sum a_i T^i v, accumulated in ascending degree with a running power vector
/// (one operator application per degree step).
template <Scalar S>
TruncVector<S> eval_poly(const ConvexPolynomial& p, const OperatorSpec<S>& op,
                         const TruncVector<S>& v, const EvalOptions& opts = {});

/// T^0 v, T^1 v, ... up to max_degree, truncated once the power vanishes.
/// combine() over these powers is bit-identical to eval_poly.
template <Scalar S>
class PowerCache {
public:
    PowerCache(const OperatorSpec<S>& op, const TruncVector<S>& v, std::size_t max_degree,
               const EvalOptions& opts = {});

    TruncVector<S> combine(const ConvexPolynomial& p) const;
    std::size_t stored() const noexcept { return powers_.size(); }
    const TruncVector<S>& power(std::size_t i) const { return powers_[i]; }

private:
    std::vector<TruncVector<S>> powers_;
    bool exhausted_ = false;  ///< a power vanished before max_degree
};

}  // namespace cclab
