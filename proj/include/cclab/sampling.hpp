#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cclab/subspace.hpp"

namespace cclab {

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw; portable
/// across standard libraries unlike std::uniform_real_distribution.
double unit_interval(std::uint64_t bits) noexcept;

/// Radical inverse of `index` in base `base`.
double radical_inverse(std::uint64_t index, std::uint64_t base) noexcept;

/// The first `count` primes.
std::vector<std::uint64_t> first_primes(std::size_t count);

/// Deterministic points of the open M-ball {c + h : h in span(m), |h| < radius}.
/// Sample 0 is the center; the rest are seeded (Cranley-Patterson shifted)
/// Halton points mapped into the ball.
template <Scalar S>
std::vector<TruncVector<S>> ball_samples(const TruncVector<S>& center, const BasisIndexSet& m,
                                         double radius, std::size_t count, std::uint64_t seed);

/// Normalized basis vectors of m (at most count / 2 of them) followed by
/// seeded unit-ball samples, `count` targets in total.
template <Scalar S>
std::vector<TruncVector<S>> default_targets(const BasisIndexSet& m, std::size_t count,
                                            std::uint64_t seed, double p = 2.0);

}  // namespace cclab
