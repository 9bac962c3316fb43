#pragma once

// Seeded property checks shared by the doctest suite and the acceptance
// binary. Each returns the number of cases run and the first failure.

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>

#include "cclab/criteria.hpp"
#include "cclab/sampling.hpp"
#include "oracle.hpp"

namespace props {

using namespace cclab;

struct Outcome {
    std::size_t cases = 0;
    std::size_t failures = 0;
    std::string first_failure;

    bool ok() const { return failures == 0 && cases > 0; }
    void record(bool pass, std::size_t seed, const std::string& what) {
        ++cases;
        if (pass) return;
        if (failures++ == 0) first_failure = "seed " + std::to_string(seed) + ": " + what;
    }
};

inline SubspaceSpec random_subspace(std::mt19937_64& rng, std::size_t dim) {
    switch (rng() % 3) {
        case 0: {
            IndexSet s;
            for (std::size_t i = 0; i < dim; ++i)
                if (rng() % 2) s.indices.push_back(i);
            return {s};
        }
        case 1: {
            IntervalFamily f;
            std::size_t at = rng() % 3;
            while (at + 1 < dim) {
                const std::size_t end = std::min(dim - 1, at + 1 + rng() % 4);
                f.starts.push_back(at);
                f.ends.push_back(end);
                at = end + 2 + rng() % 3;
            }
            if (f.starts.empty()) return {IndexSet{{0}}};
            return {f};
        }
        default: return {ParityZero{rng() % 2 ? Parity::Even : Parity::Odd}};
    }
}

template <Scalar S>
void projection_case(Outcome& out, std::size_t seed) {
    std::mt19937_64 rng(seed);
    const std::size_t dim = 2 + rng() % 40;
    const auto m = materialize_subspace(random_subspace(rng, dim), dim);
    const auto v = oracle::random_vector<S>(rng, dim, dim);
    const auto pv = project(v, m);
    const bool idempotent = project(pv, m) == pv && distance_to_subspace(pv, m) == 0.0;
    out.record(idempotent, seed, "projection is not idempotent");
}

template <Scalar S>
void pythagoras_case(Outcome& out, std::size_t seed) {
    std::mt19937_64 rng(seed);
    const std::size_t dim = 2 + rng() % 40;
    const auto m = materialize_subspace(random_subspace(rng, dim), dim);
    const auto v = oracle::random_vector<S>(rng, dim, dim);
    const double whole = norm(v), inside = norm(project(v, m)), off = distance_to_subspace(v, m);
    const double gap = std::abs(whole * whole - (inside * inside + off * off));
    out.record(gap <= 1e-10 * std::max(1.0, whole * whole), seed, "|v|^2 differs from |Pv|^2 + |v - Pv|^2");
}

/// Compose closure plus the evaluation identity (P*Q)(T)v = P(T)(Q(T)v).
inline void compose_case(Outcome& out, std::size_t seed) {
    std::mt19937_64 rng(seed);
    const auto p = oracle::random_poly(rng, rng() % 6);
    const auto q = oracle::random_poly(rng, rng() % 6);
    const auto pq = compose_polys(p, q);
    double sum = 0.0;
    bool nonneg = true;
    for (double c : pq.coeffs()) {
        sum += c;
        nonneg = nonneg && c >= 0.0;
    }
    const bool convex = nonneg && std::abs(sum - 1.0) <= kUnitSumTolerance && pq.degree() == p.degree() + q.degree();
    const std::size_t dim = 16;
    const auto op = OperatorSpec<double>::scaled(1.5, OperatorSpec<double>::backward_shift());
    const auto v = oracle::random_vector<double>(rng, dim, dim);
    const auto lhs = eval_poly(pq, op, v);
    const auto rhs = eval_poly(p, op, eval_poly(q, op, v));
    const bool same = distance(lhs, rhs) <= 1e-10 * std::max(1.0, norm(rhs));
    out.record(convex && same, seed, convex ? "composite does not act as P(T)Q(T)" : "composite is not convex");
}

/// x (+) 0 stays in the first block under every family member, exactly.
inline void confinement_case(Outcome& out, std::size_t seed) {
    std::mt19937_64 rng(seed);
    const std::size_t half = 2 + rng() % 16;
    bool forward = false;
    auto left = oracle::random_operator<double>(rng, half, forward);
    if (forward) left = OperatorSpec<double>::backward_shift(2.0);
    bool unused = false;
    const auto right = oracle::random_operator<double>(rng, half, unused);
    const auto op = OperatorSpec<double>::direct_sum(half, left, right);
    TruncVector<double> x(2 * half);
    for (std::size_t i = 0; i < half; ++i) x[i] = oracle::draw<double>(rng);
    const PolynomialFamily fam{RandomSimplex{6, 8, seed}};
    bool zero = true;
    for (const auto& y : orbit_segment(op, x, fam))
        for (std::size_t i = half; i < 2 * half; ++i) zero = zero && y[i] == 0.0;
    out.record(zero, seed, "orbit leaked into the second block");
}

/// Enlarging the family never increases a target's best distance.
inline void monotonicity_case(Outcome& out, std::size_t seed) {
    std::mt19937_64 rng(seed);
    const std::size_t dim = 8 + rng() % 24;
    const auto op = OperatorSpec<double>::scaled(1.0 + static_cast<double>(rng() % 3), OperatorSpec<double>::backward_shift());
    const auto m = materialize_subspace({ParityZero{Parity::Even}}, dim);
    auto x = project(oracle::random_vector<double>(rng, dim, dim), m);
    std::vector<TruncVector<double>> targets;
    for (int t = 0; t < 4; ++t) targets.push_back(project(oracle::random_vector<double>(rng, dim, dim), m));
    std::vector<ConvexPolynomial> big;
    for (int i = 0; i < 12; ++i) big.push_back(oracle::random_poly(rng, rng() % 8));
    const std::size_t cut = 1 + rng() % big.size();
    const PolynomialFamily small_f{ExplicitFamily{{big.begin(), big.begin() + cut}}};
    const PolynomialFamily big_f{ExplicitFamily{big}};
    RunOptions opts;
    opts.include_outside = seed % 2 == 0;
    const auto a = density_score(op, x, m, small_f, targets, 0.1, opts);
    const auto b = density_score(op, x, m, big_f, targets, 0.1, opts);
    bool mono = true;
    for (std::size_t t = 0; t < targets.size(); ++t)
        mono = mono && b.per_target[t].best_distance <= a.per_target[t].best_distance;
    out.record(mono, seed, "best distance grew under a larger family");
}

/// Reports are identical for 1 and 4 worker threads.
inline void determinism_case(Outcome& out, std::size_t seed) {
    std::mt19937_64 rng(seed);
    const std::size_t dim = 16 + rng() % 32;
    const auto op = OperatorSpec<double>::scaled(2.0, OperatorSpec<double>::backward_shift());
    const auto m = materialize_subspace({ParityZero{Parity::Even}}, dim);
    const auto x = project(oracle::random_vector<double>(rng, dim, dim), m);
    const auto targets = default_targets<double>(m, 6, seed);
    // More members than one work chunk, so the parallel path runs.
    const PolynomialFamily fam{RandomSimplex{5, 9000, seed}};
    RunOptions one, many;
    many.threads = 4;
    const auto d1 = density_score(op, x, m, fam, targets, 0.05, one);
    const auto d4 = density_score(op, x, m, fam, targets, 0.05, many);

    std::vector<BallPair<double>> pairs;
    for (int i = 0; i < 3; ++i)
        pairs.push_back({project(oracle::random_vector<double>(rng, dim, 6), m),
                         project(oracle::random_vector<double>(rng, dim, 6), m), 0.5});
    const PolynomialFamily small{SimplexGrid{3, 3}};
    const auto t1 = transitivity_search(op, m, pairs, small, 4, seed, one);
    const auto t4 = transitivity_search(op, m, pairs, small, 4, seed, many);
    out.record(d1 == d4 && t1 == t4, seed, "reports differ between 1 and 4 threads");
}

inline std::string summary(const Outcome& o) {
    std::ostringstream s;
    s << o.cases << " cases";
    if (o.failures) s << ", " << o.failures << " failed (" << o.first_failure << ")";
    return s.str();
}

}  // namespace props
