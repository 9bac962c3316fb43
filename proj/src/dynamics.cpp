#include "cclab/dynamics.hpp"

#include <algorithm>
#include <limits>

#include "cclab/error.hpp"
#include "cclab/parallel.hpp"
#include "cclab/sampling.hpp"

namespace cclab {

namespace {

constexpr double kTieTolerance = 1e-12;
constexpr std::size_t kChunk = 4096;

std::string str(std::size_t v) { return std::to_string(v); }

std::size_t max_degree(const std::vector<ConvexPolynomial>& members) {
    std::size_t d = 0;
    for (const auto& p : members) d = std::max(d, p.degree());
    return d;
}

/// Membership at the vector's own dimension; coordinates past m.dim() (from
/// forward-shift growth) count as off-subspace.
template <Scalar S>
bool member(const TruncVector<S>& v, const BasisIndexSet& m, double tol) {
    if (v.dim() == m.dim()) return in_subspace(v, m, tol);
    return in_subspace(v, BasisIndexSet(m.indices(), v.dim()), tol);
}

template <Scalar S>
double offsub_distance(const TruncVector<S>& v, const BasisIndexSet& m) {
    if (v.dim() == m.dim()) return distance_to_subspace(v, m);
    return distance_to_subspace(v, BasisIndexSet(m.indices(), v.dim()));
}

template <Scalar S>
std::optional<std::size_t> landing(const TruncVector<S>& v, const BasisIndexSet& m) {
    if (v.dim() == m.dim()) return largest_offsubspace_index(v, m);
    return largest_offsubspace_index(v, BasisIndexSet(m.indices(), v.dim()));
}


}  // namespace

std::uint64_t pair_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

template <Scalar S>
std::vector<TruncVector<S>> orbit_segment(const OperatorSpec<S>& op, const TruncVector<S>& x,
                                          const std::vector<ConvexPolynomial>& members,
                                          const EvalOptions& opts) {
    std::vector<TruncVector<S>> out;
    if (members.empty()) return out;
    const PowerCache<S> cache(op, x, max_degree(members), opts);
    out.reserve(members.size());
    for (const auto& p : members) out.push_back(cache.combine(p));
    return out;
}

template <Scalar S>
double DensityReport<S>::worst_distance() const {
    double w = 0.0;
    for (const auto& t : per_target) w = std::max(w, t.best_distance);
    return w;
}

template <Scalar S>
DensityReport<S> density_score(const OperatorSpec<S>& op, const TruncVector<S>& x,
                               const BasisIndexSet& m, const PolynomialFamily& family,
                               const std::vector<TruncVector<S>>& targets, double epsilon,
                               const RunOptions& opts) {
    if (!(epsilon > 0.0)) fail(ErrorCode::InvalidArgument, "epsilon must be positive");
    if (x.dim() != m.dim())
        fail(ErrorCode::DimensionMismatch, "candidate vector and subspace dimensions differ");
    for (std::size_t t = 0; t < targets.size(); ++t) {
        if (targets[t].dim() != m.dim())
            fail(ErrorCode::DimensionMismatch, "target " + str(t) + " has the wrong dimension");
        if (!in_subspace(targets[t], m, opts.membership_tol))
            fail(ErrorCode::TargetOutsideSubspace, "target " + str(t) + " is not in the subspace");
    }

    const auto members = family.enumerate();
    DensityReport<S> rep;
    rep.targets = targets;
    rep.epsilon = epsilon;
    rep.family = family;
    rep.orbit_size = members.size();

    const std::size_t nt = targets.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> best(nt, inf);
    std::vector<std::vector<double>> dists(std::min(kChunk, members.size()));
    std::vector<char> inside(dists.size());
    std::vector<double> all;  // distances of every member, member-major
    std::vector<char> usable;
    all.reserve(members.size() * nt);
    usable.reserve(members.size());

    const PowerCache<S> cache(op, x, members.empty() ? 0 : max_degree(members), opts.eval);
    for (std::size_t base = 0; base < members.size(); base += kChunk) {
        const std::size_t n = std::min(kChunk, members.size() - base);
        parallel_for(n, opts.threads, [&](std::size_t i) {
            const auto pt = cache.combine(members[base + i]);
            inside[i] = member(pt, m, opts.membership_tol);
            dists[i].assign(nt, inf);
            if (!inside[i] && !opts.include_outside) return;
            for (std::size_t t = 0; t < nt; ++t) dists[i][t] = distance(pt, targets[t]);
        });
        for (std::size_t i = 0; i < n; ++i) {
            if (inside[i]) ++rep.orbit_points_in_subspace;
            const bool use = inside[i] || opts.include_outside;
            usable.push_back(use);
            all.insert(all.end(), dists[i].begin(), dists[i].end());
            if (!use) continue;
            for (std::size_t t = 0; t < nt; ++t) best[t] = std::min(best[t], dists[i][t]);
        }
    }

    rep.per_target.resize(nt);
    bool covered = true;
    for (std::size_t t = 0; t < nt; ++t) {
        auto& res = rep.per_target[t];
        res.best_distance = inf;
        if (best[t] < inf) {
            for (std::size_t i = 0; i < members.size(); ++i) {
                if (!usable[i]) continue;
                const double d = all[i * nt + t];
                if (d <= best[t] + kTieTolerance) {
                    res.best_distance = d;
                    res.witness_index = i;
                    res.witness = members[i];
                    break;
                }
            }
        }
        if (!(res.best_distance <= epsilon)) covered = false;
    }
    rep.verdict = covered ? DensityVerdict::DenseAtScale : DensityVerdict::NotCoveredAtScale;
    return rep;
}

template <Scalar S>
InvarianceResult invariance_check(const ConvexPolynomial& p, const OperatorSpec<S>& op,
                                  const BasisIndexSet& m, double tol, const EvalOptions& opts) {
    InvarianceResult res;
    for (auto j : m.indices()) {
        const auto img = eval_poly(p, op, TruncVector<S>::basis(m.dim(), j), opts);
        const double r = offsub_distance(img, m);
        res.max_residual = std::max(res.max_residual, r);
        if (r > tol * std::max(1.0, norm(img)) && res.invariant) {
            res.invariant = false;
            res.violating_basis_index = j;
            res.landing_index = landing(img, m);
        }
    }
    return res;
}

template <Scalar S>
bool TransitivityReport<S>::all_found() const {
    return std::all_of(per_pair.begin(), per_pair.end(), [](const PairResult& r) { return r.found; });
}

template <Scalar S>
bool TransitivityReport<S>::any_found() const {
    return std::any_of(per_pair.begin(), per_pair.end(), [](const PairResult& r) { return r.found; });
}

template <Scalar S>
TransitivityReport<S> transitivity_search(const OperatorSpec<S>& op, const BasisIndexSet& m,
                                          const std::vector<BallPair<S>>& pairs,
                                          const PolynomialFamily& family,
                                          std::size_t samples_per_ball, std::uint64_t seed,
                                          const RunOptions& opts) {
    if (samples_per_ball == 0) fail(ErrorCode::InvalidArgument, "samples_per_ball must be >= 1");
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto& pr = pairs[k];
        if (!(pr.radius > 0.0)) fail(ErrorCode::InvalidArgument, "pair " + str(k) + ": radius must be positive");
        if (pr.u_center.dim() != m.dim() || pr.v_center.dim() != m.dim())
            fail(ErrorCode::DimensionMismatch, "pair " + str(k) + ": ball center dimension differs");
        if (!in_subspace(pr.u_center, m, opts.membership_tol) ||
            !in_subspace(pr.v_center, m, opts.membership_tol))
            fail(ErrorCode::BallCenterOutsideSubspace, "pair " + str(k) + ": ball center is not in the subspace");
    }

    TransitivityReport<S> rep;
    rep.pairs = pairs;
    rep.family = family;
    rep.samples_per_ball = samples_per_ball;
    rep.seed = seed;
    rep.per_pair.resize(pairs.size());

    const auto members = family.enumerate();
    const std::size_t deg = members.empty() ? 0 : max_degree(members);
    parallel_for(pairs.size(), opts.threads, [&](std::size_t k) {
        const auto& pr = pairs[k];
        const auto samples = ball_samples(pr.v_center, m, pr.radius, samples_per_ball, pair_seed(seed, k));
        std::vector<PowerCache<S>> caches;
        caches.reserve(samples.size());
        for (const auto& v : samples) caches.emplace_back(op, v, deg, opts.eval);
        auto& res = rep.per_pair[k];
        for (std::size_t f = 0; f < members.size() && !res.found; ++f) {
            for (std::size_t s = 0; s < samples.size(); ++s) {
                const auto pt = caches[s].combine(members[f]);
                if (!member(pt, m, opts.membership_tol)) continue;
                if (!(distance(pt, pr.u_center) < pr.radius)) continue;
                res.found = true;
                res.witness = members[f];
                res.witness_index = f;
                res.sample_index = s;
                res.invariance_residual =
                    invariance_check(members[f], op, m, opts.membership_tol, opts.eval).max_residual;
                break;
            }
        }
    });
    return rep;
}

#define CCLAB_INSTANTIATE(S)                                                                     \
    template std::vector<TruncVector<S>> orbit_segment(const OperatorSpec<S>&, const TruncVector<S>&, \
                                                       const std::vector<ConvexPolynomial>&,     \
                                                       const EvalOptions&);                      \
    template struct DensityReport<S>;                                                            \
    template DensityReport<S> density_score(const OperatorSpec<S>&, const TruncVector<S>&,       \
                                            const BasisIndexSet&, const PolynomialFamily&,       \
                                            const std::vector<TruncVector<S>>&, double,          \
                                            const RunOptions&);                                  \
    template InvarianceResult invariance_check(const ConvexPolynomial&, const OperatorSpec<S>&,  \
                                               const BasisIndexSet&, double, const EvalOptions&); \
    template struct TransitivityReport<S>;                                                       \
    template TransitivityReport<S> transitivity_search(                                          \
        const OperatorSpec<S>&, const BasisIndexSet&, const std::vector<BallPair<S>>&,           \
        const PolynomialFamily&, std::size_t, std::uint64_t, const RunOptions&);

CCLAB_INSTANTIATE(double)
CCLAB_INSTANTIATE(Complex)
#undef CCLAB_INSTANTIATE

}  // namespace cclab
