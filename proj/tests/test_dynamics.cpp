#include <doctest.h>

#include <cmath>

#include "cclab/error.hpp"
#include "cclab/gallery.hpp"
#include "cclab/sampling.hpp"
#include "oracle.hpp"
#include "properties.hpp"

using namespace cclab;
using Op = OperatorSpec<double>;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidArgument;
}

const Op two_b = Op::scaled(2.0, Op::backward_shift());

TruncVector<double> e(std::size_t dim, std::size_t i, double s = 1.0) { return s * TruncVector<double>::basis(dim, i); }

}  // namespace

TEST_CASE("orbit_segment: identity family, 2B on e_3, direct-sum confinement") {
    const auto x = e(8, 3);
    const auto id = orbit_segment(two_b, x, PolynomialFamily{ExplicitFamily{{ConvexPolynomial::identity()}}});
    REQUIRE(id.size() == 1);
    CHECK(id[0] == x);

    const auto orb = orbit_segment(two_b, x, PolynomialFamily{Monomials{3, 1}});
    REQUIRE(orb.size() == 4);
    const auto a = oracle::matrix(two_b, 8);
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(orb[k] == e(8, 3 - k, std::ldexp(1.0, static_cast<int>(k))));
        CHECK(oracle::rel_error(orb[k], oracle::matrix_power(a, k) * oracle::col(x)) == 0.0);
    }

    props::Outcome o;
    for (std::size_t s = 0; s < 100; ++s) props::confinement_case(o, s);
    INFO(props::summary(o));
    CHECK(o.ok());
}

TEST_CASE("density: target equal to x scores 0") {
    const auto m = materialize_subspace({ParityZero{Parity::Even}}, 16);
    const auto x = e(16, 5) + e(16, 7, 0.5);
    const auto rep = density_score(two_b, x, m, PolynomialFamily{Monomials{4, 2}}, {x}, 1e-3);
    CHECK(rep.per_target[0].best_distance == 0.0);
    CHECK(rep.per_target[0].witness == ConvexPolynomial::identity());
    CHECK(rep.verdict == DensityVerdict::DenseAtScale);
}

TEST_CASE("density: identity orbit is {x}") {
    const auto m = materialize_subspace({IndexSet{{1, 3}}}, 8);
    const auto rep = density_score(Op::identity(), e(8, 1), m, PolynomialFamily{SimplexGrid{3, 2}}, {e(8, 3)}, 0.5);
    CHECK(rep.per_target[0].best_distance == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(rep.verdict == DensityVerdict::NotCoveredAtScale);
    CHECK(rep.orbit_points_in_subspace == rep.orbit_size);
}

TEST_CASE("density: points outside M are excluded unless asked") {
    const auto m = materialize_subspace({ParityZero{Parity::Even}}, 8);
    // x = e_3; odd powers land on even indices, outside M
    const auto x = e(8, 3);
    const auto fam = PolynomialFamily{ExplicitFamily{{ConvexPolynomial::monomial(1)}}};
    const auto rep = density_score(two_b, x, m, fam, {e(8, 1)}, 0.1);
    CHECK(std::isinf(rep.per_target[0].best_distance));
    CHECK_FALSE(rep.per_target[0].witness.has_value());
    CHECK(rep.orbit_points_in_subspace == 0);
    RunOptions loose;
    loose.include_outside = true;
    const auto rep2 = density_score(two_b, x, m, fam, {e(8, 1)}, 0.1, loose);
    CHECK(rep2.per_target[0].best_distance == doctest::Approx(std::sqrt(5.0)));
}

TEST_CASE("density: witness replay and tie-breaking") {
    std::mt19937_64 rng(4);
    const std::size_t dim = 24;
    const auto m = materialize_subspace({ParityZero{Parity::Even}}, dim);
    const auto x = project(oracle::random_vector<double>(rng, dim, dim), m);
    const PolynomialFamily fam{SimplexGrid{4, 4}};
    const auto targets = default_targets<double>(m, 10, 77);
    RunOptions opts;
    opts.include_outside = true;
    const auto rep = density_score(two_b, x, m, fam, targets, 0.5, opts);
    const auto members = fam.enumerate();
    for (std::size_t t = 0; t < targets.size(); ++t) {
        const auto& r = rep.per_target[t];
        REQUIRE(r.witness);
        CHECK(*r.witness == members[*r.witness_index]);
        CHECK(std::abs(distance(eval_poly(*r.witness, two_b, x), targets[t]) - r.best_distance) <= 1e-10);
        double min = INFINITY;
        std::size_t first = 0;
        for (std::size_t i = 0; i < members.size(); ++i) {
            const double d = distance(eval_poly(members[i], two_b, x), targets[t]);
            min = std::min(min, d);
        }
        for (std::size_t i = 0; i < members.size(); ++i)
            if (distance(eval_poly(members[i], two_b, x), targets[t]) <= min + 1e-12) {
                first = i;
                break;
            }
        CHECK(*r.witness_index == first);
        CHECK((rep.verdict == DensityVerdict::DenseAtScale) == (rep.worst_distance() <= 0.5));
    }
}

TEST_CASE("density: errors") {
    const auto m = materialize_subspace({IndexSet{{1}}}, 4);
    const PolynomialFamily fam{Monomials{2, 1}};
    CHECK(code_of([&] { (void)density_score(two_b, e(4, 1), m, fam, {e(4, 2)}, 0.1); }) ==
          ErrorCode::TargetOutsideSubspace);
    CHECK(code_of([&] { (void)density_score(two_b, e(4, 1), m, fam, {e(4, 1)}, 0.0); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { (void)density_score(two_b, e(5, 1), m, fam, {e(4, 1)}, 0.1); }) ==
          ErrorCode::DimensionMismatch);
}

TEST_CASE("density on the even-zero instance with even monomials up to degree 16") {
    // Y supported low enough that indices k <= 8 suffice for the builder.
    auto ex = entry_even_zero(2.0, 64).experiment;
    ex.criterion->Y = {e(64, 1, 0.008), e(64, 1, 0.004) + e(64, 3, 0.006), e(64, 3, -0.01)};
    ex.criterion->X = ex.criterion->Y;
    const auto inst = ex.criterion_instance();
    const auto built = build_cyclic_vector(inst, 3, 1e-2);
    for (const auto& s : built.trace) CHECK(s.k <= 8);
    const auto m = materialize_subspace(inst.subspace, 64);
    const auto rep = density_score(inst.op, built.x, m, PolynomialFamily{Monomials{16, 2}}, inst.Y, 1e-3);
    CHECK(rep.verdict == DensityVerdict::DenseAtScale);
}

TEST_CASE("density monotone under family enlargement (property)") {
    props::Outcome o;
    for (std::size_t s = 0; s < 120; ++s) props::monotonicity_case(o, s);
    INFO(props::summary(o));
    CHECK(o.ok());
}

TEST_CASE("invariance_check examples") {
    const auto lam_b = Op::scaled(3.0, Op::backward_shift());
    const auto even_zero = materialize_subspace({ParityZero{Parity::Even}}, 32);
    CHECK(invariance_check(ConvexPolynomial::monomial(2), lam_b, even_zero).invariant);
    const auto odd = invariance_check(ConvexPolynomial::monomial(1), lam_b, even_zero);
    CHECK_FALSE(odd.invariant);
    CHECK(odd.violating_basis_index == std::optional<std::size_t>(1));
    CHECK(odd.landing_index == std::optional<std::size_t>(0));
    CHECK(odd.max_residual == doctest::Approx(3.0));

    const auto m2 = materialize_subspace({Recursive{{0, 1, 3, 9}, 2, 0.5}}, 16);
    REQUIRE(m2.indices() == std::vector<std::size_t>{0, 1, 3, 4});
    const auto r = invariance_check(ConvexPolynomial({0.25, 0.25, 0.5}), two_b, m2);
    CHECK_FALSE(r.invariant);
    CHECK(r.violating_basis_index == std::optional<std::size_t>(3));
    const auto on_e4 = eval_poly(ConvexPolynomial({0.25, 0.25, 0.5}), two_b, e(16, 4));
    CHECK(on_e4[2] != 0.0);
    CHECK_FALSE(m2.contains(2));
}

TEST_CASE("invariance composes") {
    std::mt19937_64 rng(12);
    const auto m = materialize_subspace({ParityZero{Parity::Even}}, 32);
    for (int t = 0; t < 100; ++t) {
        auto even_poly = [&] {
            std::vector<double> c(2 * (1 + rng() % 4) + 1, 0.0);
            double s = 0;
            for (std::size_t i = 0; i < c.size(); i += 2) s += (c[i] = 0.1 + oracle::draw<double>(rng) * 0.05 + 0.1);
            for (auto& x : c) x /= s;
            return ConvexPolynomial(c);
        };
        const auto p = even_poly(), q = even_poly();
        REQUIRE(invariance_check(p, two_b, m).invariant);
        REQUIRE(invariance_check(q, two_b, m).invariant);
        CHECK(invariance_check(compose_polys(p, q), two_b, m).invariant);
    }
}

TEST_CASE("ball samples stay in the relatively open M-ball") {
    const auto m = materialize_subspace({IntervalFamily{{2, 10}, {5, 12}}}, 16);
    const auto c = e(16, 3) + e(16, 11, 0.5);
    const auto s = ball_samples(c, m, 0.25, 40, 5);
    REQUIRE(s.size() == 40);
    CHECK(s[0] == c);
    for (const auto& v : s) {
        CHECK(distance(v, c) < 0.25);
        CHECK(distance_to_subspace(v, m) == 0.0);
    }
    CHECK(ball_samples(c, m, 0.25, 40, 5) == s);
    CHECK(ball_samples(c, m, 0.25, 40, 6) != s);
    CHECK(code_of([&] { (void)ball_samples(c, m, 0.0, 4, 1); }) == ErrorCode::InvalidArgument);

    const auto t = default_targets<double>(m, 8, 3);
    REQUIRE(t.size() == 8);
    CHECK(t[0] == e(16, 2));
    for (const auto& v : t) CHECK(in_subspace(v, m));
    CHECK(radical_inverse(1, 2) == 0.5);
    CHECK(radical_inverse(3, 3) == doctest::Approx(1.0 / 9));
    CHECK(first_primes(5) == std::vector<std::uint64_t>{2, 3, 5, 7, 11});
}

TEST_CASE("transitivity: same ball with identity is found") {
    const auto m = materialize_subspace({ParityZero{Parity::Even}}, 16);
    const auto x = e(16, 3);
    const auto rep = transitivity_search(two_b, m, {{x, x, 0.1}}, PolynomialFamily{Monomials{3, 1}}, 4, 1);
    REQUIRE(rep.per_pair.size() == 1);
    CHECK(rep.per_pair[0].found);
    CHECK(rep.per_pair[0].witness == ConvexPolynomial::identity());
    CHECK(rep.per_pair[0].invariance_residual == 0.0);
    CHECK(code_of([&] {
              (void)transitivity_search(two_b, m, {{e(16, 2), x, 0.1}}, PolynomialFamily{Monomials{1, 1}}, 4, 1);
          }) == ErrorCode::BallCenterOutsideSubspace);
}

TEST_CASE("transitivity: wide gap blocks, narrow gap allows") {
    const auto wide = entry_wide_gaps(16, 8, 256).experiment;
    const auto m = materialize_subspace(wide.subspace, wide.dim);
    const auto rep = transitivity_search(wide.op, m, wide.transitivity->pairs, *wide.family, 8, 11);
    CHECK_FALSE(rep.any_found());
    for (const auto& p : rep.per_pair) CHECK_FALSE(p.witness);

    const auto narrow = entry_wide_gaps(2, 8, 256).experiment;
    const auto mn = materialize_subspace(narrow.subspace, narrow.dim);
    const auto rn = transitivity_search(narrow.op, mn, narrow.transitivity->pairs, *narrow.family, 8, 11);
    CHECK(rn.any_found());
    for (const auto& p : rn.per_pair) CHECK(p.found == p.witness.has_value());
}

TEST_CASE("transitivity: degree-0 family finds iff U and V meet") {
    const auto m = materialize_subspace({IndexSet{{0, 1, 2}}}, 4);
    const PolynomialFamily id{Monomials{0, 1}};
    const auto far = transitivity_search(two_b, m, {{e(4, 0), e(4, 2), 0.5}}, id, 16, 3);
    CHECK_FALSE(far.any_found());
    const auto near = transitivity_search(two_b, m, {{e(4, 0), e(4, 0) + e(4, 1, 0.1), 0.5}}, id, 16, 3);
    CHECK(near.all_found());
}

TEST_CASE("transitivity: separation entry within one interval finds witnesses") {
    const auto sep = entry_separation(1024).experiment;
    const auto m = materialize_subspace(sep.subspace, sep.dim);
    const auto& iv = std::get<IntervalFamily>(sep.subspace.kind);
    std::vector<BallPair<double>> pairs;
    for (std::size_t j = 1; j < iv.starts.size(); ++j) {
        const auto n = iv.starts[j];
        pairs.push_back({e(1024, n, 2.0), e(1024, n + 1), 0.25});
    }
    const auto rep = transitivity_search(sep.op, m, pairs, *sep.family, 8, 5);
    CHECK(rep.all_found());
}

TEST_CASE("transitivity matches a brute-force oracle at dim 4") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 30; ++t) {
        std::vector<double> ent(16);
        for (auto& x : ent) x = oracle::draw<double>(rng) * 1.5;
        const auto op = Op::dense(4, ent);
        const auto m = materialize_subspace({IndexSet{{0, 1, 2, 3}}}, 4);
        const auto u = oracle::random_vector<double>(rng, 4, 4), v = oracle::random_vector<double>(rng, 4, 4);
        const PolynomialFamily fam{SimplexGrid{2, 3}};
        const double radius = 0.6;
        const auto rep = transitivity_search(op, m, {{u, v, radius}}, fam, 6, t);
        bool brute = false;
        const auto a = oracle::matrix(op, 4);
        for (const auto& p : fam.enumerate())
            for (const auto& s : ball_samples(v, m, radius, 6, pair_seed(t, 0))) {
                const oracle::Col<double> img = oracle::poly_apply(p, a, oracle::col(s));
                brute = brute || (img - oracle::col(u)).norm() < radius - 1e-12;
            }
        CHECK(rep.per_pair[0].found == brute);
    }
}
