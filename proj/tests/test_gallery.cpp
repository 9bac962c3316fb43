#include <doctest.h>

#include <cmath>
#include <set>

#include "cclab/error.hpp"
#include "cclab/gallery.hpp"

using namespace cclab;

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

bool all_ok(const std::vector<CheckOutcome>& outcomes) {
    for (const auto& c : outcomes) {
        INFO(c.check << ": expected " << c.expected << ", got " << c.actual);
        CHECK(c.ok);
        if (!c.ok) return false;
    }
    return !outcomes.empty();
}

}  // namespace

TEST_CASE("every entry reproduces its expectations") {
    for (const auto& entry : gallery_entries()) {
        INFO(entry.name);
        const auto outcomes = verify_expectations(AnyExperiment{entry.experiment});
        if (entry.name == "power-template") {
            CHECK(outcomes.empty());
            CHECK(entry.experiment.expected.empty());
        } else {
            CHECK(all_ok(outcomes));
        }
    }
}

TEST_CASE("entry names are unique and findable") {
    std::set<std::string> names;
    for (const auto& e : gallery_entries()) {
        CHECK(names.insert(e.name).second);
        CHECK(e.name == e.experiment.name);
        CHECK(find_entry(e.name));
    }
    CHECK_FALSE(find_entry("no-such-entry"));
}

TEST_CASE("entries are deterministic") {
    for (const auto& e : gallery_entries()) CHECK(to_json(e.experiment) == to_json(find_entry(e.name)->experiment));
}

TEST_CASE("expected verdicts are consistent") {
    for (const auto& e : gallery_entries()) {
        const auto& x = e.experiment.expected;
        const auto full = ConditionFlags{true, true, true};
        if ((x.criterion_II == full || x.criterion_I == full) && x.build) CHECK(*x.build == BuildExpectation::Succeeds);
        if (x.criterion_II == full && x.density) CHECK(*x.density == DensityVerdict::DenseAtScale);
        if (x.criterion_I == full) CHECK((!x.criterion_II || *x.criterion_II == full));
    }
}

TEST_CASE("direct-sum: confinement at dim 8 and 2") {
    for (std::size_t dim : {8, 2}) {
        const auto ex = entry_direct_sum(dim).experiment;
        const auto x = density_candidate(ex);
        for (const auto& y : orbit_segment(ex.op, x, *ex.family))
            for (std::size_t i = dim / 2; i < dim; ++i) CHECK(y[i] == 0.0);
    }
    CHECK(code_of([] { (void)entry_direct_sum(7); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("direct-sum at dim 16 scores like the standalone 2B block") {
    const auto ex = entry_direct_sum(16).experiment;
    const auto targets = density_targets(ex);
    const auto full = density_of(ex);

    const auto two_b = OperatorSpec<double>::scaled(2.0, OperatorSpec<double>::backward_shift());
    const auto m = materialize_subspace({IndexSet{{0, 1, 2, 3, 4, 5, 6, 7}}}, 8);
    auto cut = [](const TruncVector<double>& v) {
        TruncVector<double> out(8);
        for (std::size_t i = 0; i < 8; ++i) out[i] = v[i];
        return out;
    };
    std::vector<TruncVector<double>> small_targets;
    for (const auto& t : targets) small_targets.push_back(cut(t));
    const auto alone =
        density_score(two_b, cut(density_candidate(ex)), m, *ex.family, small_targets, ex.tolerances.epsilon);
    REQUIRE(alone.per_target.size() == full.per_target.size());
    for (std::size_t t = 0; t < targets.size(); ++t) CHECK(alone.per_target[t] == full.per_target[t]);
    CHECK(alone.verdict == full.verdict);
}

TEST_CASE("direct-sum: the identity block fails the screen") {
    const auto ex = entry_direct_sum().experiment;
    const auto rep = screen_of(ex);
    CHECK_FALSE(rep.passed());
    CHECK(rep.norm == 1.0);
}

TEST_CASE("wide-intervals: widths grow, k_count = 1 degenerates, small dims are rejected") {
    const auto ex = entry_wide_intervals().experiment;
    const auto& iv = std::get<IntervalFamily>(ex.subspace.kind);
    for (std::size_t k = 1; k < iv.starts.size(); ++k) {
        CHECK(iv.ends[k] - iv.starts[k] >= (std::size_t{1} << k));
        if (k + 1 < iv.starts.size()) CHECK(iv.ends[k + 1] - iv.starts[k + 1] > iv.ends[k] - iv.starts[k]);
    }
    const auto one = entry_wide_intervals(1).experiment;
    CHECK(one.criterion->X.empty());
    CHECK(code_of([] { (void)entry_wide_intervals(4, 64); }) == ErrorCode::DimensionTooSmall);
}

TEST_CASE("wide-gaps: gaps exceed the searched degree") {
    const auto ex = entry_wide_gaps().experiment;
    const auto& iv = std::get<IntervalFamily>(ex.subspace.kind);
    for (std::size_t k = 0; k + 1 < iv.starts.size(); ++k) CHECK(iv.starts[k + 1] - iv.ends[k] > 8);
    CHECK(ex.expected.transitivity == TransitivityExpectation::NoneFound);
    CHECK(entry_wide_gaps(2, 8, 256).experiment.expected.transitivity == TransitivityExpectation::AnyFound);
    CHECK(code_of([] { (void)entry_wide_gaps(16, 8, 24); }) == ErrorCode::DimensionTooSmall);
}

TEST_CASE("separation: both widths and gaps grow") {
    const auto ex = entry_separation().experiment;
    const auto& iv = std::get<IntervalFamily>(ex.subspace.kind);
    REQUIRE(iv.starts.size() >= 4);
    for (std::size_t k = 1; k + 1 < iv.starts.size(); ++k) {
        CHECK(iv.ends[k + 1] - iv.starts[k + 1] > iv.ends[k] - iv.starts[k]);
        CHECK(iv.starts[k + 1] - iv.ends[k] > iv.starts[k] - iv.ends[k - 1]);
    }
    CHECK(code_of([] { (void)entry_separation(64); }) == ErrorCode::DimensionTooSmall);
}

TEST_CASE("recursive-counterexample: depth bounds and dims") {
    const auto ex = entry_recursive_counterexample(3).experiment;
    CHECK(ex.dim >= 4 * 14);
    CHECK(materialize_subspace(ex.subspace, ex.dim).indices() ==
          std::vector<std::size_t>{0, 1, 3, 4, 9, 10, 12, 13});
    CHECK(code_of([] { (void)entry_recursive_counterexample(5); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { (void)entry_recursive_counterexample(3, 20); }) == ErrorCode::DimensionTooSmall);
    for (std::size_t d = 1; d <= 4; ++d) CHECK_NOTHROW(verify_expectations(AnyExperiment{entry_recursive_counterexample(d).experiment}));
}

TEST_CASE("even-zero: lambda bounds") {
    CHECK(code_of([] { (void)entry_even_zero(1.0); }) == ErrorCode::LambdaTooSmall);
    CHECK(code_of([] { (void)entry_even_zero(-0.5); }) == ErrorCode::LambdaTooSmall);
    CHECK(code_of([] { (void)entry_even_zero(2.0, 63); }) == ErrorCode::InvalidArgument);
    const auto neg = entry_even_zero(-3.0).experiment;
    CHECK(check_criterion_I(neg.criterion_instance(), 8, 1e-6).all_pass());
}

TEST_CASE("power-template runs without expectations") {
    const auto ex = entry_power_template(3).experiment;
    CHECK(ex.expected.empty());
    CHECK_NOTHROW(density_of(ex));
    CHECK(code_of([] { (void)entry_power_template(0); }) == ErrorCode::InvalidArgument);
}
