#include "cclab/gallery.hpp"

#include <bit>
#include <cmath>
#include <functional>

#include "cclab/error.hpp"

namespace cclab {

namespace {

using Vec = TruncVector<double>;
using Op = OperatorSpec<double>;

template <class Entries = std::initializer_list<std::pair<std::size_t, double>>>
Vec sparse(std::size_t dim, const Entries& entries) {
    Vec v(dim);
    for (const auto& [i, x] : entries) {
        if (i >= dim) fail(ErrorCode::DimensionTooSmall, "index " + std::to_string(i) + " >= dim " + std::to_string(dim));
        v[i] = x;
    }
    return v;
}

/// Unweighted forward shift by n, erroring past the truncation.
Vec shifted(const Vec& v, std::size_t n) {
    Vec out(v.dim());
    for (std::size_t i = 0; i < v.dim(); ++i) {
        if (v[i] == 0.0) continue;
        if (i + n >= v.dim())
            fail(ErrorCode::DimensionTooSmall, "shift by " + std::to_string(n) + " leaves dim " + std::to_string(v.dim()));
        out[i + n] = v[i];
    }
    return out;
}

Op twice_backward() { return Op::scaled(2.0, Op::backward_shift()); }

struct Layout {
    std::vector<std::size_t> starts, ends, shifts;  // shifts[j] = N_j for working interval j >= 1
};

constexpr std::size_t kBaseWidth = 4;  // the base interval [0, 3] holds Y

/// Base interval [0, 3] plus working intervals j = 1..k_count with
///   n_j = m_{j-1} + gap(j),  N_j = max(n_j + 1, N_{j-1} + n_j + 1),
///   m_j = N_j + 5 (room for the shifted base block plus slack),
/// or m_j = n_j + 6 when the width is held constant.
Layout widening(std::size_t k_count, const std::function<std::size_t(std::size_t)>& gap, bool constant_width) {
    Layout l;
    l.starts = {0};
    l.ends = {kBaseWidth - 1};
    l.shifts = {0};
    for (std::size_t j = 1; j <= k_count; ++j) {
        const std::size_t n = l.ends.back() + gap(j);
        const std::size_t big_n = std::max(n + 1, l.shifts.back() + n + 1);
        const std::size_t m = constant_width ? n + kBaseWidth + 2 : std::max(big_n + kBaseWidth + 1, n + 2);
        l.starts.push_back(n);
        l.ends.push_back(m);
        l.shifts.push_back(big_n);
    }
    return l;
}

std::vector<Vec> base_targets(std::size_t dim, std::size_t count) {
    std::vector<Vec> all = {sparse(dim, {{0, 0.5}, {1, 0.5}, {2, 0.5}, {3, 0.5}}),
                            sparse(dim, {{1, 0.6}, {3, -0.8}}),
                            sparse(dim, {{2, 1.0}})};
    all.resize(std::min(count, all.size()), Vec(dim));
    return all;
}

/// Criterion block for the widening layouts: P_k = z^{N_k}, x_k = (S/2)^{N_k} y,
/// X = {S^{N_i} y_j : j <= i < k_count}.
CriterionBlock<double> widening_criterion(const Layout& l, std::size_t dim, bool with_x) {
    const std::size_t k_count = l.shifts.size() - 1;
    CriterionBlock<double> c;
    c.Y = base_targets(dim, std::max<std::size_t>(1, std::min<std::size_t>(3, k_count - 1)));
    if (with_x) {
        for (std::size_t i = 1; i < k_count; ++i)
            for (std::size_t j = 0; j < std::min(i, c.Y.size()); ++j) c.X.push_back(shifted(c.Y[j], l.shifts[i]));
    }
    const std::vector<std::size_t> exps(l.shifts.begin() + 1, l.shifts.end());
    c.polys = {PolySequence::MonomialPowers{ExponentRule{ExponentRule::List{exps}}}};
    c.recovery = RecoveryRule<double>{
        RecoveryRule<double>::OperatorPower{Op::forward_shift(0.5), ExponentRule{ExponentRule::List{exps}}}};
    return c;
}

void check_fits(const Layout& l, std::size_t dim) {
    if (l.ends.back() >= dim)
        fail(ErrorCode::DimensionTooSmall, "interval layout reaches index " + std::to_string(l.ends.back()) +
                                               ", dim is " + std::to_string(dim));
}

Experiment<double> base_experiment(const std::string& name, std::size_t dim) {
    Experiment<double> e;
    e.name = name;
    e.dim = dim;
    e.op = twice_backward();
    return e;
}

/// The two cross-gap pairs between interval j and interval j + 1: a ball
/// around 2^gap e_{m_j} against one around e_{n_{j+1}}, and the perturbed pair
/// x = e_{m_j} against x + eps/2 e_{n_{j+1}} with radius eps/4.
void cross_gap_pairs(std::vector<BallPair<double>>& pairs, std::size_t dim, std::size_t m_j, std::size_t n_next) {
    const double gap = static_cast<double>(n_next - m_j);
    constexpr double eps = 0.5;
    pairs.push_back({sparse(dim, {{m_j, std::ldexp(1.0, static_cast<int>(gap))}}), sparse(dim, {{n_next, 1.0}}), 0.25});
    pairs.push_back({sparse(dim, {{m_j, 1.0}}), sparse(dim, {{m_j, 1.0}, {n_next, eps / 2}}), eps / 4});
}

}  // namespace

GalleryEntry entry_direct_sum(std::size_t dim) {
    if (dim < 2 || dim % 2 != 0) fail(ErrorCode::InvalidArgument, "direct-sum needs an even dim >= 2");
    const std::size_t half = dim / 2;
    auto e = base_experiment("direct-sum", dim);
    e.op = Op::direct_sum(half, twice_backward(), Op::identity());
    e.subspace = {DirectSumFactor{BlockPosition::Left, half, nullptr}};
    e.family = PolynomialFamily{Monomials{half, 1}};
    e.screen = ScreenBlock{10, kDefaultGrowthThreshold, BlockPosition::Right};
    e.expected.screen_passes = false;
    e.expected.orbit_confined = true;
    e.description =
        "Orbits of x (+) 0 never leave the first block. The identity block alone fails the norm screen. "
        "X = Y sample finitely supported vectors of the first block, standing in for a dense subset.";

    if (dim >= 128) {
        CriterionBlock<double> c;
        c.Y = {sparse(dim, {{0, 0.8}, {2, -0.6}}), sparse(dim, {{1, 0.5}, {4, 0.5}, {7, 0.5}}),
               sparse(dim, {{3, 1.0}}), sparse(dim, {{5, -0.4}, {6, 0.3}})};
        c.X = c.Y;
        c.polys = {PolySequence::MonomialPowers{ExponentRule{ExponentRule::Linear{1, 0}}}};
        c.recovery = RecoveryRule<double>{RecoveryRule<double>::OperatorPower{
            Op::direct_sum(half, Op::forward_shift(0.5), Op::identity()), ExponentRule{ExponentRule::Linear{1, 0}}}};
        e.criterion = c;
        e.horizon = 24;
        e.build = BuildBlock{4, 1e-2, kDefaultKStep};
        e.density = DensityBlock<double>{BuildCandidate{}, TargetsFromY{}};
        e.expected.criterion_I = ConditionFlags{true, true, true};
        e.expected.build = BuildExpectation::Succeeds;
        e.expected.density = DensityVerdict::DenseAtScale;
    } else {
        e.density = DensityBlock<double>{sparse(dim, {{half - 1, 1.0}}), SampledTargets{8}};
        e.seed = 1;
    }
    return {"direct-sum", "2B (+) I with M the first block: confinement and the norm screen", e};
}

GalleryEntry entry_wide_intervals(std::size_t k_count, std::size_t dim, std::size_t gap) {
    if (k_count == 0) fail(ErrorCode::InvalidArgument, "wide-intervals needs k_count >= 1");
    if (gap < 2) fail(ErrorCode::InvalidArgument, "intervals must be separated (gap >= 2)");
    const auto l = widening(k_count, [gap](std::size_t) { return gap; }, false);
    check_fits(l, dim);
    auto e = base_experiment("wide-intervals", dim);
    e.subspace = {IntervalFamily{l.starts, l.ends}};
    e.criterion = widening_criterion(l, dim, true);
    e.horizon = k_count;
    e.description =
        "Interval widths grow without bound. Y samples the base interval; X collects the shifted copies "
        "S^{N_i} y_j (j <= i), which is how the dense sets are built at infinite scale.";
    if (k_count >= 2) {
        e.family = PolynomialFamily{Monomials{l.shifts.back(), 1}};
        e.build = BuildBlock{e.criterion->Y.size(), 1.0, kDefaultKStep};
        e.density = DensityBlock<double>{BuildCandidate{}, TargetsFromY{}};
        e.expected.criterion_II = ConditionFlags{true, true, true};
        e.expected.criterion_I = ConditionFlags{true, true, false};
        e.expected.build = BuildExpectation::Succeeds;
        e.expected.density = DensityVerdict::DenseAtScale;
    }
    return {"wide-intervals", "2B on geometrically widening intervals: criterion II holds, criterion I does not", e};
}

GalleryEntry entry_constant_intervals(std::size_t k_count, std::size_t dim) {
    if (k_count < 2) fail(ErrorCode::InvalidArgument, "constant-intervals needs k_count >= 2");
    // Width-4 intervals with gaps 2, 3, 4, ... (a fixed gap would make M
    // shift-periodic). x_k = (S/2)^{n_k} y sits on interval k, but the cross
    // images S^{n_j - n_i} y leave M once j > i.
    Layout l;
    l.starts = {0};
    l.ends = {kBaseWidth - 1};
    l.shifts = {0};
    for (std::size_t j = 1; j <= k_count; ++j) {
        const std::size_t n = l.ends.back() + j + 1;
        l.starts.push_back(n);
        l.ends.push_back(n + kBaseWidth - 1);
        l.shifts.push_back(n);
    }
    check_fits(l, dim);
    auto e = base_experiment("constant-intervals", dim);
    e.subspace = {IntervalFamily{l.starts, l.ends}};
    e.criterion = widening_criterion(l, dim, false);
    e.horizon = k_count;
    e.build = BuildBlock{e.criterion->Y.size(), 1.0, kDefaultKStep};
    e.expected.build = BuildExpectation::Infeasible;
    e.description =
        "Intervals of constant width 4. Each x_k fits on its own interval, but no later index keeps the "
        "cross images P_{k_i}(T)x_j inside M, so the builder fails at step 2.";
    return {"constant-intervals", "constant-width intervals: the builder is infeasible", e};
}

GalleryEntry entry_wide_gaps(std::size_t gap, std::size_t max_degree, std::size_t dim) {
    if (gap < 2) fail(ErrorCode::InvalidArgument, "gap must be >= 2");
    std::vector<std::size_t> starts, ends;
    for (std::size_t n = 0; n + kBaseWidth - 1 < dim; n += kBaseWidth - 1 + gap) {
        starts.push_back(n);
        ends.push_back(n + kBaseWidth - 1);
    }
    if (starts.size() < 3) fail(ErrorCode::DimensionTooSmall, "wide-gaps needs three intervals below dim");
    const bool separated = gap > max_degree;
    auto e = base_experiment(separated ? "wide-gaps" : "narrow-gaps", dim);
    e.subspace = {IntervalFamily{starts, ends}};
    e.family = PolynomialFamily{SimplexGrid{max_degree, 4}};
    e.seed = 11;
    TransitivityBlock<double> t;
    t.samples_per_ball = 8;
    cross_gap_pairs(t.pairs, dim, ends[1], starts[2]);
    e.transitivity = t;
    e.expected.transitivity = separated ? TransitivityExpectation::NoneFound : TransitivityExpectation::AnyFound;
    e.description = separated
        ? "Gaps wider than the searched degree: no polynomial maps the sampled balls across a gap while staying in M."
        : "Gaps within the searched degree: 2^gap e_m is hit exactly by z^gap applied to e_n.";
    return {e.name,
            separated ? "2B with gaps wider than the searched degree: no transitivity witness"
                      : "2B with gaps inside the searched degree: a witness exists",
            e};
}

GalleryEntry entry_separation(std::size_t dim) {
    auto gap_of = [](std::size_t j) { return std::size_t{1} << (j + 3); };
    std::size_t k_count = 0;
    while (widening(k_count + 1, gap_of, false).ends.back() < dim) ++k_count;
    if (k_count < 2) fail(ErrorCode::DimensionTooSmall, "separation needs two growing intervals below dim");
    const auto l = widening(k_count, gap_of, false);
    auto e = base_experiment("separation", dim);
    e.subspace = {IntervalFamily{l.starts, l.ends}};
    e.criterion = widening_criterion(l, dim, true);
    e.horizon = k_count;
    e.family = PolynomialFamily{SimplexGrid{8, 4}};
    e.seed = 5;
    TransitivityBlock<double> t;
    t.samples_per_ball = 8;
    for (std::size_t j = 1; j + 1 < l.starts.size(); ++j) cross_gap_pairs(t.pairs, dim, l.ends[j], l.starts[j + 1]);
    e.transitivity = t;
    e.expected.criterion_II = ConditionFlags{true, true, true};
    e.expected.transitivity = TransitivityExpectation::NoneFound;
    e.description =
        "Widths and gaps both grow (gap_j = 2^{j+3}). The preimage criterion holds, so T is M convex-cyclic, "
        "while balls across a gap admit no witness of low degree.";
    return {"separation", "growing widths and gaps: cyclic without being transitive", e};
}

GalleryEntry entry_recursive_counterexample(std::size_t depth, std::optional<std::size_t> dim) {
    if (depth < 1 || depth > 4) fail(ErrorCode::InvalidArgument, "recursive-counterexample needs 1 <= depth <= 4");
    const std::vector<std::size_t> shifts = {0, 1, 3, 9, 27, 81};
    const Recursive rec{std::vector<std::size_t>(shifts.begin(), shifts.begin() + depth + 2), depth, 0.5};
    const SubspaceSpec spec{rec};
    std::size_t max_index = 0;
    for (std::size_t k = 0; k <= depth; ++k) max_index += shifts[k];
    const std::size_t need = std::max(4 * (max_index + 1), shifts[depth + 1] + max_index + 1);
    const std::size_t n = dim.value_or(std::bit_ceil(need));
    if (n < shifts[depth + 1] + max_index + 1)
        fail(ErrorCode::DimensionTooSmall, "recursive-counterexample needs dim >= " +
                                               std::to_string(shifts[depth + 1] + max_index + 1));

    auto e = base_experiment("recursive-counterexample", n);
    e.subspace = spec;
    const auto m = materialize_subspace(spec, n);

    CriterionBlock<double> c;
    const std::vector<std::vector<std::pair<std::size_t, double>>> candidates = {
        {{0, 1.0}}, {{0, 0.5}, {1, 0.5}}, {{0, 0.25}, {1, 0.25}, {3, 0.25}, {4, 0.25}},
        {{0, 0.25}, {4, 0.25}, {9, 0.25}, {13, 0.25}}};
    for (const auto& entries : candidates) {
        if (entries.back().first >= n) continue;
        const auto y = sparse(n, entries);
        if (in_subspace(y, m)) c.Y.push_back(y);
    }
    // X = {S^{n_i} y : y in M_{i-1}}, i = 1..depth.
    for (std::size_t i = 1; i <= depth; ++i) {
        const auto prev = materialize_subspace({Recursive{rec.shifts, i - 1, 0.5}}, n);
        for (const auto& y : c.Y)
            if (in_subspace(y, prev)) {
                Vec x = y;
                for (std::size_t s = 0; s < shifts[i]; ++s) x = apply(Op::forward_shift(0.5), x);
                c.X.push_back(x);
            }
    }
    // P_k = (1 - d) z^{n_k} + d (1 + z + ... + z^{r}) / (r + 1), d = 2^{-n_k}, r = min(2, n_k).
    std::vector<ConvexPolynomial> polys;
    std::vector<std::size_t> exps;
    for (std::size_t k = 1; k <= depth + 1; ++k) {
        const std::size_t nk = shifts[k];
        const double d = std::ldexp(1.0, -static_cast<int>(nk));
        const std::size_t r = std::min<std::size_t>(2, nk);
        std::vector<double> coeffs(nk + 1, 0.0);
        for (std::size_t i = 0; i <= r; ++i) coeffs[i] += d / static_cast<double>(r + 1);
        coeffs[nk] += 1.0 - d;
        polys.emplace_back(std::move(coeffs));
        exps.push_back(nk);
    }
    c.polys = {PolySequence::Explicit{polys}};
    c.recovery = RecoveryRule<double>{
        RecoveryRule<double>::OperatorPower{Op::forward_shift(0.5), ExponentRule{ExponentRule::List{exps}}}};
    e.criterion = c;
    e.horizon = depth + 1;
    if (depth >= 3) {
        e.expected.criterion_I = ConditionFlags{true, true, false};
        e.expected.criterion_II = ConditionFlags{true, true, false};
    }
    e.description =
        "M is built recursively from shifts n = 0, 1, 3, 9, 27, ... P_k puts mass 1 - 2^{-n_k} on z^{n_k} and "
        "spreads the rest over z^0..z^2. Conditions 1-2 hold, yet P_k(T) pushes e_3 onto e_2, which is not in M. "
        "Y samples finitely supported members of M.";
    return {"recursive-counterexample", "recursive subspace: conditions 1-2 hold, condition 3 fails on e_2", e};
}

GalleryEntry entry_even_zero(double lambda, std::size_t dim) {
    if (!(std::abs(lambda) > 1.0))
        fail(ErrorCode::LambdaTooSmall, "even-zero needs |lambda| > 1, got " + std::to_string(lambda));
    if (dim < 16 || dim % 2 != 0) fail(ErrorCode::InvalidArgument, "even-zero needs an even dim >= 16");
    auto e = base_experiment("even-zero", dim);
    e.op = Op::scaled(lambda, Op::backward_shift());
    e.subspace = {ParityZero{Parity::Even}};

    // Odd supports up to index 9, each with weight on e_9 so that the builder
    // spaces its indices past the support, and |y| = 0.05 so that |x_8| =
    // |y| / lambda^16 is below the 1e-6 convergence tolerance for lambda = 2.
    CriterionBlock<double> c;
    c.Y = {sparse(dim, {{1, 0.03}, {9, 0.04}}),
           sparse(dim, {{3, 0.03}, {9, -0.04}}),
           sparse(dim, {{5, -0.03}, {9, 0.04}}),
           sparse(dim, {{1, 0.02}, {5, 0.02}, {7, 0.01}, {9, 0.04}}),
           sparse(dim, {{3, 0.024}, {7, -0.018}, {9, -0.04}}),
           sparse(dim, {{9, 0.05}})};
    c.X = c.Y;
    c.polys = {PolySequence::MonomialPowers{ExponentRule{ExponentRule::Linear{2, 0}}}};
    c.recovery = RecoveryRule<double>{RecoveryRule<double>::OperatorPower{Op::forward_shift(1.0 / lambda),
                                                                         ExponentRule{ExponentRule::Linear{2, 0}}}};
    e.criterion = c;
    e.horizon = 8;
    e.build = BuildBlock{6, 1.0, kDefaultKStep};
    e.family = PolynomialFamily{Monomials{dim, 2}};
    e.density = DensityBlock<double>{BuildCandidate{}, TargetsFromY{}};
    e.screen = ScreenBlock{};
    if (dim >= 64) {
        e.expected.criterion_I = ConditionFlags{true, true, true};
        e.expected.build = BuildExpectation::Succeeds;
        e.expected.density = DensityVerdict::DenseAtScale;
        e.expected.screen_passes = true;
    }
    e.description =
        "T = lambda B keeps zeros on even positions under even powers. X = Y sample finitely supported "
        "odd-position sequences, which are dense in M.";
    return {"even-zero", "lambda B on the even-zero subspace: criterion I holds and the builder succeeds", e};
}

GalleryEntry entry_power_template(std::size_t m, std::size_t dim) {
    if (m == 0) fail(ErrorCode::InvalidArgument, "power-template needs m >= 1");
    auto e = base_experiment("power-template", dim);
    e.op = Op::power(twice_backward(), m);
    e.subspace = {ParityZero{Parity::Even}};
    e.family = PolynomialFamily{Monomials{std::min<std::size_t>(dim, 32), 1}};
    e.density = DensityBlock<double>{sparse(dim, {{1, 0.1}, {dim - 1, 1e-6}}), SampledTargets{16}};
    e.seed = 3;
    e.screen = ScreenBlock{};
    e.description =
        "Experiment template for powers T^m of a subspace convex-cyclic operator. No verdict is expected; "
        "edit the operator exponent, family and candidate and rerun.";
    return {"power-template", "template: density of (2B)^m on the even-zero subspace (no expectations)", e};
}

std::vector<GalleryEntry> gallery_entries() {
    return {entry_direct_sum(),         entry_even_zero(),       entry_recursive_counterexample(),
            entry_wide_intervals(),     entry_constant_intervals(), entry_wide_gaps(),
            entry_wide_gaps(2, 8, 256), entry_separation(),      entry_power_template()};
}

std::optional<GalleryEntry> find_entry(const std::string& name) {
    for (auto& entry : gallery_entries())
        if (entry.name == name) return entry;
    return std::nullopt;
}

}  // namespace cclab
