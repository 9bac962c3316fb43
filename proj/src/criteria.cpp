#include "cclab/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cclab/error.hpp"
#include "cclab/parallel.hpp"

namespace cclab {

namespace {

std::string str(std::size_t v) { return std::to_string(v); }

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

template <Scalar S>
const RecoveryRule<S>* rule_for(const CriterionInstance<S>& inst, std::size_t y_index) {
    if (auto it = inst.recovery_by_index.find(y_index); it != inst.recovery_by_index.end())
        return &it->second;
    return inst.recovery ? &*inst.recovery : nullptr;
}

/// Number of k with a defined x_k, or nothing when unbounded.
template <Scalar S>
std::optional<std::size_t> recovery_length(const CriterionInstance<S>& inst, std::size_t y_index) {
    const auto* rule = rule_for(inst, y_index);
    if (!rule) {
        if (inst.Y[y_index].is_zero()) return std::nullopt;
        fail(ErrorCode::RecoveryRuleMissing, "no recovery rule for Y[" + str(y_index) + "]");
    }
    if (const auto* op = std::get_if<typename RecoveryRule<S>::OperatorPower>(&rule->kind))
        return op->exponents.length();
    return std::get<typename RecoveryRule<S>::ExplicitList>(rule->kind).vectors.size();
}

void check_horizon(const PolySequence& seq, std::size_t horizon) {
    if (horizon == 0) fail(ErrorCode::InvalidArgument, "horizon must be >= 1");
    if (auto len = seq.length(); len && horizon > *len)
        fail(ErrorCode::InvalidArgument,
             "horizon " + str(horizon) + " exceeds the " + str(*len) + " declared polynomials");
}

/// Condition 1 and 2 series; each slot is written by exactly one worker.
template <Scalar S>
void conditions_one_two(const CriterionInstance<S>& inst, std::size_t horizon, double tol,
                        const RunOptions& opts, CriterionVerdict& v) {
    std::vector<double> c1(horizon, 0.0), xn(horizon, 0.0), err(horizon, 0.0);
    parallel_for(horizon, opts.threads, [&](std::size_t i) {
        const std::size_t k = i + 1;
        const auto pk = poly_at(inst.polys, k);
        for (const auto& x : inst.X) c1[i] = std::max(c1[i], norm(eval_poly(pk, inst.op, x, opts.eval)));
        for (std::size_t y = 0; y < inst.Y.size(); ++y) {
            const auto xk = recover(inst, y, k, opts.eval);
            xn[i] = std::max(xn[i], norm(xk));
            err[i] = std::max(err[i], distance(eval_poly(pk, inst.op, xk, opts.eval), inst.Y[y]));
        }
    });
    v.cond1.series.values = std::move(c1);
    v.cond1.series.pass = converges_to_zero(v.cond1.series.values, tol);
    v.cond1.pass = v.cond1.series.pass;
    v.cond1.worst_tail_norm = v.cond1.series.values.back();

    v.cond2.x_norms.values = std::move(xn);
    v.cond2.x_norms.pass = converges_to_zero(v.cond2.x_norms.values, tol);
    v.cond2.recovery_errors.values = std::move(err);
    v.cond2.recovery_errors.pass = converges_to_zero(v.cond2.recovery_errors.values, tol);
    v.cond2.pass = v.cond2.x_norms.pass && v.cond2.recovery_errors.pass;
    v.cond2.worst_x_norm = v.cond2.x_norms.values.back();
    v.cond2.worst_recovery_error = v.cond2.recovery_errors.values.back();
}

template <Scalar S>
TruncVector<S> sum_into(TruncVector<S> acc, const TruncVector<S>& v) {
    if (acc.dim() < v.dim()) acc = acc.embedded(v.dim());
    if (v.dim() < acc.dim()) return acc += v.embedded(acc.dim());
    return acc += v;
}

}  // namespace

std::optional<std::size_t> ExponentRule::at(std::size_t k) const {
    if (const auto* lin = std::get_if<Linear>(&kind)) return lin->stride * k + lin->offset;
    const auto& vals = std::get<List>(kind).values;
    if (k == 0 || k > vals.size()) return std::nullopt;
    return vals[k - 1];
}

std::optional<std::size_t> ExponentRule::length() const {
    if (std::holds_alternative<Linear>(kind)) return std::nullopt;
    return std::get<List>(kind).values.size();
}

std::optional<ConvexPolynomial> PolySequence::at(std::size_t k) const {
    if (const auto* mp = std::get_if<MonomialPowers>(&kind)) {
        const auto e = mp->exponents.at(k);
        if (!e) return std::nullopt;
        return ConvexPolynomial::monomial(*e);
    }
    const auto& polys = std::get<Explicit>(kind).polys;
    if (k == 0 || k > polys.size()) return std::nullopt;
    return polys[k - 1];
}

std::optional<std::size_t> PolySequence::length() const {
    if (const auto* mp = std::get_if<MonomialPowers>(&kind)) return mp->exponents.length();
    return std::get<Explicit>(kind).polys.size();
}

ConvexPolynomial poly_at(const PolySequence& seq, std::size_t k) {
    auto p = seq.at(k);
    if (!p) fail(ErrorCode::InvalidArgument, "polynomial sequence has no entry k = " + str(k));
    return *p;
}

template <Scalar S>
void validate(const CriterionInstance<S>& inst, double membership_tol) {
    if (inst.dim == 0) fail(ErrorCode::InvalidArgument, "criterion instance needs dim > 0");
    validate(inst.op);
    if (auto len = inst.polys.length(); len && *len == 0)
        fail(ErrorCode::InvalidArgument, "polynomial sequence is empty");
    const auto m = materialize_subspace(inst.subspace, inst.dim);
    auto check = [&](const std::vector<TruncVector<S>>& vs, const char* name) {
        for (std::size_t i = 0; i < vs.size(); ++i) {
            if (vs[i].dim() != inst.dim)
                fail(ErrorCode::DimensionMismatch, std::string(name) + "[" + str(i) + "] has dim " +
                                                       str(vs[i].dim()) + ", expected " + str(inst.dim));
            if (!in_subspace(vs[i], m, membership_tol))
                fail(ErrorCode::InvalidArgument, std::string(name) + "[" + str(i) + "] is not in the subspace");
        }
    };
    check(inst.X, "X");
    check(inst.Y, "Y");
    for (const auto& [idx, rule] : inst.recovery_by_index)
        if (idx >= inst.Y.size())
            fail(ErrorCode::InvalidArgument, "recovery rule for missing Y[" + str(idx) + "]");
}

template <Scalar S>
TruncVector<S> recover(const CriterionInstance<S>& inst, std::size_t y_index, std::size_t k,
                       const EvalOptions& opts) {
    if (y_index >= inst.Y.size()) fail(ErrorCode::InvalidArgument, "Y index out of range");
    const auto& y = inst.Y[y_index];
    const auto* rule = rule_for(inst, y_index);
    if (!rule) {
        if (y.is_zero()) return TruncVector<S>(y.dim(), y.p());
        fail(ErrorCode::RecoveryRuleMissing, "no recovery rule for Y[" + str(y_index) + "]");
    }
    if (const auto* op = std::get_if<typename RecoveryRule<S>::OperatorPower>(&rule->kind)) {
        const auto e = op->exponents.at(k);
        if (!e)
            fail(ErrorCode::RecoveryRuleMissing,
                 "recovery exponents for Y[" + str(y_index) + "] end before k = " + str(k));
        TruncVector<S> out = y;
        for (std::size_t i = 0; i < *e; ++i) out = apply(op->op, out, opts);
        return out;
    }
    const auto& vs = std::get<typename RecoveryRule<S>::ExplicitList>(rule->kind).vectors;
    if (k == 0 || k > vs.size())
        fail(ErrorCode::RecoveryRuleMissing,
             "recovery list for Y[" + str(y_index) + "] has no entry k = " + str(k));
    return vs[k - 1];
}

std::optional<std::size_t> ConditionThree::first_landing_index() const {
    for (const auto& s : steps)
        if (!s.pass) return s.landing_index;
    return std::nullopt;
}

bool converges_to_zero(const std::vector<double>& values, double tol) {
    if (values.empty()) return true;
    for (double v : values)
        if (!std::isfinite(v)) return false;
    if (values.back() > tol) return false;
    const std::size_t h = values.size();
    const std::size_t window = std::max<std::size_t>(1, (h + 3) / 4);
    for (std::size_t i = h > window ? h - window : 1; i < h; ++i) {
        const double prev = values[i - 1];
        if (values[i] > prev + 1e-12 * std::max(1.0, prev)) return false;
    }
    return true;
}

template <Scalar S>
CriterionVerdict check_criterion_I(const CriterionInstance<S>& inst, std::size_t horizon,
                                   double tol, const RunOptions& opts) {
    validate(inst, opts.membership_tol);
    check_horizon(inst.polys, horizon);
    CriterionVerdict v;
    v.kind = CriterionKind::Invariance;
    v.horizon = horizon;
    v.tol = tol;
    conditions_one_two(inst, horizon, tol, opts, v);

    const auto m = materialize_subspace(inst.subspace, inst.dim);
    v.cond3.steps.resize(horizon);
    parallel_for(horizon, opts.threads, [&](std::size_t i) {
        const auto r = invariance_check(poly_at(inst.polys, i + 1), inst.op, m, tol, opts.eval);
        v.cond3.steps[i] = {i + 1, r.invariant, r.max_residual, r.violating_basis_index, r.landing_index};
    });
    v.cond3.pass = std::all_of(v.cond3.steps.begin(), v.cond3.steps.end(),
                               [](const ConditionThreeStep& s) { return s.pass; });
    return v;
}

template <Scalar S>
CriterionVerdict check_criterion_II(const CriterionInstance<S>& inst, std::size_t horizon,
                                    double tol, const RunOptions& opts) {
    validate(inst, opts.membership_tol);
    check_horizon(inst.polys, horizon);
    CriterionVerdict v;
    v.kind = CriterionKind::Preimage;
    v.horizon = horizon;
    v.tol = tol;
    conditions_one_two(inst, horizon, tol, opts, v);

    const auto m = materialize_subspace(inst.subspace, inst.dim);
    v.cond3.steps.resize(horizon);
    parallel_for(horizon, opts.threads, [&](std::size_t i) {
        auto& step = v.cond3.steps[i];
        step.k = i + 1;
        const auto pk = poly_at(inst.polys, i + 1);
        for (std::size_t xi = 0; xi < inst.X.size(); ++xi) {
            const auto img = eval_poly(pk, inst.op, inst.X[xi], opts.eval);
            const double r = offsub_distance(img, m);
            step.max_residual = std::max(step.max_residual, r);
            if (step.pass && r > tol * std::max(1.0, norm(img))) {
                step.pass = false;
                step.violating_source = xi;
                step.landing_index = landing(img, m);
            }
        }
    });
    v.cond3.pass = std::all_of(v.cond3.steps.begin(), v.cond3.steps.end(),
                               [](const ConditionThreeStep& s) { return s.pass; });
    return v;
}

std::vector<double> xi_schedule(std::size_t j_max, double c) {
    if (j_max == 0) fail(ErrorCode::InvalidArgument, "j_max must be >= 1");
    if (!(c > 0.0)) fail(ErrorCode::InvalidArgument, "schedule constant must be positive");
    std::vector<double> xi(j_max);
    for (std::size_t j = 1; j <= j_max; ++j)
        xi[j - 1] = c / (static_cast<double>(j) * std::ldexp(1.0, static_cast<int>(j)));
    return xi;
}

template <Scalar S>
bool BuildResult<S>::verified() const {
    return !trace.empty() &&
           std::all_of(trace.begin(), trace.end(), [](const BuildStep& s) { return s.verified; });
}

template <Scalar S>
BuildResult<S> build_cyclic_vector(const CriterionInstance<S>& inst, std::size_t j_max, double c,
                                   std::size_t k_step, const RunOptions& opts) {
    validate(inst, opts.membership_tol);
    if (inst.Y.empty()) fail(ErrorCode::InvalidArgument, "builder needs a nonempty Y");
    if (k_step == 0) fail(ErrorCode::InvalidArgument, "k_step must be >= 1");
    const std::size_t J = std::min(j_max, inst.Y.size());
    const auto xi = xi_schedule(J, c);
    const auto m = materialize_subspace(inst.subspace, inst.dim);
    const double mtol = opts.membership_tol;

    std::vector<std::size_t> ks;
    std::vector<ConvexPolynomial> pks;
    std::vector<TruncVector<S>> xs;
    std::vector<double> bounds;
    std::size_t k_prev = 0;

    for (std::size_t j = 1; j <= J; ++j) {
        const auto& y = inst.Y[j - 1];
        auto limit = k_prev + k_step;
        if (auto len = inst.polys.length()) limit = std::min(limit, *len);
        if (auto len = recovery_length(inst, j - 1)) limit = std::min(limit, *len);

        double best = std::numeric_limits<double>::infinity();
        bool selected = false;
        for (std::size_t k = k_prev + 1; k <= limit && !selected; ++k) {
            try {
                const auto xj = recover(inst, j - 1, k, opts.eval);
                if (!member(xj, m, mtol)) continue;
                const auto pk = poly_at(inst.polys, k);
                const auto img = eval_poly(pk, inst.op, xj, opts.eval);
                if (!member(img, m, mtol)) continue;
                double cross = 0.0;
                bool ok = true;
                for (std::size_t i = 0; i + 1 < j && ok; ++i) {
                    const auto a = eval_poly(pk, inst.op, xs[i], opts.eval);
                    const auto b = eval_poly(pks[i], inst.op, xj, opts.eval);
                    ok = member(a, m, mtol) && member(b, m, mtol);
                    cross = std::max(cross, norm(a) + norm(b));
                }
                if (!ok) continue;
                const double bound = norm(xj) + distance(img, y) + cross;
                best = std::min(best, bound);
                if (bound < xi[j - 1]) {
                    ks.push_back(k);
                    pks.push_back(pk);
                    xs.push_back(xj);
                    bounds.push_back(bound);
                    selected = true;
                }
            } catch (const Error& e) {
                if (e.code() != ErrorCode::TruncationOverflow) throw;
                break;
            }
        }
        if (!selected) throw ScheduleInfeasible(j, best, xi[j - 1]);
        k_prev = ks.back();
    }

    BuildResult<S> res{TruncVector<S>(inst.dim, inst.p), {}};
    for (const auto& xj : xs) res.x = sum_into(std::move(res.x), xj);
    for (std::size_t j = 1; j <= J; ++j) {
        BuildStep s;
        s.j = j;
        s.k = ks[j - 1];
        s.xi = xi[j - 1];
        s.bound = bounds[j - 1];
        s.post_error = distance(eval_poly(pks[j - 1], inst.op, res.x, opts.eval), inst.Y[j - 1]);
        double tail = 0.0;
        for (std::size_t i = j + 1; i <= J; ++i) tail += xi[i - 1];
        s.post_bound = static_cast<double>(j) * xi[j - 1] + tail;
        s.verified = s.post_error <= s.post_bound;
        res.trace.push_back(s);
    }
    return res;
}

#define CCLAB_INSTANTIATE(S)                                                                      \
    template void validate(const CriterionInstance<S>&, double);                                  \
    template TruncVector<S> recover(const CriterionInstance<S>&, std::size_t, std::size_t,        \
                                    const EvalOptions&);                                          \
    template CriterionVerdict check_criterion_I(const CriterionInstance<S>&, std::size_t, double, \
                                                const RunOptions&);                               \
    template CriterionVerdict check_criterion_II(const CriterionInstance<S>&, std::size_t, double, \
                                                 const RunOptions&);                              \
    template struct BuildResult<S>;                                                               \
    template BuildResult<S> build_cyclic_vector(const CriterionInstance<S>&, std::size_t, double, \
                                                std::size_t, const RunOptions&);

CCLAB_INSTANTIATE(double)
CCLAB_INSTANTIATE(Complex)
#undef CCLAB_INSTANTIATE

}  // namespace cclab
