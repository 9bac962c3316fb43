#include "cclab/operator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cclab/error.hpp"

namespace cclab {

namespace {
std::string str(std::size_t v) { return std::to_string(v); }

template <Scalar S>
OperatorPtr<S> share(OperatorSpec<S> op) {
    return std::make_shared<const OperatorSpec<S>>(std::move(op));
}
}  // namespace

template <Scalar S>
S Weights<S>::at(std::size_t n) const {
    if (per_index.empty()) return constant;
    if (n >= per_index.size())
        fail(ErrorCode::DimensionTooSmall,
             "shift weight list has " + str(per_index.size()) + " entries, index " + str(n) +
                 " requested");
    return per_index[n];
}

template <Scalar S>
OperatorSpec<S> OperatorSpec<S>::backward_shift(S weight) {
    return {BackwardShift<S>{Weights<S>{weight, {}}}};
}

template <Scalar S>
OperatorSpec<S> OperatorSpec<S>::forward_shift(S weight) {
    return {ForwardShift<S>{Weights<S>{weight, {}}}};
}

template <Scalar S>
OperatorSpec<S> OperatorSpec<S>::scaled(S lambda, OperatorSpec inner) {
    return {Scale<S>{lambda, share(std::move(inner))}};
}

template <Scalar S>
OperatorSpec<S> OperatorSpec<S>::direct_sum(std::size_t left_dim, OperatorSpec left,
                                            OperatorSpec right) {
    return {DirectSum<S>{left_dim, share(std::move(left)), share(std::move(right))}};
}

template <Scalar S>
OperatorSpec<S> OperatorSpec<S>::dense(std::size_t n, std::vector<S> entries) {
    return {Dense<S>{n, std::move(entries)}};
}

template <Scalar S>
OperatorSpec<S> OperatorSpec<S>::identity() {
    return {Identity{}};
}

template <Scalar S>
OperatorSpec<S> OperatorSpec<S>::power(OperatorSpec inner, std::size_t exponent) {
    return {Power<S>{share(std::move(inner)), exponent}};
}

namespace {

template <Scalar S>
void validate_weights(const Weights<S>& w) {
    auto ok = [](const S& s) { return is_finite(s) && s != S{}; };
    if (w.per_index.empty()) {
        if (!ok(w.constant)) fail(ErrorCode::InvalidArgument, "shift weight must be finite and nonzero");
    } else {
        for (const auto& s : w.per_index)
            if (!ok(s)) fail(ErrorCode::InvalidArgument, "shift weights must be finite and nonzero");
    }
}

template <Scalar S>
void validate_impl(const OperatorSpec<S>& op) {
    std::visit(
        [](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, BackwardShift<S>> || std::is_same_v<K, ForwardShift<S>>) {
                validate_weights(k.weights);
            } else if constexpr (std::is_same_v<K, Scale<S>>) {
                if (!k.inner) fail(ErrorCode::InvalidArgument, "scale needs an inner operator");
                if (!is_finite(k.lambda)) fail(ErrorCode::InvalidArgument, "scale factor must be finite");
                validate_impl(*k.inner);
            } else if constexpr (std::is_same_v<K, DirectSum<S>>) {
                if (!k.left || !k.right) fail(ErrorCode::InvalidArgument, "direct sum needs two blocks");
                if (k.left_dim == 0) fail(ErrorCode::InvalidArgument, "direct sum needs left_dim > 0");
                validate_impl(*k.left);
                validate_impl(*k.right);
            } else if constexpr (std::is_same_v<K, Dense<S>>) {
                if (k.n == 0 || k.entries.size() != k.n * k.n)
                    fail(ErrorCode::InvalidArgument, "dense operator must be a nonempty square matrix");
                for (const auto& s : k.entries)
                    if (!is_finite(s)) fail(ErrorCode::InvalidArgument, "dense entries must be finite");
            } else if constexpr (std::is_same_v<K, Power<S>>) {
                if (!k.inner) fail(ErrorCode::InvalidArgument, "power needs an inner operator");
                validate_impl(*k.inner);
            }
        },
        op.kind);
}

template <Scalar S>
TruncVector<S> apply_impl(const OperatorSpec<S>& op, const TruncVector<S>& v,
                          const EvalOptions& opts, bool may_grow) {
    return std::visit(
        [&](const auto& k) -> TruncVector<S> {
            using K = std::decay_t<decltype(k)>;
            const std::size_t dim = v.dim();
            if constexpr (std::is_same_v<K, BackwardShift<S>>) {
                TruncVector<S> out(dim, v.p());
                for (std::size_t i = 1; i < dim; ++i)
                    if (v[i] != S{}) out[i - 1] = k.weights.at(i) * v[i];
                return out;
            } else if constexpr (std::is_same_v<K, ForwardShift<S>>) {
                const TruncVector<S>* src = &v;
                TruncVector<S> grown(1, v.p());
                if (v[dim - 1] != S{}) {
                    if (!may_grow || opts.overflow != OverflowPolicy::AutoGrow)
                        fail(ErrorCode::TruncationOverflow,
                             "forward shift moves mass past index " + str(dim - 1));
                    if (dim >= opts.grow_cap)
                        fail(ErrorCode::TruncationOverflow,
                             "forward shift exceeds the growth cap " + str(opts.grow_cap));
                    grown = v.embedded(std::min(opts.grow_cap, 2 * dim));
                    src = &grown;
                }
                const auto& in = *src;
                TruncVector<S> out(in.dim(), in.p());
                for (std::size_t i = 0; i + 1 < in.dim(); ++i)
                    if (in[i] != S{}) out[i + 1] = k.weights.at(i) * in[i];
                return out;
            } else if constexpr (std::is_same_v<K, Scale<S>>) {
                auto out = apply_impl(*k.inner, v, opts, may_grow);
                out *= k.lambda;
                return out;
            } else if constexpr (std::is_same_v<K, DirectSum<S>>) {
                if (k.left_dim >= dim)
                    fail(ErrorCode::DimensionMismatch,
                         "direct sum split " + str(k.left_dim) + " needs dim > split, got " + str(dim));
                const auto c = v.coords();
                TruncVector<S> left(std::vector<S>(c.begin(), c.begin() + k.left_dim), v.p());
                TruncVector<S> right(std::vector<S>(c.begin() + k.left_dim, c.end()), v.p());
                const auto l = apply_impl(*k.left, left, opts, false);
                const auto r = apply_impl(*k.right, right, opts, false);
                TruncVector<S> out(dim, v.p());
                std::copy(l.coords().begin(), l.coords().end(), out.coords().begin());
                std::copy(r.coords().begin(), r.coords().end(), out.coords().begin() + k.left_dim);
                return out;
            } else if constexpr (std::is_same_v<K, Dense<S>>) {
                if (k.n != dim)
                    fail(ErrorCode::DimensionMismatch,
                         "dense operator of size " + str(k.n) + " applied at dim " + str(dim));
                TruncVector<S> out(dim, v.p());
                for (std::size_t r = 0; r < dim; ++r) {
                    S acc{};
                    for (std::size_t col = 0; col < dim; ++col) acc += k.entries[r * dim + col] * v[col];
                    out[r] = acc;
                }
                return out;
            } else if constexpr (std::is_same_v<K, Identity>) {
                return v;
            } else {
                TruncVector<S> out = v;
                for (std::size_t e = 0; e < k.exponent; ++e) out = apply_impl(*k.inner, out, opts, may_grow);
                return out;
            }
        },
        op.kind);
}

/// Largest product of n consecutive |w_t| with t ranging over [lo, hi].
template <Scalar S>
double max_window_product(const Weights<S>& w, std::size_t lo, std::size_t hi, std::size_t n) {
    if (w.per_index.empty()) return std::pow(std::abs(w.constant), static_cast<double>(n));
    double best = 0.0;
    for (std::size_t start = lo; start + n - 1 <= hi; ++start) {
        double prod = 1.0;
        for (std::size_t t = start; t < start + n; ++t) prod *= std::abs(w.at(t));
        best = std::max(best, prod);
    }
    return best;
}

template <Scalar S>
double spectral_norm(const std::vector<S>& a, std::size_t n) {
    std::vector<S> x(n), y(n), z(n);
    double nx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = S{1.0 + 0.01 * std::sin(static_cast<double>(i + 1))};
        nx += std::norm(x[i]);
    }
    nx = std::sqrt(nx);
    for (auto& s : x) s /= nx;
    double est = 0.0;
    for (int it = 0; it < 2000; ++it) {
        double ny = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            S acc{};
            for (std::size_t c = 0; c < n; ++c) acc += a[r * n + c] * x[c];
            y[r] = acc;
            ny += std::norm(acc);
        }
        const double prev = est;
        est = std::sqrt(ny);
        double nz = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
            S acc{};
            for (std::size_t r = 0; r < n; ++r) {
                if constexpr (is_complex_v<S>)
                    acc += std::conj(a[r * n + c]) * y[r];
                else
                    acc += a[r * n + c] * y[r];
            }
            z[c] = acc;
            nz += std::norm(acc);
        }
        if (nz == 0.0) break;
        nz = std::sqrt(nz);
        for (std::size_t c = 0; c < n; ++c) x[c] = z[c] / nz;
        if (it > 0 && std::abs(est - prev) <= 1e-15 * est) break;
    }
    return est;
}

template <Scalar S>
std::vector<S> matmul(const std::vector<S>& a, const std::vector<S>& b, std::size_t n) {
    std::vector<S> out(n * n, S{});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const S aik = a[i * n + k];
            if (aik == S{}) continue;
            for (std::size_t j = 0; j < n; ++j) out[i * n + j] += aik * b[k * n + j];
        }
    return out;
}

template <Scalar S>
double power_norm_impl(const OperatorSpec<S>& op, std::size_t dim, std::size_t n) {
    if (n == 0) return 1.0;
    return std::visit(
        [&](const auto& k) -> double {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, BackwardShift<S>>) {
                // B^n e_j = (w_{j-n+1} ... w_j) e_{j-n} for j >= n.
                if (n >= dim) return 0.0;
                return max_window_product(k.weights, 1, dim - 1, n);
            } else if constexpr (std::is_same_v<K, ForwardShift<S>>) {
                // S^n e_j = (w_j ... w_{j+n-1}) e_{j+n} for j + n < dim.
                if (n >= dim) return 0.0;
                return max_window_product(k.weights, 0, dim - 2, n);
            } else if constexpr (std::is_same_v<K, Scale<S>>) {
                return std::pow(std::abs(k.lambda), static_cast<double>(n)) *
                       power_norm_impl(*k.inner, dim, n);
            } else if constexpr (std::is_same_v<K, DirectSum<S>>) {
                if (k.left_dim >= dim)
                    fail(ErrorCode::DimensionMismatch, "direct sum split needs dim > split");
                return std::max(power_norm_impl(*k.left, k.left_dim, n),
                                power_norm_impl(*k.right, dim - k.left_dim, n));
            } else if constexpr (std::is_same_v<K, Dense<S>>) {
                if (k.n != dim)
                    fail(ErrorCode::DimensionMismatch,
                         "dense operator of size " + str(k.n) + " at dim " + str(dim));
                std::vector<S> pw = k.entries;
                for (std::size_t e = 1; e < n; ++e) pw = matmul(pw, k.entries, dim);
                return spectral_norm(pw, dim);
            } else if constexpr (std::is_same_v<K, Identity>) {
                return 1.0;
            } else {
                return power_norm_impl(*k.inner, dim, n * k.exponent);
            }
        },
        op.kind);
}

}  // namespace

template <Scalar S>
void validate(const OperatorSpec<S>& op) {
    validate_impl(op);
}

template <Scalar S>
TruncVector<S> apply(const OperatorSpec<S>& op, const TruncVector<S>& v, const EvalOptions& opts) {
    return apply_impl(op, v, opts, true);
}

template <Scalar S>
double power_norm(const OperatorSpec<S>& op, std::size_t dim, std::size_t n) {
    if (dim == 0) fail(ErrorCode::InvalidArgument, "dimension must be positive");
    return power_norm_impl(op, dim, n);
}

template <Scalar S>
ScreenReport screen_necessary_conditions(const OperatorSpec<S>& op, std::size_t dim,
                                         std::size_t horizon, double growth_threshold) {
    if (horizon == 0) fail(ErrorCode::InvalidArgument, "screen horizon must be >= 1");
    ScreenReport r;
    r.norm = power_norm(op, dim, 1);
    r.norm_exceeds_one = r.norm > 1.0 + 1e-12;
    r.growth_threshold = growth_threshold;
    for (std::size_t n = 1; n <= horizon; ++n) r.power_norms.push_back(power_norm(op, dim, n));
    r.powers_grow = std::any_of(r.power_norms.begin(), r.power_norms.end(),
                                [&](double v) { return v > growth_threshold; });
    return r;
}

#define CCLAB_INSTANTIATE(S)                                                                       \
    template struct Weights<S>;                                                                    \
    template struct OperatorSpec<S>;                                                               \
    template void validate(const OperatorSpec<S>&);                                                \
    template TruncVector<S> apply(const OperatorSpec<S>&, const TruncVector<S>&, const EvalOptions&); \
    template double power_norm(const OperatorSpec<S>&, std::size_t, std::size_t);                  \
    template ScreenReport screen_necessary_conditions(const OperatorSpec<S>&, std::size_t,         \
                                                      std::size_t, double);

CCLAB_INSTANTIATE(double)
CCLAB_INSTANTIATE(Complex)
#undef CCLAB_INSTANTIATE

}  // namespace cclab
