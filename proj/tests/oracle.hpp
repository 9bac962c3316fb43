#pragma once

// Dense-matrix reference implementations, written from the operator
// definitions and kept independent of the library's evaluation code.

#include <type_traits>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "cclab/criteria.hpp"

namespace oracle {

using cclab::Complex;
using cclab::OperatorSpec;
using cclab::TruncVector;

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Col = Eigen::Matrix<S, Eigen::Dynamic, 1>;

template <class S>
S weight(const cclab::Weights<S>& w, std::size_t n) {
    return w.per_index.empty() ? w.constant : w.per_index.at(n);
}

/// Matrix of the truncated operator. Forward-shift mass leaving the
/// truncation is dropped; callers keep supports low enough to avoid it.
template <class S>
Mat<S> matrix(const OperatorSpec<S>& op, std::size_t n) {
    Mat<S> a = Mat<S>::Zero(n, n);
    std::visit(
        [&](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, cclab::BackwardShift<S>>) {
                for (std::size_t j = 1; j < n; ++j) a(j - 1, j) = weight(k.weights, j);
            } else if constexpr (std::is_same_v<K, cclab::ForwardShift<S>>) {
                for (std::size_t j = 0; j + 1 < n; ++j) a(j + 1, j) = weight(k.weights, j);
            } else if constexpr (std::is_same_v<K, cclab::Scale<S>>) {
                a = k.lambda * matrix(*k.inner, n);
            } else if constexpr (std::is_same_v<K, cclab::DirectSum<S>>) {
                const auto l = k.left_dim;
                a.topLeftCorner(l, l) = matrix(*k.left, l);
                a.bottomRightCorner(n - l, n - l) = matrix(*k.right, n - l);
            } else if constexpr (std::is_same_v<K, cclab::Dense<S>>) {
                for (std::size_t r = 0; r < n; ++r)
                    for (std::size_t c = 0; c < n; ++c) a(r, c) = k.entries[r * k.n + c];
            } else if constexpr (std::is_same_v<K, cclab::Identity>) {
                a = Mat<S>::Identity(n, n);
            } else {
                const Mat<S> inner = matrix(*k.inner, n);
                a = Mat<S>::Identity(n, n);
                for (std::size_t i = 0; i < k.exponent; ++i) a = inner * a;
            }
        },
        op.kind);
    return a;
}

template <class S>
Col<S> col(const TruncVector<S>& v) {
    Col<S> c(v.dim());
    for (std::size_t i = 0; i < v.dim(); ++i) c(i) = v[i];
    return c;
}

template <class S>
TruncVector<S> vec(const Col<S>& c) {
    std::vector<S> out(c.size());
    for (Eigen::Index i = 0; i < c.size(); ++i) out[i] = c(i);
    return TruncVector<S>(out);
}

/// sum a_i A^i v via explicit matrix powers.
template <class S>
Col<S> poly_apply(const cclab::ConvexPolynomial& p, const Mat<S>& a, const Col<S>& v) {
    const auto n = a.rows();
    Mat<S> power = Mat<S>::Identity(n, n);
    Col<S> out = Col<S>::Zero(n);
    for (std::size_t i = 0; i <= p.degree(); ++i) {
        out += S(p[i]) * (power * v);
        power = a * power;
    }
    return out;
}

template <class S>
double spectral_norm(const Mat<S>& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat<S>> svd(a);
    return svd.singularValues()(0);
}

template <class S>
Mat<S> matrix_power(const Mat<S>& a, std::size_t e) {
    Mat<S> out = Mat<S>::Identity(a.rows(), a.cols());
    for (std::size_t i = 0; i < e; ++i) out = a * out;
    return out;
}

/// |v - P_M v| for the orthogonal projector onto span{e_i : i in idx}.
template <class S>
double offsub(const Col<S>& v, const std::vector<std::size_t>& idx) {
    Mat<S> proj = Mat<S>::Zero(v.size(), v.size());
    for (auto i : idx) proj(i, i) = S(1.0);
    return (v - proj * v).norm();
}

template <class S>
S draw(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    if constexpr (cclab::is_complex_v<S>) {
        const double re = u(rng);
        return S(re, u(rng));
    } else {
        return u(rng);
    }
}

template <class S>
TruncVector<S> random_vector(std::mt19937_64& rng, std::size_t dim, std::size_t support) {
    TruncVector<S> v(dim);
    for (std::size_t i = 0; i < std::min(dim, support); ++i) v[i] = draw<S>(rng);
    return v;
}

inline cclab::ConvexPolynomial random_poly(std::mt19937_64& rng, std::size_t degree) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> c(degree + 1);
    double sum = 0;
    for (auto& x : c) sum += (x = e(rng));
    for (auto& x : c) x /= sum;
    return cclab::ConvexPolynomial(c);
}

/// Random operator; `forward` is set when it may move mass upward, in which
/// case vectors must keep degree-many zero coordinates at the top.
template <class S>
OperatorSpec<S> random_operator(std::mt19937_64& rng, std::size_t dim, bool& forward) {
    std::uniform_int_distribution<int> kind(0, 6);
    std::uniform_real_distribution<double> w(0.5, 2.0);
    auto weights = [&](std::size_t n) {
        cclab::Weights<S> ws;
        for (std::size_t i = 0; i < n; ++i) ws.per_index.push_back(S(w(rng)) * (rng() % 2 ? S(1.0) : S(-1.0)));
        return ws;
    };
    forward = false;
    switch (kind(rng)) {
        case 0: return {cclab::BackwardShift<S>{weights(dim)}};
        case 1: return OperatorSpec<S>::scaled(S(w(rng)), OperatorSpec<S>::backward_shift(S(1.0)));
        case 2:
            forward = true;
            return {cclab::ForwardShift<S>{weights(dim)}};
        case 3: {
            std::vector<S> e(dim * dim);
            for (auto& x : e) x = draw<S>(rng) * (1.0 / std::sqrt(static_cast<double>(dim)));
            return OperatorSpec<S>::dense(dim, e);
        }
        case 4: {
            const std::size_t l = dim / 2;
            std::vector<S> e((dim - l) * (dim - l));
            for (auto& x : e) x = draw<S>(rng);
            return OperatorSpec<S>::direct_sum(l, OperatorSpec<S>::backward_shift(S(2.0)),
                                               OperatorSpec<S>::dense(dim - l, e));
        }
        case 5: return OperatorSpec<S>::power(OperatorSpec<S>::backward_shift(S(w(rng))), 2);
        default: return OperatorSpec<S>::scaled(S(w(rng)), OperatorSpec<S>::identity());
    }
}

template <class S>
double rel_error(const TruncVector<S>& got, const std::type_identity_t<Col<S>>& want) {
    const double diff = (oracle::col(got) - want).norm();
    const double scale = want.norm();
    return scale == 0.0 ? diff : diff / scale;
}

}  // namespace oracle
