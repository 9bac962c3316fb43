#include "cclab/vector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cclab/error.hpp"

namespace cclab {

namespace {

void check_p(double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) fail(ErrorCode::InvalidArgument, "norm exponent p must be >= 1");
}

template <Scalar S>
double sum_pow(std::span<const S> c, double p) {
    double acc = 0.0;
    if (p == 2.0) {
        for (const auto& x : c) acc += std::norm(x);
    } else if (p == 1.0) {
        for (const auto& x : c) acc += std::abs(x);
    } else {
        for (const auto& x : c) acc += std::pow(std::abs(x), p);
    }
    return acc;
}

double root(double s, double p) {
    if (p == 2.0) return std::sqrt(s);
    if (p == 1.0) return s;
    return std::pow(s, 1.0 / p);
}

}  // namespace

template <Scalar S>
TruncVector<S>::TruncVector(std::size_t dim, double p) : coords_(dim, S{}), p_(p) {
    if (dim == 0) fail(ErrorCode::InvalidArgument, "truncation dimension must be positive");
    check_p(p);
}

template <Scalar S>
TruncVector<S>::TruncVector(std::vector<S> coords, double p) : coords_(std::move(coords)), p_(p) {
    if (coords_.empty()) fail(ErrorCode::InvalidArgument, "truncation dimension must be positive");
    check_p(p);
}

template <Scalar S>
TruncVector<S> TruncVector<S>::basis(std::size_t dim, std::size_t index, double p) {
    if (index >= dim)
        fail(ErrorCode::DimensionTooSmall,
             "basis index " + std::to_string(index) + " >= dim " + std::to_string(dim));
    TruncVector v(dim, p);
    v.coords_[index] = S{1.0};
    return v;
}

template <Scalar S>
bool TruncVector<S>::is_zero() const noexcept {
    return std::all_of(coords_.begin(), coords_.end(), [](const S& x) { return x == S{}; });
}

template <Scalar S>
TruncVector<S> TruncVector<S>::embedded(std::size_t new_dim) const {
    if (new_dim < dim()) fail(ErrorCode::DimensionMismatch, "cannot embed into a smaller dimension");
    TruncVector out(new_dim, p_);
    std::copy(coords_.begin(), coords_.end(), out.coords_.begin());
    return out;
}

template <Scalar S>
TruncVector<S>& TruncVector<S>::operator+=(const TruncVector& rhs) {
    if (rhs.dim() != dim()) fail(ErrorCode::DimensionMismatch, "vector addition across dimensions");
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += rhs.coords_[i];
    return *this;
}

template <Scalar S>
TruncVector<S>& TruncVector<S>::operator-=(const TruncVector& rhs) {
    if (rhs.dim() != dim()) fail(ErrorCode::DimensionMismatch, "vector subtraction across dimensions");
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] -= rhs.coords_[i];
    return *this;
}

template <Scalar S>
TruncVector<S>& TruncVector<S>::operator*=(const S& s) {
    for (auto& x : coords_) x *= s;
    return *this;
}

template <Scalar S>
double norm(const TruncVector<S>& v) {
    return root(sum_pow<S>(v.coords(), v.p()), v.p());
}

template <Scalar S>
double distance(const TruncVector<S>& a, const TruncVector<S>& b) {
    // Shorter vector is read as zero-padded.
    const auto ca = a.coords();
    const auto cb = b.coords();
    const double p = a.p();
    const std::size_t n = std::max(ca.size(), cb.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const S x = (i < ca.size() ? ca[i] : S{}) - (i < cb.size() ? cb[i] : S{});
        if (p == 2.0)
            acc += std::norm(x);
        else if (p == 1.0)
            acc += std::abs(x);
        else
            acc += std::pow(std::abs(x), p);
    }
    return root(acc, p);
}

template class TruncVector<double>;
template class TruncVector<Complex>;
template double norm(const TruncVector<double>&);
template double norm(const TruncVector<Complex>&);
template double distance(const TruncVector<double>&, const TruncVector<double>&);
template double distance(const TruncVector<Complex>&, const TruncVector<Complex>&);

}  // namespace cclab
