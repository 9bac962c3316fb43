#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cclab/scalar.hpp"

namespace cclab {

/// First `dim` coordinates of an l^p sequence.
template <Scalar S>
class TruncVector {
public:
    using value_type = S;

    explicit TruncVector(std::size_t dim, double p = 2.0);
    explicit TruncVector(std::vector<S> coords, double p = 2.0);

    /// Canonical basis vector e_index.
    static TruncVector basis(std::size_t dim, std::size_t index, double p = 2.0);

    std::size_t dim() const noexcept { return coords_.size(); }
    double p() const noexcept { return p_; }

    std::span<const S> coords() const noexcept { return coords_; }
    std::span<S> coords() noexcept { return coords_; }

    const S& operator[](std::size_t i) const { return coords_[i]; }
    S& operator[](std::size_t i) { return coords_[i]; }

    bool is_zero() const noexcept;

    /// Zero-padded copy in a larger ambient dimension.
    TruncVector embedded(std::size_t new_dim) const;

    TruncVector& operator+=(const TruncVector& rhs);
    TruncVector& operator-=(const TruncVector& rhs);
    TruncVector& operator*=(const S& s);

    friend TruncVector operator+(TruncVector a, const TruncVector& b) { return a += b; }
    friend TruncVector operator-(TruncVector a, const TruncVector& b) { return a -= b; }
    friend TruncVector operator*(const S& s, TruncVector a) { return a *= s; }

    friend bool operator==(const TruncVector&, const TruncVector&) = default;

private:
    std::vector<S> coords_;
    double p_;
};

/// (sum |c_i|^p)^(1/p)
template <Scalar S>
double norm(const TruncVector<S>& v);

/// norm(a - b) without materializing the difference.
template <Scalar S>
double distance(const TruncVector<S>& a, const TruncVector<S>& b);

extern template class TruncVector<double>;
extern template class TruncVector<Complex>;

}  // namespace cclab
