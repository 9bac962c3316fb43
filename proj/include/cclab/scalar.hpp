#pragma once

#include <cmath>
#include <complex>
#include <concepts>
#include <string_view>

namespace cclab {

using Complex = std::complex<double>;

/// The two scalar fields an experiment can run over.
template <class T>
concept Scalar = std::same_as<T, double> || std::same_as<T, Complex>;

enum class ScalarField { Real, Complex };

template <class T>
inline constexpr bool is_complex_v = std::same_as<T, Complex>;

template <Scalar S>
constexpr ScalarField field_of() {
    return is_complex_v<S> ? ScalarField::Complex : ScalarField::Real;
}

inline std::string_view to_string(ScalarField f) {
    return f == ScalarField::Real ? "real" : "complex";
}

template <Scalar S>
inline bool is_finite(const S& s) {
    if constexpr (is_complex_v<S>)
        return std::isfinite(s.real()) && std::isfinite(s.imag());
    else
        return std::isfinite(s);
}

}  // namespace cclab
