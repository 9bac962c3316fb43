#include "cclab/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cclab/error.hpp"

namespace cclab {

double unit_interval(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double radical_inverse(std::uint64_t index, std::uint64_t base) noexcept {
    double result = 0.0;
    double f = 1.0 / static_cast<double>(base);
    double scale = f;
    while (index > 0) {
        result += static_cast<double>(index % base) * scale;
        index /= base;
        scale *= f;
    }
    return result;
}

std::vector<std::uint64_t> first_primes(std::size_t count) {
    std::vector<std::uint64_t> primes;
    primes.reserve(count);
    for (std::uint64_t n = 2; primes.size() < count; ++n) {
        bool prime = true;
        for (auto q : primes) {
            if (q * q > n) break;
            if (n % q == 0) {
                prime = false;
                break;
            }
        }
        if (prime) primes.push_back(n);
    }
    return primes;
}

template <Scalar S>
std::vector<TruncVector<S>> ball_samples(const TruncVector<S>& center, const BasisIndexSet& m,
                                         double radius, std::size_t count, std::uint64_t seed) {
    if (!(radius > 0.0)) fail(ErrorCode::InvalidArgument, "ball radius must be positive");
    if (center.dim() != m.dim())
        fail(ErrorCode::DimensionMismatch, "ball center and subspace dimensions differ");
    std::vector<TruncVector<S>> out;
    if (count == 0) return out;
    out.reserve(count);
    out.push_back(center);
    if (m.empty()) {
        while (out.size() < count) out.push_back(center);
        return out;
    }

    constexpr std::size_t per_coord = is_complex_v<S> ? 2 : 1;
    const std::size_t d = m.size() * per_coord;
    const auto primes = first_primes(d + 1);
    std::mt19937_64 gen(seed);
    std::vector<double> shift(d + 1);
    for (auto& s : shift) s = unit_interval(gen());

    auto coordinate = [&](std::size_t i, std::size_t axis) {
        const double u = radical_inverse(i, primes[axis]) + shift[axis];
        return u - std::floor(u);
    };

    for (std::size_t i = 1; i < count; ++i) {
        TruncVector<S> h(center.dim(), center.p());
        for (std::size_t k = 0; k < m.size(); ++k) {
            const std::size_t idx = m.indices()[k];
            if constexpr (is_complex_v<S>)
                h[idx] = S{2.0 * coordinate(i, 2 * k) - 1.0, 2.0 * coordinate(i, 2 * k + 1) - 1.0};
            else
                h[idx] = 2.0 * coordinate(i, k) - 1.0;
        }
        const double hn = norm(h);
        // Radial coordinate u^(1/d) spreads points evenly in volume; the
        // factor below 1 keeps them strictly inside the open ball.
        const double r = radius * (1.0 - 1e-9) *
                         std::pow(coordinate(i, d), 1.0 / static_cast<double>(d));
        if (hn > 0.0) h *= S{r / hn};
        h += center;
        out.push_back(std::move(h));
    }
    return out;
}

template <Scalar S>
std::vector<TruncVector<S>> default_targets(const BasisIndexSet& m, std::size_t count,
                                            std::uint64_t seed, double p) {
    std::vector<TruncVector<S>> out;
    if (count == 0 || m.empty()) return out;
    const std::size_t nbasis = std::min(m.size(), count / 2);
    for (std::size_t k = 0; k < nbasis; ++k) {
        // Evenly spread over the support rather than the first few indices.
        const std::size_t pos = nbasis == 1 ? 0 : k * (m.size() - 1) / (nbasis - 1);
        out.push_back(TruncVector<S>::basis(m.dim(), m.indices()[pos], p));
    }
    const std::size_t rest = count - nbasis;
    if (rest > 0) {
        auto pts = ball_samples(TruncVector<S>(m.dim(), p), m, 1.0, rest + 1, seed);
        out.insert(out.end(), pts.begin() + 1, pts.end());
    }
    return out;
}

#define CCLAB_INSTANTIATE(S)                                                                     \
    template std::vector<TruncVector<S>> ball_samples(const TruncVector<S>&, const BasisIndexSet&, \
                                                      double, std::size_t, std::uint64_t);       \
    template std::vector<TruncVector<S>> default_targets<S>(const BasisIndexSet&, std::size_t,   \
                                                            std::uint64_t, double);

CCLAB_INSTANTIATE(double)
CCLAB_INSTANTIATE(Complex)
#undef CCLAB_INSTANTIATE

}  // namespace cclab
