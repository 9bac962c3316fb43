#include "cclab/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "cclab/error.hpp"

namespace cclab {

ConvexPolynomial::ConvexPolynomial(std::vector<double> coeffs, CoefficientPolicy policy)
    : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) fail(ErrorCode::InvalidArgument, "polynomial needs at least one coefficient");
    double sum = 0.0;
    for (double c : coeffs_) {
        if (!std::isfinite(c)) fail(ErrorCode::InvalidArgument, "polynomial coefficients must be finite");
        if (policy == CoefficientPolicy::Nonnegative && c < 0.0)
            fail(ErrorCode::InvalidArgument, "negative coefficient in a convex polynomial");
        sum += c;
    }
    if (std::abs(sum - 1.0) > kUnitSumTolerance) {
        std::ostringstream os;
        os.precision(17);
        os << "polynomial coefficients sum to " << sum << ", expected 1";
        fail(ErrorCode::InvalidArgument, os.str());
    }
    while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
}

ConvexPolynomial ConvexPolynomial::monomial(std::size_t degree) {
    std::vector<double> c(degree + 1, 0.0);
    c[degree] = 1.0;
    return ConvexPolynomial(std::move(c));
}

bool ConvexPolynomial::has_negative() const noexcept {
    return std::any_of(coeffs_.begin(), coeffs_.end(), [](double c) { return c < 0.0; });
}

std::vector<std::pair<std::size_t, double>> ConvexPolynomial::terms() const {
    std::vector<std::pair<std::size_t, double>> out;
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        if (coeffs_[i] != 0.0) out.emplace_back(i, coeffs_[i]);
    return out;
}

ConvexPolynomial compose_polys(const ConvexPolynomial& p, const ConvexPolynomial& q) {
    std::vector<double> c(p.degree() + q.degree() + 1, 0.0);
    for (std::size_t i = 0; i <= p.degree(); ++i)
        for (std::size_t j = 0; j <= q.degree(); ++j) c[i + j] += p[i] * q[j];
    const auto policy = (p.has_negative() || q.has_negative()) ? CoefficientPolicy::Signed
                                                               : CoefficientPolicy::Nonnegative;
    return ConvexPolynomial(std::move(c), policy);
}

std::string degree_profile(const ConvexPolynomial& p) {
    std::ostringstream os;
    bool first = true;
    for (const auto& [d, c] : p.terms()) {
        if (!first) os << ' ';
        os << d << ':' << c;
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

namespace {

std::size_t checked_count(double n) {
    if (n > static_cast<double>(kMaxFamilySize))
        fail(ErrorCode::InvalidArgument,
             "polynomial family would have more than " + std::to_string(kMaxFamilySize) + " members");
    return static_cast<std::size_t>(n);
}

double binomial(std::size_t n, std::size_t k) {
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

void simplex_grid(const SimplexGrid& g, std::vector<ConvexPolynomial>& out) {
    if (g.resolution == 0) fail(ErrorCode::InvalidArgument, "simplex grid resolution must be >= 1");
    out.reserve(checked_count(binomial(g.resolution + g.degree, g.degree)));
    std::vector<std::size_t> k(g.degree + 1, 0);
    const double res = static_cast<double>(g.resolution);
    // Depth-first, largest leading entry first.
    auto rec = [&](auto&& self, std::size_t pos, std::size_t left) -> void {
        if (pos == g.degree) {
            k[pos] = left;
            std::vector<double> c(k.size());
            for (std::size_t i = 0; i < k.size(); ++i) c[i] = static_cast<double>(k[i]) / res;
            out.emplace_back(std::move(c));
            return;
        }
        for (std::size_t v = left + 1; v-- > 0;) {
            k[pos] = v;
            self(self, pos + 1, left - v);
        }
    };
    rec(rec, 0, g.resolution);
}

double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace

std::vector<ConvexPolynomial> PolynomialFamily::enumerate() const {
    std::vector<ConvexPolynomial> out;
    std::visit(
        [&](const auto& f) {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, Monomials>) {
                if (f.stride == 0) fail(ErrorCode::InvalidArgument, "monomial stride must be >= 1");
                checked_count(static_cast<double>(f.max_degree / f.stride + 1));
                for (std::size_t d = 0; d <= f.max_degree; d += f.stride)
                    out.push_back(ConvexPolynomial::monomial(d));
            } else if constexpr (std::is_same_v<F, CesaroMeans>) {
                checked_count(static_cast<double>(f.max_degree) + 1);
                for (std::size_t n = 0; n <= f.max_degree; ++n)
                    out.emplace_back(std::vector<double>(n + 1, 1.0 / static_cast<double>(n + 1)));
            } else if constexpr (std::is_same_v<F, SimplexGrid>) {
                simplex_grid(f, out);
            } else if constexpr (std::is_same_v<F, RandomSimplex>) {
                checked_count(static_cast<double>(f.count));
                std::mt19937_64 gen(f.seed);
                for (std::size_t i = 0; i < f.count; ++i) {
                    std::vector<double> c(f.degree + 1);
                    double sum = 0.0;
                    for (auto& x : c) {
                        x = -std::log1p(-uniform01(gen));
                        sum += x;
                    }
                    if (sum == 0.0) {
                        c.assign(c.size(), 0.0);
                        c[0] = 1.0;
                        sum = 1.0;
                    }
                    for (auto& x : c) x /= sum;
                    out.emplace_back(std::move(c));
                }
            } else {
                checked_count(static_cast<double>(f.members.size()));
                out = f.members;
            }
        },
        kind);
    return out;
}

std::string PolynomialFamily::describe() const {
    std::ostringstream os;
    std::visit(
        [&](const auto& f) {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, Monomials>)
                os << "monomials(max_degree=" << f.max_degree << ", stride=" << f.stride << ")";
            else if constexpr (std::is_same_v<F, CesaroMeans>)
                os << "cesaro(max_degree=" << f.max_degree << ")";
            else if constexpr (std::is_same_v<F, SimplexGrid>)
                os << "simplex_grid(degree=" << f.degree << ", resolution=" << f.resolution << ")";
            else if constexpr (std::is_same_v<F, RandomSimplex>)
                os << "random_simplex(degree=" << f.degree << ", count=" << f.count
                   << ", seed=" << f.seed << ")";
            else
                os << "explicit(" << f.members.size() << " members)";
        },
        kind);
    return os.str();
}

namespace {

// Shared by eval_poly and PowerCache::combine so both round identically.
template <Scalar S>
void accumulate(TruncVector<S>& acc, double coeff, const TruncVector<S>& pw) {
    if (acc.dim() < pw.dim()) acc = acc.embedded(pw.dim());
    auto a = acc.coords();
    const auto b = pw.coords();
    const S c{coeff};
    for (std::size_t i = 0; i < b.size(); ++i) a[i] += c * b[i];
}

template <Scalar S>
TruncVector<S> start(double a0, const TruncVector<S>& v) {
    TruncVector<S> acc = v;
    acc *= S{a0};
    return acc;
}

}  // namespace

template <Scalar S>
TruncVector<S> eval_poly(const ConvexPolynomial& p, const OperatorSpec<S>& op,
                         const TruncVector<S>& v, const EvalOptions& opts) {
    TruncVector<S> acc = start(p[0], v);
    TruncVector<S> pw = v;
    for (std::size_t i = 1; i <= p.degree(); ++i) {
        pw = apply(op, pw, opts);
        if (pw.is_zero()) break;
        if (p[i] == 0.0) continue;
        accumulate(acc, p[i], pw);
    }
    return acc;
}

template <Scalar S>
PowerCache<S>::PowerCache(const OperatorSpec<S>& op, const TruncVector<S>& v,
                          std::size_t max_degree, const EvalOptions& opts) {
    powers_.reserve(max_degree + 1);
    powers_.push_back(v);
    for (std::size_t i = 1; i <= max_degree; ++i) {
        auto next = apply(op, powers_.back(), opts);
        if (next.is_zero()) {
            exhausted_ = true;
            break;
        }
        powers_.push_back(std::move(next));
    }
}

template <Scalar S>
TruncVector<S> PowerCache<S>::combine(const ConvexPolynomial& p) const {
    if (p.degree() >= powers_.size() && !exhausted_)
        fail(ErrorCode::InvalidArgument, "polynomial degree " + std::to_string(p.degree()) +
                                             " exceeds the cached powers");
    TruncVector<S> acc = start(p[0], powers_[0]);
    for (std::size_t i = 1; i <= p.degree() && i < powers_.size(); ++i) {
        if (p[i] == 0.0) continue;
        accumulate(acc, p[i], powers_[i]);
    }
    return acc;
}

template TruncVector<double> eval_poly(const ConvexPolynomial&, const OperatorSpec<double>&,
                                       const TruncVector<double>&, const EvalOptions&);
template TruncVector<Complex> eval_poly(const ConvexPolynomial&, const OperatorSpec<Complex>&,
                                        const TruncVector<Complex>&, const EvalOptions&);
template class PowerCache<double>;
template class PowerCache<Complex>;

}  // namespace cclab
