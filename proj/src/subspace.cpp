#include "cclab/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cclab/error.hpp"

namespace cclab {

bool operator==(const DirectSumFactor& a, const DirectSumFactor& b) {
    if (a.position != b.position || a.left_dim != b.left_dim) return false;
    if (!a.inner || !b.inner) return !a.inner && !b.inner;
    return *a.inner == *b.inner;
}

namespace {

std::string str(std::size_t v) { return std::to_string(v); }

void validate_kind(const IndexSet& s) {
    auto sorted = s.indices;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        fail(ErrorCode::InvalidArgument, "index set contains duplicates");
}

void validate_kind(const IntervalFamily& s) {
    if (s.starts.size() != s.ends.size())
        fail(ErrorCode::InvalidArgument, "interval family needs as many starts as ends");
    for (std::size_t k = 0; k < s.starts.size(); ++k) {
        if (!(s.starts[k] < s.ends[k]))
            fail(ErrorCode::InvalidArgument, "interval " + str(k) + " violates n_k < m_k");
        if (k + 1 < s.starts.size() && !(s.ends[k] < s.starts[k + 1]))
            fail(ErrorCode::InvalidArgument, "interval " + str(k) + " violates m_k < n_{k+1}");
    }
}

void validate_kind(const ParityZero&) {}

void validate_kind(const Recursive& s) {
    if (s.shifts.size() < s.depth + 1)
        fail(ErrorCode::InvalidArgument, "recursive subspace needs depth + 1 shifts");
    if (s.shifts.empty() || s.shifts[0] != 0)
        fail(ErrorCode::InvalidArgument, "recursive subspace needs shifts[0] == 0");
    std::size_t sum = 0;
    for (std::size_t k = 0; k + 1 < s.shifts.size(); ++k) {
        sum += s.shifts[k];
        if (!(s.shifts[k + 1] > 2 * sum))
            fail(ErrorCode::InvalidArgument,
                 "recursive shifts violate n_{k+1} > 2 sum n_i at k = " + str(k));
    }
    if (!(s.base_shift_weight != 0.0) || !std::isfinite(s.base_shift_weight))
        fail(ErrorCode::InvalidArgument, "recursive shift weight must be finite and nonzero");
}

void validate_kind(const DirectSumFactor& s) {
    if (s.left_dim == 0) fail(ErrorCode::InvalidArgument, "direct-sum factor needs left_dim > 0");
    if (s.inner) validate(*s.inner);
}

std::vector<std::size_t> support(const SubspaceSpec& spec, std::size_t dim);

std::vector<std::size_t> support_of(const IndexSet& s, std::size_t dim) {
    auto idx = s.indices;
    std::sort(idx.begin(), idx.end());
    if (!idx.empty() && idx.back() >= dim)
        fail(ErrorCode::DimensionTooSmall, "index " + str(idx.back()) + " >= dim " + str(dim));
    return idx;
}

std::vector<std::size_t> support_of(const IntervalFamily& s, std::size_t dim) {
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < s.starts.size(); ++k) {
        if (s.ends[k] >= dim)
            fail(ErrorCode::DimensionTooSmall,
                 "interval end " + str(s.ends[k]) + " >= dim " + str(dim));
        for (std::size_t j = s.starts[k]; j <= s.ends[k]; ++j) idx.push_back(j);
    }
    return idx;
}

std::vector<std::size_t> support_of(const ParityZero& s, std::size_t dim) {
    std::vector<std::size_t> idx;
    const std::size_t first = s.zero == Parity::Even ? 1 : 0;
    for (std::size_t j = first; j < dim; j += 2) idx.push_back(j);
    return idx;
}

std::vector<std::size_t> support_of(const Recursive& s, std::size_t dim) {
    // Each level is M_k together with its copy shifted by n_{k+1}.
    std::vector<std::size_t> idx{0};
    for (std::size_t k = 1; k <= s.depth; ++k) {
        const std::size_t shift = s.shifts[k];
        const std::size_t n = idx.size();
        for (std::size_t i = 0; i < n; ++i) idx.push_back(idx[i] + shift);
    }
    std::sort(idx.begin(), idx.end());
    if (idx.back() >= dim)
        fail(ErrorCode::DimensionTooSmall,
             "recursive subspace reaches index " + str(idx.back()) + " >= dim " + str(dim));
    return idx;
}

std::vector<std::size_t> support_of(const DirectSumFactor& s, std::size_t dim) {
    if (s.left_dim >= dim)
        fail(ErrorCode::DimensionTooSmall,
             "direct sum split " + str(s.left_dim) + " leaves no right block at dim " + str(dim));
    const bool left = s.position == BlockPosition::Left;
    const std::size_t block = left ? s.left_dim : dim - s.left_dim;
    const std::size_t offset = left ? 0 : s.left_dim;
    std::vector<std::size_t> idx;
    if (s.inner) {
        idx = support(*s.inner, block);
    } else {
        idx.resize(block);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
    }
    for (auto& i : idx) i += offset;
    return idx;
}

std::vector<std::size_t> support(const SubspaceSpec& spec, std::size_t dim) {
    return std::visit([dim](const auto& s) { return support_of(s, dim); }, spec.kind);
}

}  // namespace

void validate(const SubspaceSpec& spec) {
    std::visit([](const auto& s) { validate_kind(s); }, spec.kind);
}

BasisIndexSet::BasisIndexSet(std::vector<std::size_t> indices, std::size_t dim)
    : indices_(std::move(indices)), mask_(dim, 0) {
    std::sort(indices_.begin(), indices_.end());
    indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
    for (auto i : indices_) {
        if (i >= dim) fail(ErrorCode::DimensionTooSmall, "basis index " + str(i) + " >= dim " + str(dim));
        mask_[i] = 1;
    }
}

bool BasisIndexSet::is_subset_of(const BasisIndexSet& other) const {
    return std::all_of(indices_.begin(), indices_.end(),
                       [&](std::size_t i) { return other.contains(i); });
}

BasisIndexSet materialize_subspace(const SubspaceSpec& spec, std::size_t dim) {
    validate(spec);
    return BasisIndexSet(support(spec, dim), dim);
}

namespace {
template <Scalar S>
void check_dims(const TruncVector<S>& v, const BasisIndexSet& m) {
    if (v.dim() != m.dim())
        fail(ErrorCode::DimensionMismatch,
             "vector dim " + str(v.dim()) + " vs subspace dim " + str(m.dim()));
}
}  // namespace

template <Scalar S>
TruncVector<S> project(const TruncVector<S>& v, const BasisIndexSet& m) {
    check_dims(v, m);
    TruncVector<S> out(v.dim(), v.p());
    for (auto i : m.indices()) out[i] = v[i];
    return out;
}

template <Scalar S>
double distance_to_subspace(const TruncVector<S>& v, const BasisIndexSet& m) {
    check_dims(v, m);
    TruncVector<S> off = v;
    for (auto i : m.indices()) off[i] = S{};
    return norm(off);
}

template <Scalar S>
bool in_subspace(const TruncVector<S>& v, const BasisIndexSet& m, double tol) {
    return distance_to_subspace(v, m) <= tol * std::max(1.0, norm(v));
}

template <Scalar S>
std::optional<std::size_t> largest_offsubspace_index(const TruncVector<S>& v,
                                                     const BasisIndexSet& m) {
    check_dims(v, m);
    std::optional<std::size_t> best;
    double best_mag = 0.0;
    for (std::size_t i = 0; i < v.dim(); ++i) {
        if (m.contains(i)) continue;
        const double mag = std::abs(v[i]);
        if (mag > best_mag) {
            best_mag = mag;
            best = i;
        }
    }
    return best;
}

#define CCLAB_INSTANTIATE(S)                                                                  \
    template TruncVector<S> project(const TruncVector<S>&, const BasisIndexSet&);            \
    template double distance_to_subspace(const TruncVector<S>&, const BasisIndexSet&);       \
    template bool in_subspace(const TruncVector<S>&, const BasisIndexSet&, double);          \
    template std::optional<std::size_t> largest_offsubspace_index(const TruncVector<S>&,     \
                                                                  const BasisIndexSet&);

CCLAB_INSTANTIATE(double)
CCLAB_INSTANTIATE(Complex)
#undef CCLAB_INSTANTIATE

}  // namespace cclab
