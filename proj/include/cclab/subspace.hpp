#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "cclab/vector.hpp"

namespace cclab {

/// Default relative zero test for subspace membership:
/// distance_to_subspace(v) <= tol * max(1, |v|).
inline constexpr double kMembershipTolerance = 1e-9;

struct SubspaceSpec;

/// span{e_i : i in indices}
struct IndexSet {
    std::vector<std::size_t> indices;
    friend bool operator==(const IndexSet&, const IndexSet&) = default;
};

/// span{e_j : starts[k] <= j <= ends[k]}, with starts[k] < ends[k] < starts[k+1].
struct IntervalFamily {
    std::vector<std::size_t> starts;
    std::vector<std::size_t> ends;
    friend bool operator==(const IntervalFamily&, const IntervalFamily&) = default;
};

enum class Parity { Even, Odd };

/// Sequences vanishing on every position of the given parity.
struct ParityZero {
    Parity zero = Parity::Even;
    friend bool operator==(const ParityZero&, const ParityZero&) = default;
};

/// M_0 = span{e_0}, M_{k+1} = M_k (+) S^{shifts[k+1]} M_k with S e_n = w e_{n+1}.
/// shifts[0] == 0 and shifts[k+1] > 2 * (shifts[0] + ... + shifts[k]).
struct Recursive {
    std::vector<std::size_t> shifts;
    std::size_t depth = 0;
    double base_shift_weight = 0.5;
    friend bool operator==(const Recursive&, const Recursive&) = default;
};

enum class BlockPosition { Left, Right };

/// One factor of H = H_left (+) H_right, with the other factor zero.
/// `inner` is materialized inside the chosen block; null means the whole block.
struct DirectSumFactor {
    BlockPosition position = BlockPosition::Left;
    std::size_t left_dim = 0;
    std::shared_ptr<const SubspaceSpec> inner;
    friend bool operator==(const DirectSumFactor& a, const DirectSumFactor& b);
};

struct SubspaceSpec {
    std::variant<IndexSet, IntervalFamily, ParityZero, Recursive, DirectSumFactor> kind;
    friend bool operator==(const SubspaceSpec&, const SubspaceSpec&) = default;
};

/// Checks the dimension-independent invariants; throws InvalidArgument.
void validate(const SubspaceSpec& spec);

/// Sorted basis-index support of a subspace at a fixed truncation.
class BasisIndexSet {
public:
    BasisIndexSet(std::vector<std::size_t> indices, std::size_t dim);

    std::size_t dim() const noexcept { return mask_.size(); }
    std::size_t size() const noexcept { return indices_.size(); }
    bool empty() const noexcept { return indices_.empty(); }
    const std::vector<std::size_t>& indices() const noexcept { return indices_; }
    bool contains(std::size_t i) const noexcept { return i < mask_.size() && mask_[i]; }

    bool is_subset_of(const BasisIndexSet& other) const;

    friend bool operator==(const BasisIndexSet& a, const BasisIndexSet& b) {
        return a.indices_ == b.indices_ && a.mask_.size() == b.mask_.size();
    }

private:
    std::vector<std::size_t> indices_;
    std::vector<char> mask_;
};

/// Basis indices spanning M intersected with the first `dim` coordinates.
/// Throws DimensionTooSmall when the spec names an index >= dim.
BasisIndexSet materialize_subspace(const SubspaceSpec& spec, std::size_t dim);

/// Keeps the coordinates listed in m and zeroes the rest.
template <Scalar S>
TruncVector<S> project(const TruncVector<S>& v, const BasisIndexSet& m);

/// |v - project(v)|, i.e. the norm of the off-subspace coordinates.
template <Scalar S>
double distance_to_subspace(const TruncVector<S>& v, const BasisIndexSet& m);

template <Scalar S>
bool in_subspace(const TruncVector<S>& v, const BasisIndexSet& m,
                 double tol = kMembershipTolerance);

/// Off-subspace coordinate of largest magnitude (lowest index on ties), or
/// nothing when v has no off-subspace mass.
template <Scalar S>
std::optional<std::size_t> largest_offsubspace_index(const TruncVector<S>& v,
                                                     const BasisIndexSet& m);

}  // namespace cclab
