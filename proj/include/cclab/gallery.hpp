#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cclab/commands.hpp"

namespace cclab {

/// A named, parameterized instance with its expected verdicts. All gallery
/// entries run over the real field.
struct GalleryEntry {
    std::string name;
    std::string summary;
    Experiment<double> experiment;
};

/// T = 2B on the left block, identity on the right; M is the left block.
/// The criterion, builder and density blocks need dim >= 128.
GalleryEntry entry_direct_sum(std::size_t dim = 128);

/// T = 2B, M spanned by intervals whose widths grow geometrically.
/// `gap` is the number of indices between consecutive intervals plus one.
GalleryEntry entry_wide_intervals(std::size_t k_count = 4, std::size_t dim = 512, std::size_t gap = 2);

/// T = 2B on width-4 intervals with gaps 2, 3, 4, ...;
/// the builder runs out of room at step 2.
GalleryEntry entry_constant_intervals(std::size_t k_count = 4, std::size_t dim = 512);

/// T = 2B, width-4 intervals separated by `gap`, searched with polynomials of
/// degree <= max_degree.
GalleryEntry entry_wide_gaps(std::size_t gap = 16, std::size_t max_degree = 8, std::size_t dim = 256);

/// Widths and gaps both grow: criterion II holds while transitivity fails.
GalleryEntry entry_separation(std::size_t dim = 1024);

/// T = 2B on the recursive subspace with shifts {0, 1, 3, 9, 27, 81}.
/// Default dim is the power of two covering 4x the largest index of M and
/// the largest forward shift used by the recovery rule.
GalleryEntry entry_recursive_counterexample(std::size_t depth = 3, std::optional<std::size_t> dim = {});

/// T = lambda B on sequences vanishing at even positions. Throws
/// LambdaTooSmall when |lambda| <= 1.
GalleryEntry entry_even_zero(double lambda = 2.0, std::size_t dim = 64);

/// T = (2B)^m on the even-zero subspace, with no expected verdicts.
GalleryEntry entry_power_template(std::size_t m = 2, std::size_t dim = 64);

/// Every entry at its default parameters, in listing order.
std::vector<GalleryEntry> gallery_entries();

std::optional<GalleryEntry> find_entry(const std::string& name);

}  // namespace cclab
