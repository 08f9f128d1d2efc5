#pragma once

#include "harvest/random.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace harvest {

/// Sorted, distinct feature indices: one candidate model's inputs.
struct FeatureSubset {
  std::vector<std::size_t> indices;

  std::size_t size() const noexcept { return indices.size(); }
  bool contains(std::size_t feature) const;
  friend bool operator==(const FeatureSubset&, const FeatureSubset&) = default;
};

struct SamplingPlan {
  std::size_t n_subsets = 0;
  std::size_t subset_size = 0;
  std::size_t p = 0;
  std::uint64_t seed = 0;

  /// Throws ConfigError unless 1 <= subset_size <= p and n_subsets >= 2.
  void validate() const;
};

/// Smallest n whose expected per-feature coverage n*k/p reaches `target_coverage`.
std::size_t plan_n_for_coverage(std::size_t p, std::size_t k, double target_coverage);

/// n independent uniform k-combinations of {0..p-1}. Subset j comes from its
/// own stream keyed by (seed, j); duplicates across subsets are kept.
std::vector<FeatureSubset> draw_subsets(const SamplingPlan& plan, unsigned workers = 1);

/// One uniform k-combination of {0..p-1} from `eng` (sparse partial
/// Fisher-Yates, O(k) memory).
FeatureSubset draw_combination(Engine& eng, std::size_t p, std::size_t k);

/// For each feature, the ascending positions of the subsets that contain it.
std::vector<std::vector<std::size_t>> membership_index(std::span<const FeatureSubset> subsets,
                                                       std::size_t p);

}  // namespace harvest
