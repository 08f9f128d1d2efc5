#include "harvest/sampler.hpp"

#include "harvest/error.hpp"
#include "harvest/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <utility>

namespace harvest {

bool FeatureSubset::contains(std::size_t feature) const {
  return std::binary_search(indices.begin(), indices.end(), feature);
}

void SamplingPlan::validate() const {
  if (subset_size < 1) throw ConfigError("subset size k must be at least 1");
  if (subset_size > p) {
    throw ConfigError("subset size k=" + std::to_string(subset_size) + " exceeds p=" +
                      std::to_string(p));
  }
  if (n_subsets < 2) throw ConfigError("need at least 2 subsets, got " + std::to_string(n_subsets));
}

std::size_t plan_n_for_coverage(std::size_t p, std::size_t k, double target_coverage) {
  if (k < 1) throw ConfigError("subset size k must be at least 1");
  if (k > p) {
    throw ConfigError("subset size k=" + std::to_string(k) + " exceeds p=" + std::to_string(p));
  }
  if (!(target_coverage > 0.0) || !std::isfinite(target_coverage)) {
    throw ConfigError("target coverage must be a positive number");
  }
  const long double exact = static_cast<long double>(target_coverage) * p / k;
  // Treat values within rounding noise of an integer as that integer.
  const long double nearest = std::round(exact);
  if (std::fabs(exact - nearest) <= 1e-9L * std::max(1.0L, nearest)) {
    return static_cast<std::size_t>(nearest);
  }
  return static_cast<std::size_t>(std::ceil(exact));
}

namespace {

// Displaced positions of a virtual permutation of {0..p-1}; linear scan is
// fastest for the small k typical of screening.
class SmallSwapMap {
 public:
  explicit SmallSwapMap(std::size_t k) { entries_.reserve(2 * k); }
  std::size_t get(std::size_t pos) const {
    for (const auto& [where, value] : entries_) {
      if (where == pos) return value;
    }
    return pos;
  }
  void set(std::size_t pos, std::size_t value) {
    for (auto& entry : entries_) {
      if (entry.first == pos) {
        entry.second = value;
        return;
      }
    }
    entries_.emplace_back(pos, value);
  }

 private:
  std::vector<std::pair<std::size_t, std::size_t>> entries_;
};

class HashSwapMap {
 public:
  explicit HashSwapMap(std::size_t k) { entries_.reserve(2 * k); }
  std::size_t get(std::size_t pos) const {
    const auto it = entries_.find(pos);
    return it == entries_.end() ? pos : it->second;
  }
  void set(std::size_t pos, std::size_t value) { entries_[pos] = value; }

 private:
  std::unordered_map<std::size_t, std::size_t> entries_;
};

template <typename SwapMap>
FeatureSubset sparse_fisher_yates(Engine& eng, std::size_t p, std::size_t k) {
  SwapMap perm(k);
  FeatureSubset out;
  out.indices.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_below(eng, p - i));
    const std::size_t vi = perm.get(i);
    const std::size_t vj = perm.get(j);
    perm.set(j, vi);
    perm.set(i, vj);
    out.indices.push_back(vj);
  }
  std::sort(out.indices.begin(), out.indices.end());
  return out;
}

constexpr std::size_t kSmallSubset = 48;

}  // namespace

FeatureSubset draw_combination(Engine& eng, std::size_t p, std::size_t k) {
  if (k > p) {
    throw ConfigError("subset size k=" + std::to_string(k) + " exceeds p=" + std::to_string(p));
  }
  return k <= kSmallSubset ? sparse_fisher_yates<SmallSwapMap>(eng, p, k)
                           : sparse_fisher_yates<HashSwapMap>(eng, p, k);
}

std::vector<FeatureSubset> draw_subsets(const SamplingPlan& plan, unsigned workers) {
  plan.validate();
  std::vector<FeatureSubset> subsets(plan.n_subsets);
  parallel_for(plan.n_subsets, workers, [&](std::size_t j) {
    Engine eng = make_engine(plan.seed, j);
    subsets[j] = draw_combination(eng, plan.p, plan.subset_size);
  });
  return subsets;
}

std::vector<std::vector<std::size_t>> membership_index(std::span<const FeatureSubset> subsets,
                                                       std::size_t p) {
  std::vector<std::vector<std::size_t>> members(p);
  for (std::size_t j = 0; j < subsets.size(); ++j) {
    for (std::size_t f : subsets[j].indices) {
      if (f >= p) {
        throw ConfigError("subset " + std::to_string(j) + " holds feature " + std::to_string(f) +
                          " >= p=" + std::to_string(p));
      }
      members[f].push_back(j);
    }
  }
  return members;
}

}  // namespace harvest
