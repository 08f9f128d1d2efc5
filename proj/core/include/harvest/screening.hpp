#pragma once

#include "harvest/dataset.hpp"
#include "harvest/learners.hpp"
#include "harvest/ranktest.hpp"

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace harvest {

/// User settings of a screening run.
struct HarvestConfig {
  double alpha = 0.05;
  std::size_t subset_size = 15;
  // Exactly one of these is set. With target_coverage, n is re-planned per
  // round from the current candidate count.
  std::optional<std::size_t> n_subsets;
  std::optional<double> target_coverage = 100.0;
  LearnerSpec learner;
  Adjustment adjustment = Adjustment::None;
  std::size_t rounds = 1;
  std::uint64_t seed = 0;

  /// Throws ConfigError on violated invariants. The library accepts the
  /// closed range 0 <= alpha <= 1.
  void validate() const;

  /// Subset count for a round over `candidates` features with size k.
  std::size_t subsets_for(std::size_t candidates, std::size_t k) const;
};

enum class StopReason { RoundsExhausted, Stable, PoolTooSmall };
std::string_view to_string(StopReason reason);
StopReason parse_stop_reason(std::string_view text);

struct RoundReport {
  std::size_t round_index = 0;
  std::size_t subset_size = 0;
  std::size_t n_subsets = 0;
  std::uint64_t round_seed = 0;
  std::vector<std::size_t> candidate_features;
  std::vector<FeatureTestResult> results;  // one per candidate, in candidate order
  std::vector<std::size_t> survivors;      // original feature ids, ascending
  std::size_t subsets_trained = 0;
  std::size_t failed_fits = 0;          // scored at the criterion's independence value
  std::size_t unconverged_fits = 0;     // rank-deficient OLS or IRLS cap reached
  std::chrono::nanoseconds wall_time{0};  // not serialized
};

struct SelectedFeature {
  std::size_t index = 0;
  std::string name;
};

struct HarvestReport {
  HarvestConfig config;
  std::vector<RoundReport> rounds;
  std::vector<SelectedFeature> final_features;
  StopReason stop_reason = StopReason::RoundsExhausted;
};

/// Seed of round `round_index` under the run seed.
std::uint64_t round_seed(std::uint64_t seed, std::size_t round_index);

/// One screening pass over `candidates` (original feature ids): draw subsets
/// over the candidate pool, fit one model per subset, rank, test every
/// candidate and keep those with p_adjusted <= alpha. Fits run on `workers`
/// threads; the result does not depend on the worker count.
RoundReport run_round(const Dataset& ds, std::span<const std::size_t> candidates,
                      const HarvestConfig& cfg, std::uint64_t seed, unsigned workers = 1);

/// Subset size for the round after one that kept `survivors` features at size
/// k, or nullopt when the pool is too small to continue.
std::optional<std::size_t> next_subset_size(std::size_t survivors, std::size_t k);

/// Chains rounds: each round screens the previous round's survivors. Stops
/// when cfg.rounds is reached, when a round keeps every candidate, or when the
/// survivor pool is too small for another round.
HarvestReport run(const Dataset& ds, const HarvestConfig& cfg, unsigned workers = 1);

}  // namespace harvest
