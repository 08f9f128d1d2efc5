#include "harvest/screening.hpp"

#include "harvest/error.hpp"
#include "harvest/parallel.hpp"
#include "harvest/random.hpp"
#include "harvest/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

namespace harvest {

void HarvestConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
  if (subset_size < 2) throw ConfigError("subset_size must be at least 2");
  if (n_subsets.has_value() == target_coverage.has_value()) {
    throw ConfigError("exactly one of n_subsets and target_coverage must be set");
  }
  if (n_subsets && *n_subsets < 2) throw ConfigError("n_subsets must be at least 2");
  if (target_coverage && !(*target_coverage > 0.0 && std::isfinite(*target_coverage))) {
    throw ConfigError("target_coverage must be positive");
  }
  if (rounds < 1) throw ConfigError("rounds must be at least 1");
  learner.validate();
}

std::size_t HarvestConfig::subsets_for(std::size_t candidates, std::size_t k) const {
  if (n_subsets) return *n_subsets;
  return std::max<std::size_t>(2, plan_n_for_coverage(candidates, k, *target_coverage));
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::RoundsExhausted:
      return "rounds_exhausted";
    case StopReason::Stable:
      return "stable";
    case StopReason::PoolTooSmall:
      return "pool_too_small";
  }
  return "rounds_exhausted";
}

StopReason parse_stop_reason(std::string_view text) {
  if (text == "rounds_exhausted") return StopReason::RoundsExhausted;
  if (text == "stable") return StopReason::Stable;
  if (text == "pool_too_small") return StopReason::PoolTooSmall;
  throw ConfigError("unknown stop reason '" + std::string(text) + "'");
}

std::uint64_t round_seed(std::uint64_t seed, std::size_t round_index) {
  return derive_seed(seed ^ 0x68617276657374ULL, round_index);
}

namespace {

enum class FitStatus : std::uint8_t { Ok, Unconverged, Failed };

}  // namespace

RoundReport run_round(const Dataset& ds, std::span<const std::size_t> candidates,
                      const HarvestConfig& cfg, std::uint64_t seed, unsigned workers) {
  const auto started = std::chrono::steady_clock::now();
  cfg.validate();
  check_compatible(cfg.learner, ds.outcome_kind());

  std::vector<std::size_t> pool(candidates.begin(), candidates.end());
  std::sort(pool.begin(), pool.end());
  if (std::adjacent_find(pool.begin(), pool.end()) != pool.end()) {
    throw ConfigError("candidate features contain duplicates");
  }
  if (!pool.empty() && pool.back() >= ds.cols()) {
    throw ConfigError("candidate feature " + std::to_string(pool.back()) + " out of range");
  }
  const std::size_t k = cfg.subset_size;
  if (pool.size() <= k) {
    throw ConfigError("candidate pool too small for k: " + std::to_string(pool.size()) +
                      " candidates, k=" + std::to_string(k));
  }
  if (cfg.learner.kind == LearnerKind::OlsRSquared) {
    const auto& y = ds.outcome();
    if (!((y.array() - y.mean()).square().sum() > 0.0)) {
      throw DataError("degenerate outcome: total sum of squares is zero");
    }
  }

  RoundReport report;
  report.round_seed = seed;
  report.subset_size = k;
  report.n_subsets = cfg.subsets_for(pool.size(), k);
  report.candidate_features = pool;

  const SamplingPlan plan{report.n_subsets, k, pool.size(), seed};
  std::vector<FeatureSubset> local = draw_subsets(plan, workers);

  std::vector<double> accuracies(local.size());
  std::vector<FitStatus> status(local.size(), FitStatus::Ok);
  const double fallback = independence_value(cfg.learner.kind);
  parallel_for(local.size(), workers, [&](std::size_t j) {
    FeatureSubset mapped;
    mapped.indices.reserve(k);
    for (std::size_t f : local[j].indices) mapped.indices.push_back(pool[f]);
    try {
      const FitResult fit_result = fit(ds, mapped, cfg.learner);
      accuracies[j] = fit_result.accuracy;
      if (!fit_result.converged) status[j] = FitStatus::Unconverged;
    } catch (const NumericError&) {
      accuracies[j] = fallback;
      status[j] = FitStatus::Failed;
    } catch (const DataError&) {
      accuracies[j] = fallback;
      status[j] = FitStatus::Failed;
    }
  });
  report.subsets_trained = local.size();
  report.failed_fits = static_cast<std::size_t>(std::count(status.begin(), status.end(), FitStatus::Failed));
  report.unconverged_fits =
      static_cast<std::size_t>(std::count(status.begin(), status.end(), FitStatus::Unconverged));

  const RankTable table = rank_subsets(accuracies);
  const auto members = membership_index(local, pool.size());

  report.results.reserve(pool.size());
  std::vector<double> p_values;
  p_values.reserve(pool.size());
  for (std::size_t f = 0; f < pool.size(); ++f) {
    report.results.push_back(feature_p_value(table, members[f], pool[f]));
    p_values.push_back(report.results.back().p_value);
  }
  const std::vector<double> adjusted = adjust(p_values, cfg.adjustment);
  for (std::size_t f = 0; f < pool.size(); ++f) {
    auto& r = report.results[f];
    r.p_adjusted = adjusted[f];
    r.selected = cfg.alpha > 0.0 && r.p_adjusted <= cfg.alpha;
    if (r.selected) report.survivors.push_back(r.feature);
  }

  report.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(
      std::chrono::steady_clock::now() - started);
  return report;
}

std::optional<std::size_t> next_subset_size(std::size_t survivors, std::size_t k) {
  if (survivors < 4) return std::nullopt;
  if (survivors <= k) return std::max<std::size_t>(2, survivors / 2);
  return k;
}

HarvestReport run(const Dataset& ds, const HarvestConfig& cfg, unsigned workers) {
  cfg.validate();
  check_compatible(cfg.learner, ds.outcome_kind());

  HarvestReport report;
  report.config = cfg;
  std::vector<std::size_t> candidates(ds.cols());
  for (std::size_t f = 0; f < candidates.size(); ++f) candidates[f] = f;

  HarvestConfig round_cfg = cfg;
  for (std::size_t r = 0;; ++r) {
    RoundReport round = run_round(ds, candidates, round_cfg, round_seed(cfg.seed, r), workers);
    round.round_index = r;
    std::vector<std::size_t> survivors = round.survivors;
    report.rounds.push_back(std::move(round));

    if (r + 1 >= cfg.rounds) {
      report.stop_reason = StopReason::RoundsExhausted;
      break;
    }
    if (survivors == candidates) {
      report.stop_reason = StopReason::Stable;
      break;
    }
    const auto next_k = next_subset_size(survivors.size(), round_cfg.subset_size);
    if (!next_k) {
      report.stop_reason = StopReason::PoolTooSmall;
      break;
    }
    round_cfg.subset_size = *next_k;
    candidates = std::move(survivors);
  }

  for (std::size_t f : report.rounds.back().survivors) {
    report.final_features.push_back({f, ds.feature_names()[f]});
  }
  return report;
}

}  // namespace harvest
