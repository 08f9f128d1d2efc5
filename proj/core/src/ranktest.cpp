#include "harvest/ranktest.hpp"

#include "harvest/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

namespace harvest {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

RankTable rank_subsets(std::span<const double> accuracies) {
  const std::size_t n = accuracies.size();
  if (n < 2) throw ConfigError("ranking needs at least 2 subsets, got " + std::to_string(n));
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(accuracies[j])) {
      throw NumericError("non-finite accuracy for subset " + std::to_string(j));
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return accuracies[a] > accuracies[b];
  });

  RankTable table;
  table.accuracies.assign(accuracies.begin(), accuracies.end());
  table.ranks.assign(n, 0.0);
  std::size_t lo = 0;
  while (lo < n) {
    std::size_t hi = lo + 1;
    while (hi < n && accuracies[order[hi]] == accuracies[order[lo]]) ++hi;
    const double midrank = static_cast<double>(lo + hi + 1) / 2.0;
    for (std::size_t i = lo; i < hi; ++i) table.ranks[order[i]] = midrank;
    lo = hi;
  }
  return table;
}

std::string_view to_string(TestFlag flag) {
  switch (flag) {
    case TestFlag::Ok:
      return "ok";
    case TestFlag::NeverSampled:
      return "never_sampled";
    case TestFlag::InEverySubset:
      return "in_every_subset";
  }
  return "ok";
}

TestFlag parse_test_flag(std::string_view text) {
  if (text == "ok") return TestFlag::Ok;
  if (text == "never_sampled") return TestFlag::NeverSampled;
  if (text == "in_every_subset") return TestFlag::InEverySubset;
  throw ConfigError("unknown test flag '" + std::string(text) + "'");
}

FeatureTestResult feature_p_value(const RankTable& table,
                                  std::span<const std::size_t> member_positions,
                                  std::size_t feature) {
  const std::size_t n = table.size();
  const std::size_t n_i = member_positions.size();
  FeatureTestResult r;
  r.feature = feature;
  r.n_i = n_i;
  r.mu = (static_cast<double>(n) + 1.0) / 2.0;

  if (n_i == 0 || n_i >= n) {
    r.flag = n_i == 0 ? TestFlag::NeverSampled : TestFlag::InEverySubset;
    r.avg_rank = r.mu;
    r.sigma = 0.0;
    r.z = 0.0;
    r.p_value = r.p_adjusted = 1.0;
    return r;
  }

  double rank_sum = 0.0;
  for (std::size_t pos : member_positions) {
    if (pos >= n) {
      throw ConfigError("subset position " + std::to_string(pos) + " out of range for " +
                        std::to_string(n) + " subsets");
    }
    rank_sum += table.ranks[pos];
  }
  const double nd = static_cast<double>(n);
  const double nid = static_cast<double>(n_i);
  r.avg_rank = rank_sum / nid;
  r.sigma = std::sqrt((nd - nid) * (nd + 1.0) / (12.0 * nid));
  r.z = (r.avg_rank - r.mu) / r.sigma;
  r.p_value = r.p_adjusted = normal_cdf(r.z);
  return r;
}

double exact_null_p(std::size_t n, std::size_t n_i, double avg_rank) {
  if (n > kExactNullMaxN) {
    throw ConfigError("exact null enumeration supports n <= " + std::to_string(kExactNullMaxN) +
                      ", got " + std::to_string(n));
  }
  if (n_i == 0 || n_i > n) throw ConfigError("exact null needs 0 < n_i <= n");

  // Rank sums are integers; allow for rounding in avg_rank * n_i.
  const double limit = avg_rank * static_cast<double>(n_i) + 1e-9;
  std::uint64_t hits = 0, total = 0;
  const std::uint32_t end = std::uint32_t{1} << n;
  for (std::uint32_t mask = 0; mask < end; ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != n_i) continue;
    ++total;
    std::uint64_t sum = 0;
    for (std::size_t r = 0; r < n; ++r) {
      if (mask & (std::uint32_t{1} << r)) sum += r + 1;
    }
    if (static_cast<double>(sum) <= limit) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

std::string_view to_string(Adjustment method) {
  switch (method) {
    case Adjustment::None:
      return "none";
    case Adjustment::Bonferroni:
      return "bonferroni";
    case Adjustment::BenjaminiHochberg:
      return "bh";
  }
  return "none";
}

Adjustment parse_adjustment(std::string_view text) {
  if (text == "none") return Adjustment::None;
  if (text == "bonferroni") return Adjustment::Bonferroni;
  if (text == "bh" || text == "fdr") return Adjustment::BenjaminiHochberg;
  throw ConfigError("unknown adjustment '" + std::string(text) +
                    "' (expected none, bonferroni or bh)");
}

std::vector<double> adjust(std::span<const double> p_values, Adjustment method) {
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p-values must lie in [0, 1]");
  }
  std::vector<double> out(p_values.begin(), p_values.end());
  const auto m = static_cast<double>(out.size());
  switch (method) {
    case Adjustment::None:
      break;
    case Adjustment::Bonferroni:
      for (double& p : out) p = std::min(1.0, m * p);
      break;
    case Adjustment::BenjaminiHochberg: {
      std::vector<std::size_t> order(out.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
      double running = 1.0;
      for (std::size_t i = order.size(); i-- > 0;) {
        const double scaled = m * p_values[order[i]] / static_cast<double>(i + 1);
        running = std::min(running, std::min(1.0, scaled));
        // m p / m can round below p.
        out[order[i]] = std::max(running, p_values[order[i]]);
      }
      break;
    }
  }
  return out;
}

}  // namespace harvest
