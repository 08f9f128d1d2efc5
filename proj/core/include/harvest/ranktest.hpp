#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace harvest {

/// Subset accuracies and their ranks: rank 1 is the highest accuracy, ties
/// share the mean of the positions they occupy.
struct RankTable {
  std::vector<double> accuracies;
  std::vector<double> ranks;

  std::size_t size() const noexcept { return ranks.size(); }
};

/// Ranks accuracies in descending order with midranks. Requires n >= 2 and
/// finite values.
RankTable rank_subsets(std::span<const double> accuracies);

enum class TestFlag { Ok, NeverSampled, InEverySubset };
std::string_view to_string(TestFlag flag);
TestFlag parse_test_flag(std::string_view text);

struct FeatureTestResult {
  std::size_t feature = 0;
  std::size_t n_i = 0;
  double avg_rank = 0.0;
  double mu = 0.0;
  double sigma = 0.0;
  double z = 0.0;
  double p_value = 1.0;
  double p_adjusted = 1.0;
  bool selected = false;
  TestFlag flag = TestFlag::Ok;
};

/// One-sided rank-sum test of the subsets at `member_positions` against the
/// rest. Under the null the average member rank is approximately normal with
/// mean (n+1)/2 and sd sqrt((n-n_i)(n+1)/(12 n_i)); p = Phi(z), so a small
/// average rank (better subsets) gives a small p. n_i = 0 and n_i = n return
/// p = 1 with a flag instead of throwing. p_adjusted is set equal to p_value.
FeatureTestResult feature_p_value(const RankTable& table,
                                  std::span<const std::size_t> member_positions,
                                  std::size_t feature = 0);

/// Largest n accepted by exact_null_p.
inline constexpr std::size_t kExactNullMaxN = 14;

/// Exact P(mean of n_i ranks drawn without replacement from {1..n} <= avg_rank),
/// by enumerating every n_i-subset of ranks. Test oracle for small n.
double exact_null_p(std::size_t n, std::size_t n_i, double avg_rank);

enum class Adjustment { None, Bonferroni, BenjaminiHochberg };
std::string_view to_string(Adjustment method);
Adjustment parse_adjustment(std::string_view text);

/// Multiple-testing adjustment. Bonferroni is min(1, m p); BH is the
/// step-up q_(i) = min_{j >= i} min(1, m p_(j) / j).
std::vector<double> adjust(std::span<const double> p_values, Adjustment method);

/// Standard normal CDF.
double normal_cdf(double z);

}  // namespace harvest
