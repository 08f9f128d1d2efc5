#pragma once

#include "harvest/dataset.hpp"
#include "harvest/screening.hpp"

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace harvest {

/// Linear model with two correlated blocks of three relevant features among
/// 40 standard normal features ("Example 4" of the random lasso study).
struct SimSpec {
  std::size_t p = 40;
  std::vector<double> beta = default_beta();
  double block_correlation = 0.9;          // within features {0,1,2} and {3,4,5}
  double error_variance = 36.0;
  std::size_t n_obs = 50;
  std::size_t replications = 100;
  HarvestConfig harvest = default_harvest();
  std::uint64_t seed = 20170101;

  static std::vector<double> default_beta();
  /// OLS / R^2, alpha 0.05 unadjusted, k = 15, n = 4000, one round.
  static HarvestConfig default_harvest();

  void validate() const;

  /// Feature covariance: unit variances, block_correlation inside each block.
  Eigen::MatrixXd covariance() const;
  /// Indices with non-zero coefficient.
  std::vector<std::size_t> relevant_features() const;
};

/// Replication `rep_index`: n_obs rows of X ~ N(0, covariance) through a
/// Cholesky root and y = X beta + e, e ~ N(0, error_variance), no intercept.
Dataset gen_replication(const SimSpec& spec, std::size_t rep_index);

/// Run seed handed to HARVEST for replication `rep_index`.
std::uint64_t replication_seed(const SimSpec& spec, std::size_t rep_index);

struct MinMedMax {
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
};

/// Order statistics; the median of an even-length list averages the middle pair.
MinMedMax min_med_max(std::vector<double> values);

/// Selection-frequency summary in percent.
struct SimSummary {
  std::vector<std::size_t> selection_counts;  // per feature, out of replications
  std::size_t replications = 0;
  std::vector<std::size_t> relevant;
  std::optional<MinMedMax> sensitivity;  // unset when there are no relevant features
  std::optional<MinMedMax> specificity;  // unset when every feature is relevant
};

/// sensitivity_j = 100 count_j / reps over relevant j; specificity_j =
/// 100 - 100 count_j / reps over the rest.
SimSummary summarize(std::span<const std::size_t> counts, std::size_t replications,
                     std::span<const std::size_t> relevant);

/// Generates every replication, screens it and aggregates the selections.
/// Replications are spread over `workers`; the summary does not depend on it.
SimSummary run_study(const SimSpec& spec, unsigned workers = 1);

/// A published method row: sensitivity and specificity min/median/max, percent.
struct MethodRow {
  std::string_view method;
  MinMedMax sensitivity;
  MinMedMax specificity;
};

enum class PaperTable { Table1, Table2 };
std::string_view to_string(PaperTable table);
PaperTable parse_paper_table(std::string_view text);

/// Published rows for the given table, HARVEST last.
std::span<const MethodRow> published_rows(PaperTable table);
const MethodRow& published_harvest_row(PaperTable table);
/// Observations per replication behind the table (50 or 100).
std::size_t table_n_obs(PaperTable table);

}  // namespace harvest
