#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace harvest {

enum class OutcomeKind { Continuous, Binary };

std::string_view to_string(OutcomeKind kind);
OutcomeKind parse_outcome_kind(std::string_view text);

/// Observation data: N rows by p feature columns plus one outcome column.
///
/// A Dataset is validated on construction and immutable afterwards, so it can
/// be shared read-only between worker threads. Values are stored exactly as
/// given; nothing is centered or rescaled.
class Dataset {
 public:
  /// Throws DataError when the invariants do not hold: N >= 2, p >= 1, all
  /// values finite, names sized p, and for Binary outcomes every value in
  /// {0, 1} with both classes present.
  Dataset(Eigen::MatrixXd features, Eigen::VectorXd outcome, OutcomeKind kind,
          std::vector<std::string> feature_names = {}, std::string outcome_name = "y");

  std::size_t rows() const noexcept { return static_cast<std::size_t>(features_.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(features_.cols()); }

  const Eigen::MatrixXd& features() const noexcept { return features_; }
  const Eigen::VectorXd& outcome() const noexcept { return outcome_; }
  OutcomeKind outcome_kind() const noexcept { return kind_; }
  const std::vector<std::string>& feature_names() const noexcept { return names_; }
  const std::string& outcome_name() const noexcept { return outcome_name_; }

  /// Copy holding only the given rows, in the given order.
  Dataset select_rows(const std::vector<std::size_t>& rows) const;

 private:
  Eigen::MatrixXd features_;
  Eigen::VectorXd outcome_;
  OutcomeKind kind_;
  std::vector<std::string> names_;
  std::string outcome_name_;
};

/// Outcome column selector: a header name or a zero-based column index.
using ColumnRef = std::variant<std::string, std::size_t>;

/// Reads a comma-separated file. The first row is a header when any of its
/// cells does not parse as a number; otherwise features are named f0..f{p-1}
/// and the outcome keeps the name "y".
Dataset load_csv(const std::filesystem::path& path, const ColumnRef& outcome_column,
                 OutcomeKind kind);

/// Parses CSV text; `source` only labels error messages.
Dataset parse_csv(std::string_view text, const ColumnRef& outcome_column, OutcomeKind kind,
                  std::string_view source = "<memory>");

/// Writes features then outcome as the last column, with a header row. Values
/// use the shortest representation that reloads to the identical double.
void write_csv(const Dataset& ds, const std::filesystem::path& path);
std::string to_csv(const Dataset& ds);

struct SplitPair {
  Dataset train;
  Dataset holdout;
  std::vector<std::size_t> train_rows;    // source row ids, ascending
  std::vector<std::size_t> holdout_rows;  // source row ids, ascending
  double fraction = 0.0;
  std::uint64_t seed = 0;
};

/// Random train/holdout partition. The training part receives round(fraction * N)
/// rows drawn uniformly without replacement; the draw depends only on `seed`.
SplitPair split(const Dataset& ds, double fraction, std::uint64_t seed);

}  // namespace harvest
