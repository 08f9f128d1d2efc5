#include "harvest/dataset.hpp"

#include "harvest/error.hpp"
#include "harvest/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <system_error>

namespace harvest {

std::string_view to_string(OutcomeKind kind) {
  return kind == OutcomeKind::Binary ? "binary" : "continuous";
}

OutcomeKind parse_outcome_kind(std::string_view text) {
  if (text == "continuous") return OutcomeKind::Continuous;
  if (text == "binary") return OutcomeKind::Binary;
  throw ConfigError("unknown outcome kind '" + std::string(text) +
                    "' (expected continuous or binary)");
}

namespace {

std::string format_value(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::vector<std::string> default_names(std::size_t p) {
  std::vector<std::string> names(p);
  for (std::size_t j = 0; j < p; ++j) names[j] = "f" + std::to_string(j);
  return names;
}

}  // namespace

Dataset::Dataset(Eigen::MatrixXd features, Eigen::VectorXd outcome, OutcomeKind kind,
                 std::vector<std::string> feature_names, std::string outcome_name)
    : features_(std::move(features)),
      outcome_(std::move(outcome)),
      kind_(kind),
      names_(std::move(feature_names)),
      outcome_name_(std::move(outcome_name)) {
  const auto n = features_.rows();
  const auto p = features_.cols();
  if (n < 2) throw DataError("dataset needs at least 2 observations, got " + std::to_string(n));
  if (p < 1) throw DataError("dataset needs at least 1 feature");
  if (outcome_.size() != n) {
    throw DataError("outcome length " + std::to_string(outcome_.size()) +
                    " does not match " + std::to_string(n) + " rows");
  }
  if (names_.empty()) names_ = default_names(static_cast<std::size_t>(p));
  if (names_.size() != static_cast<std::size_t>(p)) {
    throw DataError("expected " + std::to_string(p) + " feature names, got " +
                    std::to_string(names_.size()));
  }
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!std::isfinite(features_(i, j))) {
        throw DataError("non-finite value in row " + std::to_string(i) + ", feature '" +
                        names_[static_cast<std::size_t>(j)] + "'");
      }
    }
  }
  bool has0 = false, has1 = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double y = outcome_(i);
    if (!std::isfinite(y)) throw DataError("non-finite outcome in row " + std::to_string(i));
    if (kind_ == OutcomeKind::Binary) {
      if (y == 0.0) {
        has0 = true;
      } else if (y == 1.0) {
        has1 = true;
      } else {
        throw DataError("non-binary outcome value " + format_value(y) + " in row " +
                        std::to_string(i));
      }
    }
  }
  if (kind_ == OutcomeKind::Binary && !(has0 && has1)) {
    throw DataError("binary outcome has a single class");
  }
}

Dataset Dataset::select_rows(const std::vector<std::size_t>& rows) const {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), features_.cols());
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= this->rows()) throw DataError("row index out of range");
    x.row(static_cast<Eigen::Index>(r)) = features_.row(static_cast<Eigen::Index>(rows[r]));
    y(static_cast<Eigen::Index>(r)) = outcome_(static_cast<Eigen::Index>(rows[r]));
  }
  return Dataset(std::move(x), std::move(y), kind_, names_, outcome_name_);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      return cells;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

bool parse_number(std::string_view cell, double& out) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return false;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc{} && ptr == cell.data() + cell.size();
}

}  // namespace

Dataset parse_csv(std::string_view text, const ColumnRef& outcome_column, OutcomeKind kind,
                  std::string_view source) {
  const std::string where(source);
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  std::vector<std::vector<std::string_view>> lines;
  std::vector<std::size_t> line_numbers;
  std::size_t start = 0, line_no = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    ++line_no;
    const auto line = trim(text.substr(start, nl - start));
    if (!line.empty()) {
      lines.push_back(split_cells(line));
      line_numbers.push_back(line_no);
    }
    start = nl + 1;
  }
  if (lines.empty()) throw DataError(where + ": file is empty");

  const std::size_t width = lines.front().size();
  bool has_header = false;
  for (auto cell : lines.front()) {
    double v;
    if (!parse_number(cell, v)) has_header = true;
  }

  std::vector<std::string> header;
  if (has_header) {
    for (auto cell : lines.front()) header.emplace_back(cell);
  } else {
    for (std::size_t j = 0; j < width; ++j) header.push_back("c" + std::to_string(j));
  }

  std::size_t target = 0;
  if (const auto* name = std::get_if<std::string>(&outcome_column)) {
    if (!has_header) {
      throw DataError(where + ": outcome column '" + *name +
                      "' requested by name but the file has no header");
    }
    const auto count = std::count(header.begin(), header.end(), *name);
    if (count == 0) throw DataError(where + ": missing outcome column '" + *name + "'");
    if (count > 1) throw DataError(where + ": duplicate outcome column '" + *name + "'");
    target = static_cast<std::size_t>(std::find(header.begin(), header.end(), *name) -
                                      header.begin());
  } else {
    target = std::get<std::size_t>(outcome_column);
    if (target >= width) {
      throw DataError(where + ": missing outcome column " + std::to_string(target) + " (file has " +
                      std::to_string(width) + " columns)");
    }
  }
  if (width < 2) throw DataError(where + ": need at least one feature column besides the outcome");

  const std::size_t first = has_header ? 1 : 0;
  const std::size_t n = lines.size() - first;
  const std::size_t p = width - 1;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const auto& cells = lines[first + r];
    const auto lineno = line_numbers[first + r];
    if (cells.size() != width) {
      throw DataError(where + ": line " + std::to_string(lineno) + " has " +
                      std::to_string(cells.size()) + " cells, expected " + std::to_string(width));
    }
    std::size_t feature = 0;
    for (std::size_t c = 0; c < width; ++c) {
      double v;
      if (!parse_number(cells[c], v)) {
        throw DataError(where + ": unparsable cell '" + std::string(cells[c]) + "' at line " +
                        std::to_string(lineno) + ", column '" + header[c] + "'");
      }
      if (!std::isfinite(v)) {
        throw DataError(where + ": non-finite cell '" + std::string(cells[c]) + "' at line " +
                        std::to_string(lineno) + ", column '" + header[c] + "'");
      }
      if (c == target) {
        y(static_cast<Eigen::Index>(r)) = v;
      } else {
        x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(feature++)) = v;
      }
    }
  }

  std::vector<std::string> names;
  std::string outcome_name = "y";
  if (has_header) {
    for (std::size_t c = 0; c < width; ++c) {
      if (c != target) names.push_back(header[c]);
    }
    outcome_name = header[target];
  }
  try {
    return Dataset(std::move(x), std::move(y), kind, std::move(names), std::move(outcome_name));
  } catch (const DataError& e) {
    throw DataError(where + ": " + e.what());
  }
}

Dataset load_csv(const std::filesystem::path& path, const ColumnRef& outcome_column,
                 OutcomeKind kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), outcome_column, kind, path.string());
}

std::string to_csv(const Dataset& ds) {
  std::string out;
  for (const auto& name : ds.feature_names()) {
    out += name;
    out += ',';
  }
  out += ds.outcome_name();
  out += '\n';
  const auto& x = ds.features();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      out += format_value(x(i, j));
      out += ',';
    }
    out += format_value(ds.outcome()(i));
    out += '\n';
  }
  return out;
}

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << to_csv(ds);
}

SplitPair split(const Dataset& ds, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ConfigError("split fraction must lie in (0, 1), got " + format_value(fraction));
  }
  const std::size_t n = ds.rows();
  const auto n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train >= n) {
    throw DataError("split of " + std::to_string(n) + " rows at fraction " +
                    format_value(fraction) + " leaves an empty partition");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Engine eng(derive_seed(seed, 0x5b1177));
  for (std::size_t i = 0; i < n_train; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_below(eng, n - i));
    std::swap(order[i], order[j]);
  }
  std::vector<std::size_t> train_rows(order.begin(), order.begin() + static_cast<long>(n_train));
  std::vector<std::size_t> holdout_rows(order.begin() + static_cast<long>(n_train), order.end());
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(holdout_rows.begin(), holdout_rows.end());

  Dataset train = [&] {
    try {
      return ds.select_rows(train_rows);
    } catch (const DataError& e) {
      throw DataError(std::string("training partition invalid: ") + e.what());
    }
  }();
  Dataset holdout = [&] {
    try {
      return ds.select_rows(holdout_rows);
    } catch (const DataError& e) {
      throw DataError(std::string("holdout partition invalid: ") + e.what());
    }
  }();
  return SplitPair{std::move(train), std::move(holdout), std::move(train_rows),
                   std::move(holdout_rows), fraction, seed};
}

}  // namespace harvest
