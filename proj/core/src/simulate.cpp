#include "harvest/simulate.hpp"

#include "harvest/error.hpp"
#include "harvest/parallel.hpp"
#include "harvest/random.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>

namespace harvest {

namespace {

constexpr std::uint64_t kDataStream = 0x6461746173747265ULL;
constexpr std::uint64_t kRunStream = 0x72756e7365656473ULL;
constexpr std::array<std::array<std::size_t, 3>, 2> kBlocks{{{0, 1, 2}, {3, 4, 5}}};

}  // namespace

std::vector<double> SimSpec::default_beta() {
  std::vector<double> beta(40, 0.0);
  const std::array<double, 6> relevant{3, 3, -2, 3, 3, -2};
  std::copy(relevant.begin(), relevant.end(), beta.begin());
  return beta;
}

HarvestConfig SimSpec::default_harvest() {
  HarvestConfig cfg;
  cfg.alpha = 0.05;
  cfg.subset_size = 15;
  cfg.n_subsets = 4000;
  cfg.target_coverage.reset();
  cfg.learner.kind = LearnerKind::OlsRSquared;
  cfg.adjustment = Adjustment::None;
  cfg.rounds = 1;
  return cfg;
}

void SimSpec::validate() const {
  if (p < 6) throw ConfigError("simulation needs p >= 6 for the two correlated blocks");
  if (beta.size() != p) {
    throw ConfigError("beta has " + std::to_string(beta.size()) + " entries, p=" + std::to_string(p));
  }
  if (!(block_correlation >= 0.0 && block_correlation < 1.0)) {
    throw ConfigError("block_correlation must lie in [0, 1)");
  }
  if (!(error_variance >= 0.0)) throw ConfigError("error_variance must be >= 0");
  if (n_obs < 2) throw ConfigError("n_obs must be at least 2");
  if (replications < 1) throw ConfigError("replications must be at least 1");
  harvest.validate();
}

Eigen::MatrixXd SimSpec::covariance() const {
  const auto dim = static_cast<Eigen::Index>(p);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(dim, dim);
  for (const auto& block : kBlocks) {
    for (std::size_t a : block) {
      for (std::size_t b : block) {
        if (a != b) cov(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = block_correlation;
      }
    }
  }
  return cov;
}

std::vector<std::size_t> SimSpec::relevant_features() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < beta.size(); ++j) {
    if (beta[j] != 0.0) out.push_back(j);
  }
  return out;
}

Dataset gen_replication(const SimSpec& spec, std::size_t rep_index) {
  spec.validate();
  const Eigen::LLT<Eigen::MatrixXd> llt(spec.covariance());
  if (llt.info() != Eigen::Success) throw NumericError("covariance is not positive definite");
  const Eigen::MatrixXd root = llt.matrixL();

  const auto n = static_cast<Eigen::Index>(spec.n_obs);
  const auto p = static_cast<Eigen::Index>(spec.p);
  Engine eng = make_engine(spec.seed ^ kDataStream, rep_index);
  std::normal_distribution<double> normal(0.0, 1.0);

  Eigen::MatrixXd z(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) z(i, j) = normal(eng);
  }
  Eigen::VectorXd noise(n);
  for (Eigen::Index i = 0; i < n; ++i) noise(i) = normal(eng);

  Eigen::MatrixXd x = z * root.transpose();
  const Eigen::Map<const Eigen::VectorXd> beta(spec.beta.data(), p);
  Eigen::VectorXd y = x * beta + std::sqrt(spec.error_variance) * noise;
  return Dataset(std::move(x), std::move(y), OutcomeKind::Continuous);
}

std::uint64_t replication_seed(const SimSpec& spec, std::size_t rep_index) {
  return derive_seed(spec.seed ^ kRunStream, rep_index);
}

MinMedMax min_med_max(std::vector<double> values) {
  if (values.empty()) throw ConfigError("min_med_max of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size();
  const double median = m % 2 == 1 ? values[m / 2] : (values[m / 2 - 1] + values[m / 2]) / 2.0;
  return {values.front(), median, values.back()};
}

SimSummary summarize(std::span<const std::size_t> counts, std::size_t replications,
                     std::span<const std::size_t> relevant) {
  if (replications == 0) throw ConfigError("replications must be positive");
  SimSummary s;
  s.selection_counts.assign(counts.begin(), counts.end());
  s.replications = replications;
  s.relevant.assign(relevant.begin(), relevant.end());
  std::sort(s.relevant.begin(), s.relevant.end());

  std::vector<double> sens, spec;
  const double reps = static_cast<double>(replications);
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] > replications) {
      throw ConfigError("feature " + std::to_string(j) + " selected more often than replicated");
    }
    const double rate = 100.0 * static_cast<double>(counts[j]) / reps;
    if (std::binary_search(s.relevant.begin(), s.relevant.end(), j)) {
      sens.push_back(rate);
    } else {
      spec.push_back(100.0 - rate);
    }
  }
  if (!sens.empty()) s.sensitivity = min_med_max(std::move(sens));
  if (!spec.empty()) s.specificity = min_med_max(std::move(spec));
  return s;
}

SimSummary run_study(const SimSpec& spec, unsigned workers) {
  spec.validate();
  std::vector<std::vector<std::size_t>> selected(spec.replications);
  parallel_for(spec.replications, workers, [&](std::size_t rep) {
    const Dataset ds = gen_replication(spec, rep);
    HarvestConfig cfg = spec.harvest;
    cfg.seed = replication_seed(spec, rep);
    const HarvestReport report = run(ds, cfg, 1);
    for (const auto& f : report.final_features) selected[rep].push_back(f.index);
  });

  std::vector<std::size_t> counts(spec.p, 0);
  for (const auto& rep : selected) {
    for (std::size_t f : rep) ++counts[f];
  }
  return summarize(counts, spec.replications, spec.relevant_features());
}

std::string_view to_string(PaperTable table) {
  return table == PaperTable::Table1 ? "table1" : "table2";
}

PaperTable parse_paper_table(std::string_view text) {
  if (text == "table1") return PaperTable::Table1;
  if (text == "table2") return PaperTable::Table2;
  throw ConfigError("unknown table '" + std::string(text) + "' (expected table1 or table2)");
}

namespace {

constexpr std::array<MethodRow, 7> kTable1{{
    {"Lasso", {11, 70, 77}, {75, 83, 88}},
    {"Adaptive Lasso", {16, 49, 59}, {86, 92, 96}},
    {"Elastic Net", {63, 92, 96}, {77, 83, 91}},
    {"Relaxed Lasso", {4, 63, 70}, {91, 96, 100}},
    {"VISA", {4, 62, 73}, {92, 97, 99}},
    {"Random Lasso", {84, 96, 97}, {70, 79, 89}},
    {"HARVEST", {93, 95, 98}, {84, 91, 96}},
}};

constexpr std::array<MethodRow, 7> kTable2{{
    {"Lasso", {8, 84, 88}, {69, 78, 88}},
    {"Adaptive Lasso", {17, 62, 72}, {86, 90, 96}},
    {"Elastic Net", {70, 98, 99}, {79, 86, 93}},
    {"Relaxed Lasso", {3, 75, 84}, {92, 97, 99}},
    {"VISA", {3, 76, 85}, {91, 96, 99}},
    {"Random Lasso", {89, 99, 99}, {79, 86, 92}},
    {"HARVEST", {94, 99, 100}, {90, 96, 99}},
}};

}  // namespace

std::span<const MethodRow> published_rows(PaperTable table) {
  return table == PaperTable::Table1 ? std::span<const MethodRow>(kTable1)
                                     : std::span<const MethodRow>(kTable2);
}

const MethodRow& published_harvest_row(PaperTable table) { return published_rows(table).back(); }

std::size_t table_n_obs(PaperTable table) { return table == PaperTable::Table1 ? 50 : 100; }

}  // namespace harvest
