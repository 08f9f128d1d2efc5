#include "harvest/error.hpp"
#include "harvest/simulate.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

namespace harvest {
namespace {

TEST(SimSpec, DefaultsMatchTheStudyDesign) {
  const SimSpec spec;
  EXPECT_EQ(spec.p, 40u);
  ASSERT_EQ(spec.beta.size(), 40u);
  const std::vector<double> head{3, 3, -2, 3, 3, -2};
  for (std::size_t j = 0; j < 40; ++j) EXPECT_EQ(spec.beta[j], j < 6 ? head[j] : 0.0);
  EXPECT_EQ(spec.error_variance, 36.0);
  EXPECT_EQ(spec.block_correlation, 0.9);
  EXPECT_EQ(spec.replications, 100u);
  EXPECT_EQ(spec.harvest.subset_size, 15u);
  EXPECT_EQ(spec.harvest.n_subsets, std::optional<std::size_t>(4000));
  EXPECT_EQ(spec.harvest.alpha, 0.05);
  EXPECT_EQ(spec.harvest.adjustment, Adjustment::None);
  EXPECT_EQ(spec.relevant_features(), (std::vector<std::size_t>{0, 1, 2, 3, 4, 5}));
}

TEST(GenReplication, BlockCorrelations) {
  SimSpec spec;
  spec.n_obs = 100000;
  const Dataset ds = gen_replication(spec, 0);
  const auto& x = ds.features();
  EXPECT_NEAR(testing::correlation(x.col(0), x.col(1)), 0.9, 0.01);
  EXPECT_NEAR(testing::correlation(x.col(3), x.col(5)), 0.9, 0.01);
  EXPECT_NEAR(testing::correlation(x.col(0), x.col(3)), 0.0, 0.01);
  EXPECT_NEAR(testing::correlation(x.col(2), x.col(17)), 0.0, 0.01);
}

TEST(GenReplication, MomentsAndPopulationRSquared) {
  // Oracle: beta' Sigma beta by hand. Each block (3, 3, -2) contributes
  // 9 + 9 + 4 plus cross terms 2 * 0.9 * (3*3 - 3*2 - 3*2) = -5.4.
  const double block = 9 + 9 + 4 + 2 * 0.9 * (9 - 6 - 6);
  const double signal = 2 * block;
  ASSERT_NEAR(signal, 33.2, 1e-12);
  const double population_r2 = signal / (signal + 36.0);

  SimSpec spec;
  spec.n_obs = 100000;
  double n = 0, max_mean_dev = 0, max_var_dev = 0;
  double sum_fit = 0, sum_fit2 = 0, sum_y = 0, sum_y2 = 0;
  Eigen::VectorXd col_sum = Eigen::VectorXd::Zero(40), col_sq = Eigen::VectorXd::Zero(40);
  const Eigen::Map<const Eigen::VectorXd> beta(spec.beta.data(), 40);
  for (std::size_t rep = 0; rep < 10; ++rep) {
    const Dataset ds = gen_replication(spec, rep);
    const Eigen::VectorXd fit = ds.features() * beta;
    col_sum += ds.features().colwise().sum().transpose();
    col_sq += ds.features().array().square().matrix().colwise().sum().transpose();
    sum_fit += fit.sum();
    sum_fit2 += fit.squaredNorm();
    sum_y += ds.outcome().sum();
    sum_y2 += ds.outcome().squaredNorm();
    n += static_cast<double>(ds.rows());
  }
  for (Eigen::Index j = 0; j < 40; ++j) {
    const double mean = col_sum(j) / n;
    max_mean_dev = std::max(max_mean_dev, std::abs(mean));
    max_var_dev = std::max(max_var_dev, std::abs(col_sq(j) / n - mean * mean - 1.0));
  }
  EXPECT_LT(max_mean_dev, 0.02);
  EXPECT_LT(max_var_dev, 0.03);
  const double var_fit = sum_fit2 / n - std::pow(sum_fit / n, 2);
  const double var_y = sum_y2 / n - std::pow(sum_y / n, 2);
  EXPECT_NEAR(var_fit, signal, 0.02 * signal);
  EXPECT_NEAR(var_fit / var_y, population_r2, 0.01);
  EXPECT_NEAR(population_r2, 0.48, 0.005);
}

TEST(GenReplication, DeterministicPerReplication) {
  const SimSpec spec;
  const Dataset a = gen_replication(spec, 4), b = gen_replication(spec, 4), c = gen_replication(spec, 5);
  EXPECT_TRUE(a.features() == b.features());
  EXPECT_TRUE(a.outcome() == b.outcome());
  EXPECT_FALSE(a.features() == c.features());
}

TEST(SimSpec, RejectsInvalidCorrelation) {
  SimSpec spec;
  spec.block_correlation = 1.0;
  EXPECT_THROW(spec.validate(), ConfigError);
}

TEST(Summarize, OrderStatistics) {
  std::vector<std::size_t> counts(40, 0);
  const std::vector<std::size_t> relevant_counts{93, 94, 95, 95, 97, 98};
  std::copy(relevant_counts.begin(), relevant_counts.end(), counts.begin());
  const std::vector<std::size_t> relevant{0, 1, 2, 3, 4, 5};
  const SimSummary s = summarize(counts, 100, relevant);
  ASSERT_TRUE(s.sensitivity && s.specificity);
  EXPECT_DOUBLE_EQ(s.sensitivity->min, 93);
  EXPECT_DOUBLE_EQ(s.sensitivity->median, 95);
  EXPECT_DOUBLE_EQ(s.sensitivity->max, 98);
  EXPECT_DOUBLE_EQ(s.specificity->min, 100);
  EXPECT_DOUBLE_EQ(s.specificity->median, 100);
  EXPECT_DOUBLE_EQ(s.specificity->max, 100);

  const std::vector<std::size_t> half(40, 50);
  EXPECT_DOUBLE_EQ(summarize(half, 100, relevant).sensitivity->median, 50);
}

TEST(Summarize, EvenMedianAveragesTheMiddlePair) {
  const MinMedMax m = min_med_max({4, 1, 3, 2});
  EXPECT_DOUBLE_EQ(m.min, 1);
  EXPECT_DOUBLE_EQ(m.median, 2.5);
  EXPECT_DOUBLE_EQ(m.max, 4);
}

TEST(Summarize, NoRelevantFeaturesLeavesSensitivityUnset) {
  const std::vector<std::size_t> counts(40, 5);
  const SimSummary s = summarize(counts, 100, {});
  EXPECT_FALSE(s.sensitivity.has_value());
  EXPECT_DOUBLE_EQ(s.specificity->median, 95);
  EXPECT_THROW(summarize(std::vector<std::size_t>{101}, 100, {}), ConfigError);
}

TEST(RunStudy, DeterministicAcrossRunsAndWorkers) {
  SimSpec spec;
  spec.replications = 6;
  spec.harvest.n_subsets = 400;
  const SimSummary a = run_study(spec, 1);
  const SimSummary b = run_study(spec, 3);
  EXPECT_EQ(a.selection_counts, b.selection_counts);
  EXPECT_EQ(a.selection_counts, run_study(spec, 1).selection_counts);
  for (std::size_t c : a.selection_counts) EXPECT_LE(c, 6u);
}

TEST(PublishedRows, HarvestRowsAndSampleSizes) {
  const MethodRow& t1 = published_harvest_row(PaperTable::Table1);
  EXPECT_EQ(t1.method, "HARVEST");
  EXPECT_EQ(t1.sensitivity.min, 93);
  EXPECT_EQ(t1.specificity.median, 91);
  const MethodRow& t2 = published_harvest_row(PaperTable::Table2);
  EXPECT_EQ(t2.sensitivity.median, 99);
  EXPECT_EQ(t2.specificity.min, 90);
  EXPECT_EQ(published_rows(PaperTable::Table1).size(), 7u);
  EXPECT_EQ(table_n_obs(PaperTable::Table1), 50u);
  EXPECT_EQ(table_n_obs(PaperTable::Table2), 100u);
}

}  // namespace
}  // namespace harvest
