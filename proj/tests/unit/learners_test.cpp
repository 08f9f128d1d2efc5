#include "harvest/error.hpp"
#include "harvest/learners.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

namespace harvest {
namespace {

Dataset column_data(std::vector<std::vector<double>> columns, std::vector<double> y,
                    OutcomeKind kind = OutcomeKind::Continuous) {
  const auto n = static_cast<Eigen::Index>(y.size());
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    for (Eigen::Index i = 0; i < n; ++i) x(i, static_cast<Eigen::Index>(j)) = columns[j][static_cast<std::size_t>(i)];
  }
  return Dataset(x, Eigen::Map<Eigen::VectorXd>(y.data(), n), kind);
}

FeatureSubset all_of(const Dataset& ds) {
  FeatureSubset s;
  for (std::size_t j = 0; j < ds.cols(); ++j) s.indices.push_back(j);
  return s;
}

Dataset random_gaussian(std::size_t n, std::size_t p, std::uint64_t seed, double noise = 1.0) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = normal(eng);
  }
  Eigen::VectorXd y(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) y(i) = x.row(i).sum() * 0.7 + noise * normal(eng);
  return Dataset(x, y, OutcomeKind::Continuous);
}

TEST(FitOls, ExactLinearFit) {
  const Dataset ds = column_data({{0, 1, 2}}, {0, 2, 4});
  const FitResult r = fit_ols(ds, FeatureSubset{{0}});
  EXPECT_NEAR(r.coefficients(0), 0.0, 1e-12);
  EXPECT_NEAR(r.coefficients(1), 2.0, 1e-12);
  EXPECT_NEAR(r.accuracy, 1.0, 1e-12);
  EXPECT_TRUE(r.converged);
}

TEST(FitOls, MatchesClosedFormSimpleRegression) {
  const std::vector<double> x{0, 1, 2}, y{0, 1, 1};
  // Oracle: slope = Sxy / Sxx, intercept = ybar - slope * xbar, R^2 = 1 - SSE/SST.
  const double xbar = 1.0, ybar = 2.0 / 3.0;
  double sxy = 0, sxx = 0, sst = 0;
  for (int i = 0; i < 3; ++i) {
    sxy += (x[i] - xbar) * (y[i] - ybar);
    sxx += (x[i] - xbar) * (x[i] - xbar);
    sst += (y[i] - ybar) * (y[i] - ybar);
  }
  const double slope = sxy / sxx, intercept = ybar - slope * xbar;
  double sse = 0;
  for (int i = 0; i < 3; ++i) sse += std::pow(y[i] - intercept - slope * x[i], 2);
  ASSERT_NEAR(slope, 0.5, 1e-15);
  ASSERT_NEAR(intercept, 1.0 / 6.0, 1e-15);
  ASSERT_NEAR(1.0 - sse / sst, 0.75, 1e-15);

  const FitResult r = fit_ols(column_data({x}, y), FeatureSubset{{0}});
  EXPECT_NEAR(r.coefficients(0), 1.0 / 6.0, 1e-10);
  EXPECT_NEAR(r.coefficients(1), 0.5, 1e-10);
  EXPECT_NEAR(r.accuracy, 0.75, 1e-10);
}

TEST(FitOls, ConstantOutcomeIsDegenerate) {
  const Dataset ds = column_data({{0, 1, 2}}, {3, 3, 3});
  try {
    fit_ols(ds, FeatureSubset{{0}});
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("degenerate outcome"), std::string::npos);
  }
}

TEST(FitOls, RankDeficientDesignGivesMinimumNormFit) {
  const std::vector<double> x{0, 1, 2, 3, 5}, y{1, 2, 2, 4, 7};
  const Dataset dup = column_data({x, x}, y);
  const FitResult r = fit_ols(dup, FeatureSubset{{0, 1}});
  EXPECT_FALSE(r.converged);
  ASSERT_TRUE(r.coefficients.allFinite());
  // Minimum norm splits the slope evenly over the two identical columns.
  const FitResult single = fit_ols(column_data({x}, y), FeatureSubset{{0}});
  EXPECT_NEAR(r.coefficients(1), single.coefficients(1) / 2, 1e-9);
  EXPECT_NEAR(r.coefficients(2), single.coefficients(1) / 2, 1e-9);
  EXPECT_NEAR(r.accuracy, single.accuracy, 1e-12);
}

TEST(FitOls, MoreColumnsThanRowsStillFits) {
  const Dataset ds = random_gaussian(5, 8, 3);
  const FitResult r = fit_ols(ds, all_of(ds));
  EXPECT_FALSE(r.converged);
  EXPECT_NEAR(r.accuracy, 1.0, 1e-9);
}

TEST(FitOls, ResidualsAreOrthogonalToDesign) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Dataset ds = random_gaussian(60, 6, seed);
    const FitResult r = fit_ols(ds, all_of(ds));
    const Eigen::VectorXd resid = ds.outcome() - linear_scores(ds, all_of(ds), r.coefficients);
    EXPECT_LT(std::abs(resid.sum()), 1e-8);
    for (Eigen::Index j = 0; j < 6; ++j) EXPECT_LT(std::abs(ds.features().col(j).dot(resid)), 1e-8);
  }
}

TEST(FitOls, RSquaredInvariantUnderAffineFeatureTransforms) {
  std::mt19937_64 eng(5);
  std::uniform_real_distribution<double> scale(-20.0, 20.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Dataset ds = random_gaussian(40, 4, seed + 100);
    Eigen::MatrixXd x = ds.features();
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      double a = scale(eng);
      if (std::abs(a) < 0.1) a = 3.0;
      x.col(j) = (a * x.col(j).array() + scale(eng)).matrix();
    }
    const Dataset moved(x, ds.outcome(), OutcomeKind::Continuous);
    EXPECT_NEAR(fit_ols(ds, all_of(ds)).accuracy, fit_ols(moved, all_of(moved)).accuracy, 1e-10);
  }
}

TEST(Auc, SpecExamples) {
  const std::vector<double> labels{0, 0, 1, 1};
  EXPECT_EQ(auc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, labels), 1.0);
  EXPECT_EQ(auc(std::vector<double>{0.3, 0.3, 0.3, 0.3}, labels), 0.5);
  const std::vector<double> mixed{0.9, 0.2, 0.8, 0.1};
  EXPECT_EQ(testing::brute_force_auc(mixed, labels), 0.25);
  EXPECT_EQ(auc(mixed, labels), 0.25);
}

TEST(Auc, Errors) {
  EXPECT_THROW(auc(std::vector<double>{1, 2}, std::vector<double>{1, 1}), DataError);
  EXPECT_THROW(auc(std::vector<double>{1, 2}, std::vector<double>{0, 2}), DataError);
  EXPECT_THROW(auc(std::vector<double>{1, 2, 3}, std::vector<double>{0, 1}), DataError);
}

TEST(Auc, MidranksEqualPairCountingWithTies) {
  std::mt19937_64 eng(2024);
  for (int instance = 0; instance < 200; ++instance) {
    const std::size_t n = 2 + eng() % 49;
    std::vector<double> scores(n), labels(n);
    const int levels = 1 + static_cast<int>(eng() % 8);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = static_cast<double>(eng() % static_cast<std::uint64_t>(levels));
      labels[i] = static_cast<double>(eng() % 2);
    }
    labels[0] = 0;
    labels[1] = 1;
    EXPECT_EQ(auc(scores, labels), testing::brute_force_auc(scores, labels)) << "instance " << instance;
  }
}

TEST(Auc, NegatedScoresGiveComplement) {
  std::mt19937_64 eng(9);
  std::normal_distribution<double> normal;
  for (int instance = 0; instance < 50; ++instance) {
    std::vector<double> scores(30), neg(30), labels(30);
    for (std::size_t i = 0; i < 30; ++i) {
      scores[i] = normal(eng);
      neg[i] = -scores[i];
      labels[i] = i % 3 == 0 ? 1 : 0;
    }
    EXPECT_NEAR(auc(scores, labels) + auc(neg, labels), 1.0, 1e-15);
  }
}

TEST(FitLogistic, SeparablePairHasPerfectAuc) {
  const Dataset ds = column_data({{0, 1}}, {0, 1}, OutcomeKind::Binary);
  const FitResult r = fit_logistic(ds, FeatureSubset{{0}}, LearnerSpec{LearnerKind::LogisticAuc});
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_TRUE(r.coefficients.allFinite());
}

TEST(FitLogistic, IndependentFeatureGivesAucNearHalf) {
  std::mt19937_64 eng(77);
  std::normal_distribution<double> normal;
  std::vector<double> x(1000), y(1000);
  for (std::size_t i = 0; i < 1000; ++i) {
    x[i] = normal(eng);
    y[i] = static_cast<double>(i % 2);
  }
  const FitResult r = fit_logistic(column_data({x}, y, OutcomeKind::Binary), FeatureSubset{{0}},
                                   LearnerSpec{LearnerKind::LogisticAuc});
  EXPECT_TRUE(r.converged);
  EXPECT_LT(std::abs(r.accuracy - 0.5), 0.05);
}

TEST(FitLogistic, CollinearWithoutRidgeNeverReturnsNaN) {
  const std::vector<double> x{0.1, 0.4, 0.35, 0.8, 0.9, 0.2, 0.6, 0.75};
  const std::vector<double> y{0, 0, 1, 1, 1, 0, 0, 1};
  const Dataset ds = column_data({x, x}, y, OutcomeKind::Binary);
  LearnerSpec spec{LearnerKind::LogisticAuc};
  spec.ridge = 0.0;
  try {
    const FitResult r = fit_logistic(ds, FeatureSubset{{0, 1}}, spec);
    EXPECT_FALSE(r.converged);
    EXPECT_TRUE(r.coefficients.allFinite());
    EXPECT_TRUE(std::isfinite(r.accuracy));
  } catch (const NumericError&) {
    SUCCEED();
  }
}

TEST(FitLogistic, IrlsMatchesGradientAscentOracle) {
  std::mt19937_64 eng(31);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif;
  const std::size_t n = 600;
  std::vector<double> x1(n), x2(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x1[i] = normal(eng);
    x2[i] = normal(eng);
    const double eta = 0.5 + 1.5 * x1[i] - 1.0 * x2[i];
    y[i] = unif(eng) < 1.0 / (1.0 + std::exp(-eta)) ? 1.0 : 0.0;
  }
  const Dataset ds = column_data({x1, x2}, y, OutcomeKind::Binary);
  const FeatureSubset both{{0, 1}};
  const FitResult r = fit_logistic(ds, both, LearnerSpec{LearnerKind::LogisticAuc});
  ASSERT_TRUE(r.converged);

  Eigen::MatrixXd design(static_cast<Eigen::Index>(n), 3);
  design.col(0).setOnes();
  design.col(1) = ds.features().col(0);
  design.col(2) = ds.features().col(1);
  const Eigen::VectorXd oracle = testing::gradient_ascent_logistic(design, ds.outcome(), 1e-8, 20000, 1.0);
  for (Eigen::Index j = 0; j < 3; ++j) {
    EXPECT_NEAR(r.coefficients(j), oracle(j), 0.1 * std::abs(oracle(j))) << "coefficient " << j;
  }
}

TEST(AccuracyOf, DispatchesAndIsPure) {
  const Dataset lin = column_data({{0, 1, 2, 3}}, {1, 3, 5, 7});
  const LearnerSpec ols{};
  EXPECT_NEAR(accuracy_of(lin, FeatureSubset{{0}}, ols), 1.0, 1e-12);

  const Dataset noisy = random_gaussian(50, 5, 8, 3.0);
  const FeatureSubset s{{0, 2, 4}};
  EXPECT_EQ(accuracy_of(noisy, s, ols), accuracy_of(noisy, s, ols));

  const Dataset sep = column_data({{0, 1, 2, 3}}, {0, 0, 1, 1}, OutcomeKind::Binary);
  EXPECT_EQ(accuracy_of(sep, FeatureSubset{{0}}, LearnerSpec{LearnerKind::LogisticAuc}), 1.0);
}

TEST(AccuracyOf, RejectsLearnerOutcomeMismatch) {
  const Dataset cont = column_data({{0, 1, 2}}, {0, 1, 3});
  EXPECT_THROW(accuracy_of(cont, FeatureSubset{{0}}, LearnerSpec{LearnerKind::LogisticAuc}), ConfigError);
  const Dataset bin = column_data({{0, 1, 2}}, {0, 1, 1}, OutcomeKind::Binary);
  EXPECT_THROW(accuracy_of(bin, FeatureSubset{{0}}, LearnerSpec{}), ConfigError);
}

TEST(Evaluate, OutOfSampleRSquaredCanBeNegative) {
  const Dataset train = column_data({{0, 1, 2, 3}}, {0, 1, 2, 3});
  const Dataset test = column_data({{0, 1, 2, 3}}, {3, 2, 1, 0});
  const FitResult model = fit_ols(train, FeatureSubset{{0}});
  EXPECT_LT(evaluate(test, FeatureSubset{{0}}, model, LearnerSpec{}), 0.0);
  EXPECT_NEAR(evaluate(train, FeatureSubset{{0}}, model, LearnerSpec{}), 1.0, 1e-12);
}

}  // namespace
}  // namespace harvest
