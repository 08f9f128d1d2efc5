#include "harvest/learners.hpp"

#include "harvest/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>

namespace harvest {

std::string_view to_string(LearnerKind kind) {
  return kind == LearnerKind::LogisticAuc ? "logistic" : "ols";
}

LearnerKind parse_learner_kind(std::string_view text) {
  if (text == "ols") return LearnerKind::OlsRSquared;
  if (text == "logistic") return LearnerKind::LogisticAuc;
  throw ConfigError("unknown learner '" + std::string(text) + "' (expected ols or logistic)");
}

void LearnerSpec::validate() const {
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) throw ConfigError("learner.ridge must be >= 0");
  if (max_iterations < 1) throw ConfigError("learner.max_iterations must be positive");
  if (!(tolerance > 0.0)) throw ConfigError("learner.tolerance must be positive");
}

OutcomeKind required_outcome(LearnerKind kind) {
  return kind == LearnerKind::LogisticAuc ? OutcomeKind::Binary : OutcomeKind::Continuous;
}

void check_compatible(const LearnerSpec& spec, OutcomeKind kind) {
  if (required_outcome(spec.kind) != kind) {
    throw ConfigError("learner '" + std::string(to_string(spec.kind)) + "' requires a " +
                      std::string(to_string(required_outcome(spec.kind))) +
                      " outcome, dataset outcome is " + std::string(to_string(kind)));
  }
}

double independence_value(LearnerKind kind) {
  return kind == LearnerKind::LogisticAuc ? 0.5 : 0.0;
}

namespace {

Eigen::MatrixXd design_matrix(const Dataset& ds, const FeatureSubset& subset) {
  const auto n = static_cast<Eigen::Index>(ds.rows());
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(subset.size()) + 1);
  x.col(0).setOnes();
  for (std::size_t c = 0; c < subset.size(); ++c) {
    if (subset.indices[c] >= ds.cols()) {
      throw ConfigError("feature index " + std::to_string(subset.indices[c]) +
                        " out of range for " + std::to_string(ds.cols()) + " features");
    }
    x.col(static_cast<Eigen::Index>(c) + 1) =
        ds.features().col(static_cast<Eigen::Index>(subset.indices[c]));
  }
  return x;
}

double total_sum_of_squares(const Eigen::VectorXd& y) {
  return (y.array() - y.mean()).square().sum();
}

template <typename Decomposition>
void set_rank_threshold(Decomposition& dec, Eigen::Index rows) {
  dec.setThreshold(static_cast<double>(rows) * std::numeric_limits<double>::epsilon());
}

}  // namespace

FitResult fit_ols(const Dataset& ds, const FeatureSubset& subset) {
  if (ds.outcome_kind() != OutcomeKind::Continuous) {
    throw ConfigError("OLS learner requires a continuous outcome");
  }
  const Eigen::VectorXd& y = ds.outcome();
  const double sst = total_sum_of_squares(y);
  if (!(sst > 0.0)) throw DataError("degenerate outcome: total sum of squares is zero");

  const Eigen::MatrixXd x = design_matrix(ds, subset);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  set_rank_threshold(cod, x.rows());
  cod.compute(x);

  FitResult out;
  out.coefficients = cod.solve(y);
  out.converged = cod.rank() == x.cols();
  const double sse = (y - x * out.coefficients).squaredNorm();
  out.accuracy = std::clamp(1.0 - sse / sst, 0.0, 1.0);
  if (!std::isfinite(out.accuracy) || !out.coefficients.allFinite()) {
    throw NumericError("OLS produced non-finite values");
  }
  return out;
}

FitResult fit_logistic(const Dataset& ds, const FeatureSubset& subset, const LearnerSpec& spec) {
  if (ds.outcome_kind() != OutcomeKind::Binary) {
    throw ConfigError("logistic learner requires a binary outcome");
  }
  spec.validate();
  const Eigen::VectorXd& y = ds.outcome();
  const Eigen::MatrixXd x = design_matrix(ds, subset);
  const auto d = x.cols();

  const double mean = y.mean();
  if (mean <= 0.0 || mean >= 1.0) throw DataError("logistic learner needs both classes");

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
  beta(0) = std::log(mean / (1.0 - mean));
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(d, spec.ridge);
  penalty(0) = 0.0;

  FitResult out;
  out.converged = false;
  bool full_rank = true;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  set_rank_threshold(cod, d);
  for (int it = 1; it <= spec.max_iterations; ++it) {
    const Eigen::ArrayXd eta = (x * beta).array();
    const Eigen::ArrayXd prob = 1.0 / (1.0 + (-eta).exp());
    const Eigen::ArrayXd weight = prob * (1.0 - prob);

    Eigen::MatrixXd hessian = x.transpose() * (x.array().colwise() * weight).matrix();
    hessian.diagonal() += penalty;
    const Eigen::VectorXd gradient =
        x.transpose() * (y.array() - prob).matrix() - penalty.cwiseProduct(beta);

    cod.compute(hessian);
    full_rank = cod.rank() == d;
    const Eigen::VectorXd step = cod.solve(gradient);
    beta += step;
    out.iterations = it;
    if (!beta.allFinite()) throw NumericError("IRLS diverged");
    if (step.lpNorm<Eigen::Infinity>() < spec.tolerance) {
      out.converged = full_rank;
      break;
    }
  }

  out.coefficients = beta;
  const Eigen::VectorXd scores = x * beta;
  out.accuracy = auc(std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())),
                     std::span<const double>(y.data(), static_cast<std::size_t>(y.size())));
  return out;
}

FitResult fit(const Dataset& ds, const FeatureSubset& subset, const LearnerSpec& spec) {
  switch (spec.kind) {
    case LearnerKind::OlsRSquared:
      return fit_ols(ds, subset);
    case LearnerKind::LogisticAuc:
      return fit_logistic(ds, subset, spec);
  }
  throw ConfigError("unknown learner kind");
}

double accuracy_of(const Dataset& ds, const FeatureSubset& subset, const LearnerSpec& spec) {
  check_compatible(spec, ds.outcome_kind());
  return fit(ds, subset, spec).accuracy;
}

Eigen::VectorXd linear_scores(const Dataset& ds, const FeatureSubset& subset,
                              const Eigen::VectorXd& coefficients) {
  if (coefficients.size() != static_cast<Eigen::Index>(subset.size()) + 1) {
    throw ConfigError("coefficient vector does not match the feature subset");
  }
  return design_matrix(ds, subset) * coefficients;
}

double evaluate(const Dataset& ds, const FeatureSubset& subset, const FitResult& model,
                const LearnerSpec& spec) {
  check_compatible(spec, ds.outcome_kind());
  const Eigen::VectorXd scores = linear_scores(ds, subset, model.coefficients);
  const Eigen::VectorXd& y = ds.outcome();
  if (spec.kind == LearnerKind::OlsRSquared) {
    const double sst = total_sum_of_squares(y);
    if (!(sst > 0.0)) throw DataError("degenerate outcome: total sum of squares is zero");
    return 1.0 - (y - scores).squaredNorm() / sst;
  }
  return auc(std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())),
             std::span<const double>(y.data(), static_cast<std::size_t>(y.size())));
}

double auc(std::span<const double> scores, std::span<const double> labels) {
  if (scores.size() != labels.size()) {
    throw DataError("auc: " + std::to_string(scores.size()) + " scores but " +
                    std::to_string(labels.size()) + " labels");
  }
  std::int64_t n_pos = 0;
  for (double label : labels) {
    if (label == 1.0) {
      ++n_pos;
    } else if (label != 0.0) {
      throw DataError("auc: labels must be 0 or 1");
    }
  }
  const auto n = static_cast<std::int64_t>(labels.size());
  const std::int64_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw DataError("auc: labels contain a single class");
  for (double s : scores) {
    if (std::isnan(s)) throw DataError("auc: NaN score");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Twice the positive rank sum, kept integral: a tie block occupying
  // zero-based positions [lo, hi) has midrank (lo + hi + 1) / 2.
  std::int64_t twice_rank_sum = 0;
  std::size_t lo = 0;
  while (lo < order.size()) {
    std::size_t hi = lo + 1;
    while (hi < order.size() && scores[order[hi]] == scores[order[lo]]) ++hi;
    std::int64_t positives = 0;
    for (std::size_t i = lo; i < hi; ++i) positives += labels[order[i]] == 1.0 ? 1 : 0;
    twice_rank_sum += positives * static_cast<std::int64_t>(lo + hi + 1);
    lo = hi;
  }
  const std::int64_t twice_u = twice_rank_sum - n_pos * (n_pos + 1);
  return static_cast<double>(twice_u) / static_cast<double>(2 * n_pos * n_neg);
}

}  // namespace harvest
