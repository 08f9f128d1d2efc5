#pragma once

#include "harvest/dataset.hpp"
#include "harvest/sampler.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <string_view>

namespace harvest {

enum class LearnerKind { OlsRSquared, LogisticAuc };

std::string_view to_string(LearnerKind kind);
LearnerKind parse_learner_kind(std::string_view text);

struct LearnerSpec {
  LearnerKind kind = LearnerKind::OlsRSquared;
  double ridge = 1e-8;        // added to the non-intercept IRLS curvature
  int max_iterations = 50;    // IRLS cap
  double tolerance = 1e-8;    // IRLS stop on max |coefficient change|

  /// Throws ConfigError on negative ridge or non-positive caps.
  void validate() const;
};

/// Outcome kind a learner requires.
OutcomeKind required_outcome(LearnerKind kind);

/// Throws ConfigError when the learner cannot be used with this outcome.
void check_compatible(const LearnerSpec& spec, OutcomeKind kind);

struct FitResult {
  Eigen::VectorXd coefficients;  // intercept first, then one per subset feature
  double accuracy = 0.0;
  // OLS: design had full column rank. Logistic: IRLS met the tolerance
  // before max_iterations with a full-rank curvature matrix.
  bool converged = true;
  int iterations = 0;
};

/// Least squares on [1, X_subset] via a complete orthogonal decomposition.
/// Rank-deficient designs get the minimum-norm solution and converged=false.
/// accuracy is R^2 = 1 - SSE/SST, clamped to [0, 1].
FitResult fit_ols(const Dataset& ds, const FeatureSubset& subset);

/// Ridge-stabilized logistic regression by IRLS. accuracy is the training AUC
/// of the fitted linear scores, reported even when the iteration cap is hit.
FitResult fit_logistic(const Dataset& ds, const FeatureSubset& subset, const LearnerSpec& spec);

/// Fits the learner named by spec.kind.
FitResult fit(const Dataset& ds, const FeatureSubset& subset, const LearnerSpec& spec);

/// Estimated accuracy of `subset` on the training rows.
double accuracy_of(const Dataset& ds, const FeatureSubset& subset, const LearnerSpec& spec);

/// Linear predictor intercept + X_subset * beta for every row of `ds`.
Eigen::VectorXd linear_scores(const Dataset& ds, const FeatureSubset& subset,
                              const Eigen::VectorXd& coefficients);

/// Accuracy of a fitted model on other rows: out-of-sample R^2 (may be
/// negative) or AUC, depending on spec.kind.
double evaluate(const Dataset& ds, const FeatureSubset& subset, const FitResult& model,
                const LearnerSpec& spec);

/// Criterion value meaning "no association": 0 for R^2, 0.5 for AUC.
double independence_value(LearnerKind kind);

/// Area under the ROC curve in Mann-Whitney form: the fraction of
/// (positive, negative) pairs with the positive scored higher, ties counted
/// as one half. O(N log N) via midranks. Labels must be 0 or 1 with both
/// classes present.
double auc(std::span<const double> scores, std::span<const double> labels);

}  // namespace harvest
