#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "actrec/gmm.hpp"

namespace actrec {

struct PlattParameters {
  double a = 1.0;
  double b = 0.0;

  double probability(double score) const;
};

/// Fits sigma(a*s + b) to 0/1 labels by damped Newton on the Bernoulli likelihood.
PlattParameters platt_calibrate(const Eigen::VectorXd& scores, const std::vector<int>& labels,
                                std::size_t max_iterations = 100, double tolerance = 1e-8);

struct SvmOptions {
  double lambda = 1e-4;
  std::size_t epochs = 200;
  double eta0 = 0.1;
  std::uint64_t seed = 1;
  std::size_t min_samples_per_class = 10;
};

/// One-vs-rest linear max-margin classifier over standardized features with
/// per-class sigmoid calibration.
struct LinearActivityClassifier {
  std::vector<std::string> labels;
  Standardizer standardizer;
  Eigen::MatrixXd weights;  // classes x dimension
  Eigen::VectorXd bias;
  std::vector<PlattParameters> calibration;

  std::size_t classes() const { return labels.size(); }
  Eigen::VectorXd scores(const Eigen::VectorXd& raw) const;
  /// Argmax of the raw scores, ties to the lowest index.
  std::size_t predict(const Eigen::VectorXd& raw) const;
  /// Calibrated per-class probabilities renormalized to sum to 1.
  Eigen::VectorXd posterior(const Eigen::VectorXd& raw) const;
};

/// `labels[i]` indexes `class_names`. Throws DegenerateLabels with fewer than
/// two classes or too few samples in one.
LinearActivityClassifier train_naive(const Eigen::MatrixXd& features, const std::vector<std::size_t>& labels,
                                     const std::vector<std::string>& class_names, const SvmOptions& options = {});

/// alpha'(j) proportional to sum_k alpha(k) P(j|k) P(j|x) / P(j) with uniform P(j).
Eigen::VectorXd one_level_step(const Eigen::VectorXd& alpha, const Eigen::VectorXd& class_posterior,
                               const Eigen::MatrixXd& transitions);

/// Drops the NEUTRAL row and column of an activity table and renormalizes rows.
Eigen::MatrixXd without_neutral(const Eigen::MatrixXd& act_trans);

}  // namespace actrec
