#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "actrec/skeleton.hpp"

namespace actrec {

/// Per-dimension z-scoring with statistics from the training split.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  /// `min_scale` keeps near-constant dimensions from being blown up.
  static Standardizer fit(const Eigen::MatrixXd& samples, double min_scale);
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd apply(const Eigen::MatrixXd& rows) const;
  std::size_t dimension() const { return static_cast<std::size_t>(mean.size()); }
};

/// One diagonal-covariance mixture component, i.e. one sub-activity.
struct GaussianCluster {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
  double weight = 1.0;
  std::string origin;     // activity the cluster was fitted on
  bool negative = false;  // fitted on an activity from another location

  double log_density(const Eigen::VectorXd& x) const;
};

struct GmmOptions {
  std::size_t max_iterations = 300;
  double tolerance = 1e-6;        // on mean per-sample log-likelihood
  double variance_floor = 1e-6;
  double weight_floor = 1e-8;     // below this a component is reseeded once
  double monotone_slack = 1e-7;
  bool check_monotone = false;    // throw if EM ever decreases the likelihood
};

struct GmmFit {
  std::vector<GaussianCluster> clusters;
  /// Mean per-sample log-likelihood after each E-step.
  std::vector<double> log_likelihood;
  /// Trace index at which a reseed restarted EM, or -1.
  int reseeded_at = -1;
};

/// EM for a k-component diagonal GMM over sample rows, seeded by k-means++.
/// Throws TooFewSamples when rows < 2k and DegenerateCluster when a component
/// collapses twice.
GmmFit fit_gmm(const Eigen::MatrixXd& samples, std::size_t k, std::uint64_t seed, const GmmOptions& options = {});

/// Location-specific sub-activity vocabulary.
struct SubActivityBank {
  Location location = Location::Office;
  std::vector<GaussianCluster> clusters;
  Standardizer standardizer;

  std::size_t size() const { return clusters.size(); }
  std::size_t dimension() const { return standardizer.dimension(); }

  /// log P(y) = log of the bank weights.
  Eigen::VectorXd log_prior() const;
  /// log P(y | x) for a standardized x, each entry floored at -745.
  Eigen::VectorXd log_posterior(const Eigen::VectorXd& standardized) const;
  Eigen::VectorXd posterior(const Eigen::VectorXd& standardized) const;
};

inline constexpr double kLogPosteriorFloor = -745.0;

struct ActivitySamples {
  std::string activity;
  Eigen::MatrixXd samples;  // raw feature rows
};

struct BankOptions {
  std::size_t clusters_per_activity = 5;
  double min_scale = 1e-2;
  std::uint64_t seed = 1;
  GmmOptions gmm;
};

/// Per-source fit outcome reported by build_bank.
struct BankSourceSummary {
  std::string activity;
  std::size_t samples = 0;
  std::size_t components = 0;
  double final_log_likelihood = 0.0;  // mean per sample
  bool negative = false;
};

/// Fits the standardizer on every row supplied, then a GMM per in-location
/// activity and one negative cluster per remaining activity. Weights are
/// proportional to source sample count times mixture weight.
SubActivityBank build_bank(const std::vector<ActivitySamples>& training, const std::vector<std::string>& in_location,
                           Location location, const BankOptions& options = {},
                           std::vector<BankSourceSummary>* summary = nullptr);

/// Row-wise posteriors for standardized sample rows.
Eigen::MatrixXd soft_labels(const SubActivityBank& bank, const Eigen::MatrixXd& standardized_rows);

}  // namespace actrec
