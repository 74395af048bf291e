#include "actrec/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "actrec/error.hpp"

namespace actrec {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

// Column c of the result is log N(x_i; mean_c, var_c) for every row i.
Eigen::MatrixXd log_densities(const Eigen::MatrixXd& x, const std::vector<GaussianCluster>& clusters) {
  Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(clusters.size()));
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    const auto& g = clusters[c];
    const Eigen::VectorXd inv = g.variance.cwiseInverse();
    const double norm = static_cast<double>(x.cols()) * kLog2Pi + g.variance.array().log().sum();
    const Eigen::VectorXd maha = (x.rowwise() - g.mean.transpose()).array().square().matrix() * inv;
    out.col(static_cast<Eigen::Index>(c)) = (-0.5 * (maha.array() + norm)).matrix();
  }
  return out;
}

std::vector<Eigen::Index> kmeans_pp(const Eigen::MatrixXd& x, std::size_t k, std::mt19937_64& rng) {
  const Eigen::Index n = x.rows();
  std::vector<Eigen::Index> centers;
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  centers.push_back(pick(rng));
  Eigen::VectorXd d2 = (x.rowwise() - x.row(centers[0])).rowwise().squaredNorm();
  while (centers.size() < k) {
    const double total = d2.sum();
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double r = u(rng);
      for (chosen = 0; chosen < n - 1; ++chosen) {
        r -= d2(chosen);
        if (r <= 0.0) break;
      }
    } else {
      chosen = pick(rng);
    }
    centers.push_back(chosen);
    d2 = d2.cwiseMin((x.rowwise() - x.row(chosen)).rowwise().squaredNorm());
  }
  return centers;
}

Eigen::VectorXd floored(Eigen::VectorXd v, double floor) { return v.cwiseMax(floor); }

}  // namespace

Standardizer Standardizer::fit(const Eigen::MatrixXd& samples, double min_scale) {
  if (samples.rows() == 0) throw Error(ErrorCode::TooFewSamples, "cannot standardize an empty sample set");
  Standardizer s;
  s.mean = samples.colwise().mean().transpose();
  const Eigen::MatrixXd centered = samples.rowwise() - s.mean.transpose();
  s.scale = (centered.array().square().colwise().sum() / static_cast<double>(samples.rows())).sqrt().transpose();
  s.scale = s.scale.cwiseMax(min_scale);
  return s;
}

Eigen::VectorXd Standardizer::apply(const Eigen::VectorXd& x) const {
  if (x.size() != mean.size()) {
    throw Error(ErrorCode::DimensionMismatch, "feature has " + std::to_string(x.size()) + " entries, expected " +
                                                  std::to_string(mean.size()));
  }
  return (x - mean).cwiseQuotient(scale);
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& rows) const {
  if (rows.cols() != mean.size()) {
    throw Error(ErrorCode::DimensionMismatch, "feature rows have " + std::to_string(rows.cols()) +
                                                  " columns, expected " + std::to_string(mean.size()));
  }
  return (rows.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

double GaussianCluster::log_density(const Eigen::VectorXd& x) const {
  return -0.5 * (static_cast<double>(x.size()) * kLog2Pi + variance.array().log().sum() +
                 ((x - mean).array().square() / variance.array()).sum());
}

GmmFit fit_gmm(const Eigen::MatrixXd& x, std::size_t k, std::uint64_t seed, const GmmOptions& options) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (k == 0 || n < static_cast<Eigen::Index>(2 * k)) {
    throw Error(ErrorCode::TooFewSamples, "need at least " + std::to_string(2 * k) + " samples for " +
                                              std::to_string(k) + " components, got " + std::to_string(n));
  }
  const auto kk = static_cast<Eigen::Index>(k);
  std::mt19937_64 rng(seed);

  const Eigen::VectorXd global_mean = x.colwise().mean().transpose();
  const Eigen::VectorXd global_var = floored(
      ((x.rowwise() - global_mean.transpose()).array().square().colwise().sum() / static_cast<double>(n))
          .transpose()
          .matrix(),
      options.variance_floor);

  // k-means++ centres, then one hard assignment for initial spreads and weights.
  GmmFit fit;
  fit.clusters.resize(k);
  {
    const auto centers = kmeans_pp(x, k, rng);
    Eigen::MatrixXd dist(n, kk);
    for (Eigen::Index c = 0; c < kk; ++c) {
      dist.col(c) = (x.rowwise() - x.row(centers[static_cast<std::size_t>(c)])).rowwise().squaredNorm();
    }
    std::vector<std::vector<Eigen::Index>> members(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      dist.row(i).minCoeff(&best);
      members[static_cast<std::size_t>(best)].push_back(i);
    }
    for (std::size_t c = 0; c < k; ++c) {
      auto& g = fit.clusters[c];
      g.mean = x.row(centers[c]).transpose();
      g.variance = global_var;
      g.weight = std::max<double>(1.0, static_cast<double>(members[c].size())) / static_cast<double>(n);
      if (members[c].size() >= 2) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
        for (Eigen::Index i : members[c]) acc += (x.row(i).transpose() - g.mean).array().square().matrix();
        g.variance = floored(acc / static_cast<double>(members[c].size()), options.variance_floor);
      }
    }
    double total = 0.0;
    for (const auto& g : fit.clusters) total += g.weight;
    for (auto& g : fit.clusters) g.weight /= total;
  }

  bool reseeded = false;
  std::size_t monotone_from = 0;
  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    // E-step.
    Eigen::MatrixXd log_resp = log_densities(x, fit.clusters);
    for (Eigen::Index c = 0; c < kk; ++c) log_resp.col(c).array() += std::log(fit.clusters[static_cast<std::size_t>(c)].weight);
    Eigen::VectorXd sample_ll(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      sample_ll(i) = log_sum_exp(log_resp.row(i).transpose());
      log_resp.row(i).array() -= sample_ll(i);
    }
    const double ll = sample_ll.mean();
    fit.log_likelihood.push_back(ll);

    if (fit.log_likelihood.size() > monotone_from + 1) {
      const double prev = fit.log_likelihood[fit.log_likelihood.size() - 2];
      if (options.check_monotone && ll < prev - options.monotone_slack) {
        std::ostringstream msg;
        msg << "EM log-likelihood decreased from " << prev << " to " << ll << " at iteration " << iter;
        throw Error(ErrorCode::DegenerateCluster, msg.str());
      }
      if (ll - prev < options.tolerance) break;
    }
    if (iter + 1 == options.max_iterations) break;

    // M-step.
    const Eigen::MatrixXd resp = log_resp.array().exp().matrix();
    const Eigen::VectorXd mass = resp.colwise().sum().transpose();
    std::vector<std::size_t> collapsed;
    for (std::size_t c = 0; c < k; ++c) {
      auto& g = fit.clusters[c];
      const auto ci = static_cast<Eigen::Index>(c);
      g.weight = mass(ci) / static_cast<double>(n);
      if (g.weight < options.weight_floor) {
        collapsed.push_back(c);
        continue;
      }
      g.mean = (x.transpose() * resp.col(ci)) / mass(ci);
      const Eigen::MatrixXd centered_sq = (x.rowwise() - g.mean.transpose()).array().square().matrix();
      g.variance = floored((centered_sq.transpose() * resp.col(ci)) / mass(ci), options.variance_floor);
    }

    if (!collapsed.empty()) {
      if (reseeded) {
        throw Error(ErrorCode::DegenerateCluster,
                    "component " + std::to_string(collapsed.front()) + " collapsed again after reseeding");
      }
      reseeded = true;
      fit.reseeded_at = static_cast<int>(fit.log_likelihood.size());
      monotone_from = fit.log_likelihood.size();
      // Move each collapsed component onto the worst-explained samples.
      std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
      for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
      std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return sample_ll(a) < sample_ll(b); });
      for (std::size_t r = 0; r < collapsed.size(); ++r) {
        auto& g = fit.clusters[collapsed[r]];
        g.mean = x.row(order[r]).transpose();
        g.variance = global_var;
        g.weight = 1.0 / static_cast<double>(k);
      }
      double total = 0.0;
      for (const auto& g : fit.clusters) total += g.weight;
      for (auto& g : fit.clusters) g.weight /= total;
    }
  }
  return fit;
}

Eigen::VectorXd SubActivityBank::log_prior() const {
  Eigen::VectorXd p(static_cast<Eigen::Index>(clusters.size()));
  for (std::size_t c = 0; c < clusters.size(); ++c) p(static_cast<Eigen::Index>(c)) = std::log(clusters[c].weight);
  return p;
}

Eigen::VectorXd SubActivityBank::log_posterior(const Eigen::VectorXd& x) const {
  if (x.size() != static_cast<Eigen::Index>(dimension())) {
    throw Error(ErrorCode::DimensionMismatch, "feature has " + std::to_string(x.size()) + " entries, bank expects " +
                                                  std::to_string(dimension()));
  }
  Eigen::VectorXd joint(static_cast<Eigen::Index>(clusters.size()));
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    joint(static_cast<Eigen::Index>(c)) = std::log(clusters[c].weight) + clusters[c].log_density(x);
  }
  const double z = log_sum_exp(joint);
  return (joint.array() - z).max(kLogPosteriorFloor).matrix();
}

Eigen::VectorXd SubActivityBank::posterior(const Eigen::VectorXd& x) const {
  Eigen::VectorXd p = log_posterior(x).array().exp().matrix();
  return p / p.sum();
}

SubActivityBank build_bank(const std::vector<ActivitySamples>& training, const std::vector<std::string>& in_location,
                           Location location, const BankOptions& options, std::vector<BankSourceSummary>* summary) {
  if (training.empty()) throw Error(ErrorCode::TooFewSamples, "no training data for bank");
  Eigen::Index total_rows = 0;
  const Eigen::Index d = training.front().samples.cols();
  for (const auto& a : training) {
    if (a.samples.cols() != d) throw Error(ErrorCode::DimensionMismatch, "activities disagree on feature dimension");
    total_rows += a.samples.rows();
  }
  Eigen::MatrixXd all(total_rows, d);
  Eigen::Index r = 0;
  for (const auto& a : training) {
    all.middleRows(r, a.samples.rows()) = a.samples;
    r += a.samples.rows();
  }

  SubActivityBank bank;
  bank.location = location;
  bank.standardizer = Standardizer::fit(all, options.min_scale);

  struct Source {
    std::vector<GaussianCluster> clusters;
    double count;
  };
  std::vector<Source> sources;
  auto find = [&](const std::string& name) -> const ActivitySamples& {
    for (const auto& a : training) {
      if (a.activity == name) return a;
    }
    throw Error(ErrorCode::MissingActivityData, "no training samples for activity '" + name + "'");
  };

  for (std::size_t i = 0; i < in_location.size(); ++i) {
    const auto& a = find(in_location[i]);
    if (a.samples.rows() < 10) {
      throw Error(ErrorCode::TooFewSamples, "activity '" + a.activity + "' has fewer than 10 samples");
    }
    GmmFit fit = fit_gmm(bank.standardizer.apply(a.samples), options.clusters_per_activity, options.seed + 31 * i,
                         options.gmm);
    for (auto& g : fit.clusters) g.origin = a.activity;
    if (summary)
      summary->push_back({a.activity, static_cast<std::size_t>(a.samples.rows()), fit.clusters.size(),
                          fit.log_likelihood.empty() ? 0.0 : fit.log_likelihood.back(), false});
    sources.push_back({std::move(fit.clusters), static_cast<double>(a.samples.rows())});
  }
  std::size_t negative_index = 0;
  for (const auto& a : training) {
    if (std::find(in_location.begin(), in_location.end(), a.activity) != in_location.end()) continue;
    GmmFit fit = fit_gmm(bank.standardizer.apply(a.samples), 1, options.seed + 7919 + negative_index++, options.gmm);
    fit.clusters.front().origin = a.activity;
    fit.clusters.front().negative = true;
    if (summary)
      summary->push_back({a.activity, static_cast<std::size_t>(a.samples.rows()), 1,
                          fit.log_likelihood.empty() ? 0.0 : fit.log_likelihood.back(), true});
    sources.push_back({std::move(fit.clusters), static_cast<double>(a.samples.rows())});
  }

  double total = 0.0;
  for (auto& s : sources) {
    for (auto& g : s.clusters) {
      g.weight *= s.count;
      total += g.weight;
    }
  }
  for (auto& s : sources) {
    for (auto& g : s.clusters) {
      g.weight /= total;
      bank.clusters.push_back(std::move(g));
    }
  }
  return bank;
}

Eigen::MatrixXd soft_labels(const SubActivityBank& bank, const Eigen::MatrixXd& rows) {
  Eigen::MatrixXd out(rows.rows(), static_cast<Eigen::Index>(bank.size()));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) out.row(i) = bank.posterior(rows.row(i).transpose()).transpose();
  return out;
}

}  // namespace actrec
