#include "actrec/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "actrec/error.hpp"

namespace actrec {

namespace {

constexpr double kProbabilityClamp = 1e-12;

double sigmoid(double v) {
  if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

// Negative log-likelihood of labels under sigma(a*s + b), computed stably.
double platt_objective(const Eigen::VectorXd& s, const std::vector<int>& y, double a, double b) {
  double f = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double v = a * s(i) + b;
    // log(1 + exp(v)) - y v
    const double softplus = v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
    f += softplus - (y[static_cast<std::size_t>(i)] ? v : 0.0);
  }
  return f;
}

}  // namespace

double PlattParameters::probability(double score) const {
  return std::clamp(sigmoid(a * score + b), kProbabilityClamp, 1.0 - kProbabilityClamp);
}

PlattParameters platt_calibrate(const Eigen::VectorXd& scores, const std::vector<int>& labels,
                                std::size_t max_iterations, double tolerance) {
  if (static_cast<std::size_t>(scores.size()) != labels.size())
    throw Error(ErrorCode::DimensionMismatch, "scores and labels differ in length");
  if (labels.empty()) throw Error(ErrorCode::DegenerateLabels, "no samples to calibrate");
  const double positives = static_cast<double>(std::count_if(labels.begin(), labels.end(), [](int v) { return v != 0; }));
  const double negatives = static_cast<double>(labels.size()) - positives;
  PlattParameters p;
  p.a = 0.0;
  p.b = std::log((positives + 1.0) / (negatives + 1.0));
  double f = platt_objective(scores, labels, p.a, p.b);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    double h11 = 1e-12, h22 = 1e-12, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
      const double q = sigmoid(p.a * scores(i) + p.b);
      const double d1 = q - (labels[static_cast<std::size_t>(i)] ? 1.0 : 0.0);
      const double d2 = q * (1.0 - q);
      h11 += scores(i) * scores(i) * d2;
      h22 += d2;
      h21 += scores(i) * d2;
      g1 += scores(i) * d1;
      g2 += d1;
    }
    if (std::abs(g1) < tolerance && std::abs(g2) < tolerance) break;
    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;
    double step = 1.0;
    bool moved = false;
    while (step >= 1e-10) {
      const double na = p.a + step * da;
      const double nb = p.b + step * db;
      const double nf = platt_objective(scores, labels, na, nb);
      if (nf < f + 1e-4 * step * gd) {
        p.a = na;
        p.b = nb;
        f = nf;
        moved = true;
        break;
      }
      step /= 2.0;
    }
    if (!moved) break;
  }
  return p;
}

Eigen::VectorXd LinearActivityClassifier::scores(const Eigen::VectorXd& raw) const {
  return weights * standardizer.apply(raw) + bias;
}

std::size_t LinearActivityClassifier::predict(const Eigen::VectorXd& raw) const {
  const Eigen::VectorXd s = scores(raw);
  Eigen::Index arg = 0;
  for (Eigen::Index i = 1; i < s.size(); ++i)
    if (s(i) > s(arg)) arg = i;
  return static_cast<std::size_t>(arg);
}

Eigen::VectorXd LinearActivityClassifier::posterior(const Eigen::VectorXd& raw) const {
  const Eigen::VectorXd s = scores(raw);
  Eigen::VectorXd p(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) p(i) = calibration[static_cast<std::size_t>(i)].probability(s(i));
  return p / p.sum();
}

LinearActivityClassifier train_naive(const Eigen::MatrixXd& features, const std::vector<std::size_t>& labels,
                                     const std::vector<std::string>& class_names, const SvmOptions& options) {
  const std::size_t k = class_names.size();
  if (static_cast<std::size_t>(features.rows()) != labels.size())
    throw Error(ErrorCode::DimensionMismatch, "feature rows and labels differ in length");
  if (k < 2) throw Error(ErrorCode::DegenerateLabels, "need at least two classes");
  std::vector<std::size_t> counts(k, 0);
  for (auto l : labels) {
    if (l >= k) throw Error(ErrorCode::DegenerateLabels, "label index out of range");
    ++counts[l];
  }
  for (std::size_t c = 0; c < k; ++c)
    if (counts[c] < options.min_samples_per_class)
      throw Error(ErrorCode::DegenerateLabels, "class '" + class_names[c] + "' has " + std::to_string(counts[c]) +
                                                   " samples, need " + std::to_string(options.min_samples_per_class));

  LinearActivityClassifier clf;
  clf.labels = class_names;
  clf.standardizer = Standardizer::fit(features, 1e-2);
  const Eigen::MatrixXd x = clf.standardizer.apply(features);
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (labels[static_cast<std::size_t>(a)] != labels[static_cast<std::size_t>(b)])
      return labels[static_cast<std::size_t>(a)] < labels[static_cast<std::size_t>(b)];
    for (Eigen::Index j = 0; j < d; ++j)
      if (x(a, j) != x(b, j)) return x(a, j) < x(b, j);
    return false;
  });
  // Sample-major copy so each update reads contiguous memory.
  Eigen::MatrixXd xt(d, n);
  std::vector<std::size_t> y(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    xt.col(i) = x.row(order[static_cast<std::size_t>(i)]).transpose();
    y[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
  }

  clf.weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), d);
  clf.bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(options.seed);
  std::vector<std::vector<Eigen::Index>> schedule(options.epochs);
  for (auto& epoch : schedule) {
    std::shuffle(perm.begin(), perm.end(), rng);
    epoch = perm;
  }
  for (std::size_t c = 0; c < k; ++c) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
    double scale = 1.0;  // effective weights are scale * w
    double b = 0.0;
    std::size_t t = 0;
    for (const auto& epoch : schedule) {
      for (Eigen::Index i : epoch) {
        ++t;
        const double eta = options.eta0 / (1.0 + options.lambda * options.eta0 * static_cast<double>(t));
        const double target = y[static_cast<std::size_t>(i)] == c ? 1.0 : -1.0;
        const double margin = target * (scale * w.dot(xt.col(i)) + b);
        scale *= 1.0 - eta * options.lambda;
        if (margin < 1.0) {
          w += (eta * target / scale) * xt.col(i);
          b += eta * target;
        }
        if (scale < 1e-9) {
          w *= scale;
          scale = 1.0;
        }
      }
    }
    clf.weights.row(static_cast<Eigen::Index>(c)) = (scale * w).transpose();
    clf.bias(static_cast<Eigen::Index>(c)) = b;
  }

  const Eigen::MatrixXd all_scores = (clf.weights * x.transpose()).colwise() + clf.bias;
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<int> binary(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) binary[i] = labels[i] == c ? 1 : 0;
    clf.calibration.push_back(platt_calibrate(all_scores.row(static_cast<Eigen::Index>(c)).transpose(), binary));
  }
  return clf;
}

Eigen::VectorXd one_level_step(const Eigen::VectorXd& alpha, const Eigen::VectorXd& class_posterior,
                               const Eigen::MatrixXd& transitions) {
  if (alpha.size() != class_posterior.size() || transitions.rows() != alpha.size() ||
      transitions.cols() != alpha.size())
    throw Error(ErrorCode::DimensionMismatch, "one-level step inputs differ in size");
  Eigen::VectorXd next = (transitions.transpose() * alpha).cwiseProduct(class_posterior);
  const double total = next.sum();
  if (!(total > 0.0) || !std::isfinite(total))
    return Eigen::VectorXd::Constant(alpha.size(), 1.0 / static_cast<double>(alpha.size()));
  return next / total;
}

Eigen::MatrixXd without_neutral(const Eigen::MatrixXd& act_trans) {
  const Eigen::Index n = act_trans.rows() - 1;
  if (n < 1) throw Error(ErrorCode::InvalidModel, "activity table has no non-neutral activity");
  Eigen::MatrixXd out = act_trans.topLeftCorner(n, n);
  for (Eigen::Index i = 0; i < n; ++i) out.row(i) /= out.row(i).sum();
  return out;
}

}  // namespace actrec
