#include "oracles.hpp"

#include <cmath>
#include <functional>

namespace oracle {

namespace {

Eigen::VectorXd normalized(Eigen::VectorXd v) { return v / v.sum(); }

Eigen::MatrixXd random_stochastic(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(1e-3, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = u(rng);
    m.row(r) /= m.row(r).sum();
  }
  return m;
}

}  // namespace

double enumerate_substructure(const actrec::TransitionTables& tables, std::size_t z, std::size_t z_prev,
                              const std::vector<Eigen::VectorXd>& posteriors, const Eigen::VectorXd& boundary) {
  const auto m = static_cast<std::size_t>(tables.states());
  const std::size_t len = posteriors.size();
  const Eigen::VectorXd prior_prev =
      boundary.size() == 0 ? Eigen::VectorXd::Constant(static_cast<Eigen::Index>(m), 1.0 / static_cast<double>(m))
                           : normalized(boundary);
  const Eigen::MatrixXd& trans = tables.sub_trans[z];
  std::vector<std::size_t> seq(len, 0);
  double best = 0.0;
  while (true) {
    const auto y1 = static_cast<Eigen::Index>(seq[0]);
    double a = 0.0;
    for (std::size_t yp = 0; yp < m; ++yp) a += trans(static_cast<Eigen::Index>(yp), y1) * prior_prev(static_cast<Eigen::Index>(yp));
    double p = a * posteriors[0](y1) / tables.sub_prior(y1);
    for (std::size_t t = 1; t < len; ++t) {
      const auto y = static_cast<Eigen::Index>(seq[t]);
      p *= trans(static_cast<Eigen::Index>(seq[t - 1]), y) * posteriors[t](y) / tables.sub_prior(y);
    }
    best = std::max(best, p);
    std::size_t k = 0;
    while (k < len && ++seq[k] == m) seq[k++] = 0;
    if (k == len) break;
  }
  return tables.act_trans(static_cast<Eigen::Index>(z_prev), static_cast<Eigen::Index>(z)) * best;
}

double viterbi_substructure(const actrec::TransitionTables& tables, std::size_t z, std::size_t z_prev,
                            const std::vector<Eigen::VectorXd>& posteriors) {
  const Eigen::Index m = tables.sub_prior.size();
  const Eigen::MatrixXd& trans = tables.sub_trans[z];
  Eigen::VectorXd delta(m);
  for (Eigen::Index y = 0; y < m; ++y)
    delta(y) = trans.col(y).mean() * posteriors[0](y) / tables.sub_prior(y);
  for (std::size_t t = 1; t < posteriors.size(); ++t) {
    Eigen::VectorXd next(m);
    for (Eigen::Index y = 0; y < m; ++y) {
      double best = 0.0;
      for (Eigen::Index yp = 0; yp < m; ++yp) best = std::max(best, delta(yp) * trans(yp, y));
      next(y) = best * posteriors[t](y) / tables.sub_prior(y);
    }
    delta = next;
  }
  return tables.act_trans(static_cast<Eigen::Index>(z_prev), static_cast<Eigen::Index>(z)) * delta.maxCoeff();
}

Eigen::VectorXd segmentation_posterior(const actrec::TransitionTables& tables,
                                       const std::vector<Eigen::VectorXd>& posteriors, std::size_t max_len) {
  const std::size_t n = tables.activity_count();
  const std::size_t len = posteriors.size();
  // score[split][end][z * n + zp] for the substructure covering frames split+1..end.
  std::vector<std::vector<std::vector<double>>> score(len + 1, std::vector<std::vector<double>>(len + 1));
  for (std::size_t split = 0; split < len; ++split) {
    for (std::size_t end = split + 1; end <= len; ++end) {
      const std::vector<Eigen::VectorXd> window(posteriors.begin() + static_cast<std::ptrdiff_t>(split),
                                                posteriors.begin() + static_cast<std::ptrdiff_t>(end));
      auto& cell = score[split][end];
      cell.resize(n * n);
      for (std::size_t z = 0; z < n; ++z)
        for (std::size_t zp = 0; zp < n; ++zp) cell[z * n + zp] = viterbi_substructure(tables, z, zp, window);
    }
  }
  // g(t): normalised P(z | O; G_t), recomputed along every path of split points.
  std::function<Eigen::VectorXd(std::size_t)> g = [&](std::size_t t) -> Eigen::VectorXd {
    if (t == 0) return normalized(tables.act_prior);
    Eigen::VectorXd best = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    const std::size_t lo = t > max_len ? t - max_len : 0;
    for (std::size_t split = lo; split < t; ++split) {
      const Eigen::VectorXd prev = g(split);
      for (std::size_t z = 0; z < n; ++z) {
        double cand = 0.0;
        for (std::size_t zp = 0; zp < n; ++zp) cand += prev(static_cast<Eigen::Index>(zp)) * score[split][t][z * n + zp];
        best(static_cast<Eigen::Index>(z)) = std::max(best(static_cast<Eigen::Index>(z)), cand);
      }
    }
    return normalized(best);
  };
  return g(len).array().log().matrix();
}

actrec::TransitionTables random_tables(std::size_t activities, std::size_t states, std::mt19937_64& rng) {
  actrec::TransitionTables t;
  const auto m = static_cast<Eigen::Index>(states);
  const auto n = static_cast<Eigen::Index>(activities);
  for (std::size_t z = 0; z < activities; ++z) t.sub_trans.push_back(random_stochastic(m, m, rng));
  t.act_trans = random_stochastic(n, n, rng);
  t.sub_prior = random_stochastic(1, m, rng).row(0).transpose();
  t.act_prior = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  return t;
}

std::vector<Eigen::VectorXd> random_posteriors(std::size_t frames, std::size_t states, std::mt19937_64& rng) {
  std::vector<Eigen::VectorXd> out;
  for (std::size_t i = 0; i < frames; ++i)
    out.push_back(random_stochastic(1, static_cast<Eigen::Index>(states), rng).row(0).transpose());
  return out;
}

namespace {

template <std::size_t N>
void copy_mirrored_quaternion(const std::array<double, N>& src, std::size_t from, std::array<double, N>& dst,
                              std::size_t to) {
  dst[to] = src[from];
  dst[to + 1] = src[from + 1];
  dst[to + 2] = -src[from + 2];
  dst[to + 3] = -src[from + 3];
}

template <std::size_t N, std::size_t M>
std::size_t slot_of(const std::array<actrec::Joint, M>& order, actrec::Joint j) {
  for (std::size_t i = 0; i < M; ++i)
    if (order[i] == j) return i;
  return N;
}

}  // namespace

actrec::FeatureVector mirror_features(const actrec::FeatureVector& f) {
  using actrec::mirror_joint;
  actrec::FeatureVector out = f;
  for (std::size_t i = 0; i < actrec::kPoseJoints.size(); ++i) {
    const std::size_t k = slot_of<99>(actrec::kPoseJoints, mirror_joint(actrec::kPoseJoints[i]));
    copy_mirrored_quaternion(f.body_pose, 4 * i, out.body_pose, 4 * k);
  }
  // feet: left <- mirrored right and vice versa
  for (int side = 0; side < 2; ++side) {
    const std::size_t src = 40 + 3 * static_cast<std::size_t>(side);
    const std::size_t dst = 40 + 3 * static_cast<std::size_t>(1 - side);
    out.body_pose[dst] = -f.body_pose[src];
    out.body_pose[dst + 1] = f.body_pose[src + 1];
    out.body_pose[dst + 2] = f.body_pose[src + 2];
  }
  for (int side = 0; side < 2; ++side) {
    const std::size_t src = 8 * static_cast<std::size_t>(side);
    const std::size_t dst = 8 * static_cast<std::size_t>(1 - side);
    for (std::size_t k = 0; k < 8; ++k) out.hand[dst + k] = f.hand[src + k];
    out.hand[dst] = -f.hand[src];
    out.hand[dst + 3] = -f.hand[src + 3];
  }
  const std::size_t joints = actrec::kOrientedJoints.size();
  for (std::size_t o = 0; o < actrec::kMotionOffsets.size(); ++o) {
    for (std::size_t i = 0; i < joints; ++i) {
      const std::size_t k = slot_of<99>(actrec::kOrientedJoints, mirror_joint(actrec::kOrientedJoints[i]));
      copy_mirrored_quaternion(f.motion, 4 * (o * joints + i), out.motion, 4 * (o * joints + k));
    }
  }
  return out;
}

std::vector<Eigen::VectorXd> logs(const std::vector<Eigen::VectorXd>& p) {
  std::vector<Eigen::VectorXd> out;
  for (const auto& v : p) out.push_back(v.array().log().matrix());
  return out;
}

}  // namespace oracle
