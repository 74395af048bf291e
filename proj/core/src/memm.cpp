#include "actrec/memm.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "actrec/error.hpp"

namespace actrec {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

}  // namespace

Eigen::MatrixXd floor_rows(const Eigen::MatrixXd& weights, double eps) {
  const Eigen::Index m = weights.cols();
  Eigen::MatrixXd out(weights.rows(), m);
  for (Eigen::Index r = 0; r < weights.rows(); ++r) {
    const double total = weights.row(r).sum() + static_cast<double>(m) * eps;
    out.row(r) = (weights.row(r).array() + eps) / total;
    out.row(r) = (out.row(r).array() * (1.0 - static_cast<double>(m) * eps) + eps).matrix();
  }
  return out;
}

Eigen::MatrixXd neutral_transition(const std::vector<Eigen::MatrixXd>& activity_tables, double eps) {
  if (activity_tables.empty()) throw Error(ErrorCode::MissingActivityData, "no activity tables");
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(activity_tables[0].rows(), activity_tables[0].cols());
  for (const auto& t : activity_tables) {
    if (t.rows() != sum.rows() || t.cols() != sum.cols())
      throw Error(ErrorCode::DimensionMismatch, "activity transition tables differ in shape");
    sum += t;
  }
  const Eigen::MatrixXd clamped = (1.0 - sum.array()).max(eps).matrix();
  return floor_rows(clamped, eps);
}

Eigen::MatrixXd manual_activity_transitions(std::size_t activities, const ManualTransitions& manual) {
  if (activities == 0) throw Error(ErrorCode::MissingActivityData, "at least one activity is required");
  const auto n = static_cast<Eigen::Index>(activities);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j)
      a(i, j) = i == j ? manual.self : (n > 1 ? manual.to_others / static_cast<double>(n - 1) : 0.0);
    a(i, n) = manual.to_neutral;
  }
  a.row(n).head(n).setConstant(manual.neutral_to_activities / static_cast<double>(n));
  a(n, n) = manual.neutral_stay;
  for (Eigen::Index i = 0; i <= n; ++i) a.row(i) /= a.row(i).sum();
  return a;
}

TransitionTables estimate_transitions(const std::vector<SoftLabeledSequence>& sequences, std::size_t activities,
                                      const Eigen::VectorXd& sub_prior, const ManualTransitions& manual,
                                      double eps) {
  const Eigen::Index m = sub_prior.size();
  if (m == 0) throw Error(ErrorCode::InvalidModel, "empty sub-activity prior");
  std::vector<Eigen::MatrixXd> counts(activities, Eigen::MatrixXd::Zero(m, m));
  std::vector<bool> seen(activities, false);
  for (const auto& s : sequences) {
    if (s.activity >= activities)
      throw Error(ErrorCode::DimensionMismatch, "sequence activity index " + std::to_string(s.activity) +
                                                    " out of range");
    if (s.posteriors.cols() != m)
      throw Error(ErrorCode::DimensionMismatch, "soft labels have " + std::to_string(s.posteriors.cols()) +
                                                    " columns, expected " + std::to_string(m));
    seen[s.activity] = true;
    for (Eigen::Index t = 1; t < s.posteriors.rows(); ++t)
      counts[s.activity] += s.posteriors.row(t - 1).transpose() * s.posteriors.row(t);
  }
  for (std::size_t z = 0; z < activities; ++z)
    if (!seen[z]) throw Error(ErrorCode::MissingActivityData, "activity " + std::to_string(z) + " has no sequences");

  TransitionTables tables;
  for (auto& c : counts) tables.sub_trans.push_back(floor_rows(c, eps));
  tables.sub_trans.push_back(neutral_transition(tables.sub_trans, eps));
  tables.act_trans = manual_activity_transitions(activities, manual);
  tables.sub_prior = sub_prior / sub_prior.sum();
  tables.act_prior = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(activities + 1),
                                               1.0 / static_cast<double>(activities + 1));
  return tables;
}

CandidateReduction reduce_candidates(const Eigen::MatrixXd& log_candidates) {
  CandidateReduction out;
  const Eigen::Index n = log_candidates.rows();
  Eigen::VectorXd best(n);
  out.best_split.resize(static_cast<std::size_t>(n));
  for (Eigen::Index z = 0; z < n; ++z) {
    Eigen::Index arg = 0;
    double v = log_candidates(z, 0);
    for (Eigen::Index c = 1; c < log_candidates.cols(); ++c) {
      if (log_candidates(z, c) > v) {
        v = log_candidates(z, c);
        arg = c;
      }
    }
    best(z) = v;
    out.best_split[static_cast<std::size_t>(z)] = static_cast<std::size_t>(arg);
  }
  out.log_posterior = best.array() - log_sum_exp(best);
  Eigen::Index arg = 0;
  for (Eigen::Index z = 1; z < n; ++z)
    if (out.log_posterior(z) > out.log_posterior(arg)) arg = z;
  out.activity = static_cast<std::size_t>(arg);
  return out;
}

HierarchicalInference::HierarchicalInference(TransitionTables tables, InferenceOptions options)
    : tables_(std::move(tables)), options_(options) {
  const std::size_t n = tables_.activity_count();
  const auto m = static_cast<Eigen::Index>(tables_.states());
  if (n == 0 || m == 0) throw Error(ErrorCode::InvalidModel, "empty transition tables");
  if (options_.max_substructure == 0) throw Error(ErrorCode::InvalidModel, "max substructure length must be positive");
  if (tables_.act_trans.rows() != static_cast<Eigen::Index>(n) || tables_.act_trans.cols() != static_cast<Eigen::Index>(n))
    throw Error(ErrorCode::DimensionMismatch, "activity transition table has wrong shape");
  if (tables_.act_prior.size() != static_cast<Eigen::Index>(n))
    tables_.act_prior = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
  const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  for (const auto& t : tables_.sub_trans) {
    if (t.rows() != m || t.cols() != m)
      throw Error(ErrorCode::DimensionMismatch, "sub-activity transition table has wrong shape");
    log_sub_.push_back(t.array().log().matrix());
    log_uniform_boundary_.push_back((t.transpose() * uniform).array().log().matrix());
  }
  log_act_ = tables_.act_trans.array().log().matrix();
  log_sub_prior_ = tables_.sub_prior.array().log().matrix();
}

Eigen::VectorXd HierarchicalInference::boundary_term(std::size_t z, const Eigen::VectorXd& log_prior_prev) const {
  if (log_prior_prev.size() == 0) return log_uniform_boundary_[z];
  if (log_prior_prev.size() != static_cast<Eigen::Index>(tables_.states()))
    throw Error(ErrorCode::DimensionMismatch, "boundary prior has wrong length");
  Eigen::VectorXd p = (log_prior_prev.array() - log_sum_exp(log_prior_prev)).exp().matrix();
  return (tables_.sub_trans[z].transpose() * p).array().log().matrix();
}

double HierarchicalInference::chain(std::size_t z, std::span<const Eigen::VectorXd> emissions,
                                    const Eigen::VectorXd& boundary, std::vector<std::size_t>* path) const {
  const Eigen::Index m = static_cast<Eigen::Index>(tables_.states());
  const Eigen::MatrixXd& lt = log_sub_[z];
  const std::size_t len = emissions.size();
  Eigen::VectorXd delta = boundary + emissions[0];
  Eigen::VectorXd next(m);
  std::vector<std::vector<Eigen::Index>> back;
  if (path) back.assign(len, std::vector<Eigen::Index>(static_cast<std::size_t>(m), 0));
  for (std::size_t t = 1; t < len; ++t) {
    for (Eigen::Index y = 0; y < m; ++y) {
      if (path) {
        Eigen::Index arg = 0;
        next(y) = (lt.col(y) + delta).maxCoeff(&arg);
        back[t][static_cast<std::size_t>(y)] = arg;
      } else {
        next(y) = (lt.col(y) + delta).maxCoeff();
      }
    }
    delta = next + emissions[t];
  }
  Eigen::Index arg = 0;
  const double best = delta.maxCoeff(&arg);
  if (path) {
    path->assign(len, 0);
    for (std::size_t t = len; t-- > 0;) {
      (*path)[t] = static_cast<std::size_t>(arg);
      if (t > 0) arg = back[t][static_cast<std::size_t>(arg)];
    }
  }
  return best;
}

SubstructureScore HierarchicalInference::substructure_score(std::size_t z, std::size_t z_prev,
                                                            std::span<const Eigen::VectorXd> window,
                                                            const Eigen::VectorXd& boundary_log_prior) const {
  if (window.empty()) throw Error(ErrorCode::InvalidModel, "empty substructure window");
  if (window.size() > options_.max_substructure)
    throw Error(ErrorCode::WindowTooLong, "window of " + std::to_string(window.size()) + " frames exceeds T = " +
                                              std::to_string(options_.max_substructure));
  if (z >= tables_.activity_count() || z_prev >= tables_.activity_count())
    throw Error(ErrorCode::DimensionMismatch, "activity index out of range");
  std::vector<Eigen::VectorXd> emissions;
  emissions.reserve(window.size());
  for (const auto& w : window) {
    if (w.size() != log_sub_prior_.size()) throw Error(ErrorCode::DimensionMismatch, "posterior has wrong length");
    emissions.push_back(w - log_sub_prior_);
  }
  SubstructureScore out;
  out.log_prob = log_act_(static_cast<Eigen::Index>(z_prev), static_cast<Eigen::Index>(z)) +
                 chain(z, emissions, boundary_term(z, boundary_log_prior), &out.path);
  return out;
}

DetectorState HierarchicalInference::initial_state() const {
  DetectorState s;
  s.initialized = true;
  s.scores.push_back(tables_.act_prior.array().log().matrix());
  return s;
}

Eigen::MatrixXd HierarchicalInference::candidates_for(const DetectorState& state,
                                                      const std::vector<Eigen::VectorXd>& emissions) const {
  const std::size_t n = tables_.activity_count();
  const std::size_t total = emissions.size();  // frames available, newest last
  const std::size_t lmax = std::min({total, options_.max_substructure, state.scores.size()});
  Eigen::MatrixXd cand(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(lmax));
  for (std::size_t len = 1; len <= lmax; ++len) {
    const Eigen::VectorXd& prev = state.scores[state.scores.size() - len];
    const std::span<const Eigen::VectorXd> window(emissions.data() + (total - len), len);
    Eigen::VectorXd boundary_prior;
    if (options_.boundary == BoundaryPrior::CarriedOver && total > len)
      boundary_prior = emissions[total - len - 1] + log_sub_prior_;
    for (std::size_t z = 0; z < n; ++z) {
      const Eigen::VectorXd entry = prev + log_act_.col(static_cast<Eigen::Index>(z));
      cand(static_cast<Eigen::Index>(z), static_cast<Eigen::Index>(len - 1)) =
          log_sum_exp(entry) + chain(z, window, boundary_term(z, boundary_prior), nullptr);
    }
  }
  return cand;
}

Eigen::MatrixXd HierarchicalInference::candidates(const DetectorState& state, const Eigen::VectorXd& log_posterior) const {
  if (!state.initialized) throw Error(ErrorCode::UninitializedState, "detector state was not initialized");
  if (log_posterior.size() != log_sub_prior_.size())
    throw Error(ErrorCode::DimensionMismatch, "posterior has wrong length");
  std::vector<Eigen::VectorXd> emissions = state.emissions;
  emissions.push_back(log_posterior - log_sub_prior_);
  return candidates_for(state, emissions);
}

StepResult HierarchicalInference::step(DetectorState& state, const Eigen::VectorXd& log_posterior) const {
  if (!state.initialized) throw Error(ErrorCode::UninitializedState, "detector state was not initialized");
  if (log_posterior.size() != log_sub_prior_.size())
    throw Error(ErrorCode::DimensionMismatch, "posterior has wrong length");
  for (Eigen::Index i = 0; i < log_posterior.size(); ++i)
    if (std::isnan(log_posterior(i))) throw Error(ErrorCode::InvalidModel, "posterior contains NaN");
  state.emissions.push_back(log_posterior - log_sub_prior_);
  const Eigen::MatrixXd cand = candidates_for(state, state.emissions);
  const CandidateReduction red = reduce_candidates(cand);
  state.time += 1;
  state.scores.push_back(red.log_posterior);
  const std::size_t keep_frames =
      options_.max_substructure + (options_.boundary == BoundaryPrior::CarriedOver ? 1 : 0);
  if (state.emissions.size() > keep_frames)
    state.emissions.erase(state.emissions.begin(), state.emissions.end() - static_cast<std::ptrdiff_t>(keep_frames));
  if (state.scores.size() > options_.max_substructure)
    state.scores.erase(state.scores.begin(),
                       state.scores.end() - static_cast<std::ptrdiff_t>(options_.max_substructure));
  StepResult out;
  out.activity = red.activity;
  out.posterior = red.log_posterior.array().exp().matrix();
  out.segment_start = state.time - 1 - red.best_split[red.activity];
  return out;
}

StepResult structure_step(DetectorState& state, const Eigen::VectorXd& log_posterior,
                          const HierarchicalInference& inference) {
  return inference.step(state, log_posterior);
}

std::vector<StepResult> detect_log_posteriors(const HierarchicalInference& inference,
                                              std::span<const Eigen::VectorXd> log_posteriors) {
  DetectorState state = inference.initial_state();
  std::vector<StepResult> out;
  out.reserve(log_posteriors.size());
  for (const auto& lp : log_posteriors) out.push_back(inference.step(state, lp));
  return out;
}

}  // namespace actrec
