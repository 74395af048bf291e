#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace actrec {

/// Smoothing floor applied to every transition probability.
inline constexpr double kTransitionFloor = 1e-6;

/// Hand-set activity transitions P(z | z').
struct ManualTransitions {
  double self = 0.6;
  double to_neutral = 0.3;
  double to_others = 0.1;               // split evenly over the other activities
  double neutral_stay = 0.4;
  double neutral_to_activities = 0.6;   // split evenly over all activities
};

/// Model tables over n activities plus NEUTRAL (always the last index) and m
/// sub-activities. Every matrix is row-stochastic with rows indexed by the
/// previous state.
struct TransitionTables {
  std::vector<Eigen::MatrixXd> sub_trans;  // P(y' | y, z), one m x m table per activity incl. NEUTRAL
  Eigen::MatrixXd act_trans;               // P(z | z'), (n+1) x (n+1)
  Eigen::VectorXd sub_prior;               // P(y)
  Eigen::VectorXd act_prior;               // P(z_0), uniform

  std::size_t activity_count() const { return sub_trans.size(); }  // includes NEUTRAL
  std::size_t neutral() const { return sub_trans.size() - 1; }
  std::size_t states() const { return static_cast<std::size_t>(sub_prior.size()); }
};

/// p = (w + eps) / (row sum + m eps), then p' = (1 - m eps) p + eps so every
/// entry is >= eps and rows still sum to 1. Rows with no mass become uniform.
Eigen::MatrixXd floor_rows(const Eigen::MatrixXd& weights, double eps = kTransitionFloor);

/// P(y' | y, N) from the non-neutral tables: entrywise 1 - sum_z P(y' | y, z),
/// clamped below at eps, then passed through floor_rows.
Eigen::MatrixXd neutral_transition(const std::vector<Eigen::MatrixXd>& activity_tables, double eps = kTransitionFloor);

/// (n+1) x (n+1) P(z | z') with NEUTRAL last.
Eigen::MatrixXd manual_activity_transitions(std::size_t activities, const ManualTransitions& manual = {});

/// Per-frame sub-activity posteriors of one training sequence.
struct SoftLabeledSequence {
  std::size_t activity = 0;
  Eigen::MatrixXd posteriors;  // frames x m
};

/// Builds P(y' | y, z) from soft-label co-occurrences of consecutive frames,
/// derives the NEUTRAL table and sets P(z | z') from `manual`.
/// Throws MissingActivityData when an activity has no sequence.
TransitionTables estimate_transitions(const std::vector<SoftLabeledSequence>& sequences, std::size_t activities,
                                      const Eigen::VectorXd& sub_prior, const ManualTransitions& manual = {},
                                      double eps = kTransitionFloor);

/// How P(y^{t'}) is chosen for the frame just before a substructure.
enum class BoundaryPrior { Uniform, CarriedOver };

struct InferenceOptions {
  std::size_t max_substructure = 90;  // T
  BoundaryPrior boundary = BoundaryPrior::Uniform;
};

struct SubstructureScore {
  double log_prob = 0.0;
  std::vector<std::size_t> path;  // best sub-activity per frame
};

/// Online DP memory for one stream.
struct DetectorState {
  bool initialized = false;
  std::size_t time = 0;
  /// log P(y|x) - log P(y) for the most recent frames, oldest first.
  std::vector<Eigen::VectorXd> emissions;
  /// log P(z | O; G_s) for s = time - scores.size() + 1 .. time, oldest first.
  std::vector<Eigen::VectorXd> scores;
};

struct StepResult {
  std::size_t activity = 0;
  Eigen::VectorXd posterior;          // P(z | O; G_t), sums to 1
  std::size_t segment_start = 0;      // t' chosen for the predicted activity
};

/// Result of maximising candidates over split points.
struct CandidateReduction {
  Eigen::VectorXd log_posterior;      // normalised
  std::vector<std::size_t> best_split;  // column index per activity
  std::size_t activity = 0;
};

/// `log_candidates(z, c)`: log P(z | O; G~_t^{t'_c}) with columns ordered by
/// decreasing t' (shortest substructure first). Ties between columns go to the
/// lower column, ties between activities to the lower index.
CandidateReduction reduce_candidates(const Eigen::MatrixXd& log_candidates);

/// Two-layer MEMM inference over precomputed sub-activity posteriors.
class HierarchicalInference {
 public:
  HierarchicalInference(TransitionTables tables, InferenceOptions options = {});

  const TransitionTables& tables() const { return tables_; }
  const InferenceOptions& options() const { return options_; }

  /// log of max over sub-activity paths of P(z, y.. | O_i, z_prev) for a
  /// window of per-frame log P(y|x). `boundary_log_prior` is log P(y^{t'})
  /// (empty = uniform). Throws WindowTooLong beyond T.
  SubstructureScore substructure_score(std::size_t z, std::size_t z_prev, std::span<const Eigen::VectorXd> window,
                                       const Eigen::VectorXd& boundary_log_prior = {}) const;

  DetectorState initial_state() const;

  /// Consumes one frame's log P(y|x). Throws UninitializedState.
  StepResult step(DetectorState& state, const Eigen::VectorXd& log_posterior) const;

  /// Candidate matrix for the next frame (as in `step`) without committing it.
  Eigen::MatrixXd candidates(const DetectorState& state, const Eigen::VectorXd& log_posterior) const;

 private:
  // Max over paths of the z-dependent chain; emissions are log P(y|x) - log P(y).
  double chain(std::size_t z, std::span<const Eigen::VectorXd> emissions, const Eigen::VectorXd& boundary,
               std::vector<std::size_t>* path) const;
  Eigen::VectorXd boundary_term(std::size_t z, const Eigen::VectorXd& log_prior_prev) const;
  Eigen::MatrixXd candidates_for(const DetectorState& state, const std::vector<Eigen::VectorXd>& emissions) const;

  TransitionTables tables_;
  InferenceOptions options_;
  std::vector<Eigen::MatrixXd> log_sub_;
  std::vector<Eigen::VectorXd> log_uniform_boundary_;
  Eigen::MatrixXd log_act_;
  Eigen::VectorXd log_sub_prior_;
};

/// Free-function form of HierarchicalInference::step.
StepResult structure_step(DetectorState& state, const Eigen::VectorXd& log_posterior,
                          const HierarchicalInference& inference);

/// Folds `step` over every frame.
std::vector<StepResult> detect_log_posteriors(const HierarchicalInference& inference,
                                              std::span<const Eigen::VectorXd> log_posteriors);

}  // namespace actrec
