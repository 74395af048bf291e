#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "actrec/baselines.hpp"
#include "actrec/eval.hpp"
#include "actrec/features.hpp"
#include "actrec/gmm.hpp"
#include "actrec/hog.hpp"
#include "actrec/memm.hpp"
#include "actrec/skeleton.hpp"

namespace actrec {

inline constexpr int kModelFormatVersion = 1;

/// Everything that controls training and detection.
struct RunConfig {
  std::optional<Location> location;  // unset: the only location in the data
  FeatureBlocks blocks;
  InferenceOptions inference;
  ManualTransitions manual;
  std::size_t clusters_per_activity = 5;
  double min_scale = 1e-2;
  std::uint64_t seed = 1;
  std::size_t train_stride = 1;  // use every k-th training frame
  SvmOptions svm;
  CameraIntrinsics intrinsics;
};

/// Applies one key=value setting. Throws MalformedInput on an unknown key or bad value.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);
/// Reads `key = value` lines; `#` starts a comment.
RunConfig parse_run_config(std::istream& in, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});
/// Throws MalformedInput when an invariant (T >= 2, stride >= 1, ...) fails.
void validate(const RunConfig& config);

struct ActivityModel {
  int format_version = kModelFormatVersion;
  RunConfig config;
  Location location = Location::Office;
  std::vector<std::string> activities;  // non-neutral, NEUTRAL is implied last
  SubActivityBank bank;
  TransitionTables tables;
  LinearActivityClassifier naive;
  Eigen::MatrixXd one_level_transitions;

  /// Activity labels including NEUTRAL.
  std::vector<std::string> labels() const;
};

struct TrainingSummary {
  std::map<std::string, std::size_t> frames_per_activity;
  std::vector<BankSourceSummary> bank;
};

/// Featurizes every sequence, builds the sub-activity bank, transition tables
/// and both baselines for `config.location`.
ActivityModel train_model(const Dataset& train, const RunConfig& config, TrainingSummary* summary = nullptr);

std::string model_to_json(const ActivityModel& model);
/// Throws InvalidModel on schema or version mismatch.
ActivityModel model_from_json(const std::string& text);
void save_model(const std::filesystem::path& path, const ActivityModel& model);
ActivityModel load_model(const std::filesystem::path& path);

enum class ModelKind { Hierarchical, Naive, OneLevel };
std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);

struct FramePrediction {
  int frame_index = 0;
  std::string activity;
  Eigen::VectorXd posterior;  // over Detector::labels()
  std::size_t segment_start = 0;  // hierarchical only
};

/// Online per-stream detector.
class Detector {
 public:
  Detector(const ActivityModel& model, ModelKind kind);

  const std::vector<std::string>& labels() const { return labels_; }
  FramePrediction push(const SkeletonFrame& frame, const ImageFrame* image = nullptr);
  /// Sub-activity log posteriors for a feature vector under the model bank.
  static Eigen::VectorXd bank_log_posterior(const ActivityModel& model, const Eigen::VectorXd& features);

 private:
  const ActivityModel& model_;
  ModelKind kind_;
  std::vector<std::string> labels_;
  Featurizer featurizer_;
  HierarchicalInference inference_;
  DetectorState state_;
  Eigen::VectorXd alpha_;
};

std::vector<FramePrediction> detect_stream(const LabeledSequence& seq, const ActivityModel& model, ModelKind kind);

enum class Setting { NewPerson, HaveSeen };
std::string_view to_string(Setting setting);
Setting parse_setting(std::string_view text);

struct KindResult {
  ModelKind kind = ModelKind::Hierarchical;
  std::map<Location, ConfusionMatrix> confusion;
  MetricsReport report;
  std::vector<std::string> truth;      // every test frame in fold order
  std::vector<std::string> predicted;
  double frame_accuracy = 0.0;
};

struct EvaluationResult {
  Setting setting = Setting::NewPerson;
  std::vector<std::string> folds;  // held-out subject per fold
  std::vector<KindResult> kinds;
};

/// Runs every fold and location, training once per (fold, location) and
/// detecting with each requested model kind.
EvaluationResult run_evaluation(const Dataset& data, Setting setting, const RunConfig& config,
                                const std::vector<ModelKind>& kinds);

}  // namespace actrec
