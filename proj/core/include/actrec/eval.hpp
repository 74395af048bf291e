#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "actrec/skeleton.hpp"

namespace actrec {

struct Split {
  Dataset train;
  Dataset test;
};

/// Sorted distinct subject ids.
std::vector<std::string> subjects_of(const Dataset& data);

/// Frames [begin, end) of a sequence, images included.
LabeledSequence slice(const LabeledSequence& seq, std::size_t begin, std::size_t end);

/// Train on every other subject's labeled sequences plus their mirror images;
/// test on all of the held-out subject's sequences, RANDOM included.
Split split_new_person(const Dataset& data, const std::string& held_out);

/// Every other subject goes to train. Each labeled sequence of `subject` is cut
/// at its midpoint: the first half and its mirror train, the second half tests.
/// The subject's RANDOM sequences are test only.
Split split_have_seen(const Dataset& data, const std::string& subject);

class ConfusionMatrix {
 public:
  /// Rows: activities then RANDOM. Columns: activities then NEUTRAL.
  explicit ConfusionMatrix(std::vector<std::string> activities);

  /// Throws MalformedInput on a label outside the row/column sets.
  void add(const std::string& truth, const std::string& predicted, std::size_t count = 1);

  const std::vector<std::string>& activities() const { return activities_; }
  std::vector<std::string> row_labels() const;
  std::vector<std::string> column_labels() const;
  std::size_t at(std::size_t row, std::size_t column) const { return counts_[row][column]; }
  std::size_t row_sum(std::size_t row) const;
  std::size_t total() const;

  std::string to_csv() const;

 private:
  std::vector<std::string> activities_;
  std::vector<std::vector<std::size_t>> counts_;
};

struct ActivityMetrics {
  std::string activity;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  double precision = 0.0;  // 0 when nothing was predicted as the activity
  double recall = 0.0;
};

/// Metrics for every activity of the matrix. NEUTRAL predictions are never
/// false positives; RANDOM truth frames are only ever false positives.
std::vector<ActivityMetrics> metrics_from_confusion(const ConfusionMatrix& cm);

/// The same counts taken directly from aligned label vectors.
std::vector<ActivityMetrics> metrics_from_labels(const std::vector<std::string>& activities,
                                                 const std::vector<std::string>& truth,
                                                 const std::vector<std::string>& predicted);

struct LocationReport {
  Location location = Location::Office;
  std::vector<ActivityMetrics> activities;
  double precision = 0.0;  // unweighted mean over activities
  double recall = 0.0;
};

struct MetricsReport {
  std::string setting;
  std::vector<LocationReport> locations;
  double precision = 0.0;  // unweighted mean over locations
  double recall = 0.0;
};

struct ScoreResult {
  ConfusionMatrix confusion;
  std::vector<ActivityMetrics> metrics;
};

ScoreResult score(const std::vector<std::string>& activities, const std::vector<std::string>& truth,
                  const std::vector<std::string>& predicted);

LocationReport location_report(Location location, const ConfusionMatrix& cm);
MetricsReport aggregate_report(std::string setting, std::vector<LocationReport> locations);

/// Fraction of frames whose prediction equals the truth; a RANDOM frame is
/// correct when NEUTRAL is predicted.
double frame_accuracy(const std::vector<std::string>& truth, const std::vector<std::string>& predicted);

std::string report_to_json(const MetricsReport& report);
/// Flat CSV: setting,location,activity,precision,recall plus per-location and overall rows.
std::string report_to_csv(const MetricsReport& report);

}  // namespace actrec
