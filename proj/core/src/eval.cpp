#include "actrec/eval.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

#include "actrec/error.hpp"

namespace actrec {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void finish(ActivityMetrics& m) {
  m.precision = ratio(m.true_positives, m.true_positives + m.false_positives);
  m.recall = ratio(m.true_positives, m.true_positives + m.false_negatives);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::vector<std::string> subjects_of(const Dataset& data) {
  std::set<std::string> s;
  for (const auto& seq : data) s.insert(seq.subject);
  return {s.begin(), s.end()};
}

LabeledSequence slice(const LabeledSequence& seq, std::size_t begin, std::size_t end) {
  end = std::min(end, seq.frames.size());
  begin = std::min(begin, end);
  LabeledSequence out;
  out.activity = seq.activity;
  out.location = seq.location;
  out.subject = seq.subject;
  out.frames.assign(seq.frames.begin() + static_cast<std::ptrdiff_t>(begin),
                    seq.frames.begin() + static_cast<std::ptrdiff_t>(end));
  if (seq.has_images())
    out.images.assign(seq.images.begin() + static_cast<std::ptrdiff_t>(begin),
                      seq.images.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

Split split_new_person(const Dataset& data, const std::string& held_out) {
  Split s;
  for (const auto& seq : data) {
    if (seq.subject == held_out) {
      s.test.push_back(seq);
    } else if (!seq.is_random()) {
      s.train.push_back(seq);
      s.train.push_back(mirror_sequence(seq));
    }
  }
  if (s.test.empty()) throw Error(ErrorCode::MalformedInput, "subject '" + held_out + "' has no sequences");
  return s;
}

Split split_have_seen(const Dataset& data, const std::string& subject) {
  Split s;
  for (const auto& seq : data) {
    if (seq.subject != subject) {
      if (!seq.is_random()) {
        s.train.push_back(seq);
        s.train.push_back(mirror_sequence(seq));
      }
    } else if (seq.is_random()) {
      s.test.push_back(seq);
    } else {
      const std::size_t mid = seq.frames.size() / 2;
      LabeledSequence first = slice(seq, 0, mid);
      s.test.push_back(slice(seq, mid, seq.frames.size()));
      if (!first.frames.empty()) {
        s.train.push_back(mirror_sequence(first));
        s.train.push_back(std::move(first));
      }
    }
  }
  if (s.test.empty()) throw Error(ErrorCode::MalformedInput, "subject '" + subject + "' has no sequences");
  return s;
}

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> activities) : activities_(std::move(activities)) {
  counts_.assign(activities_.size() + 1, std::vector<std::size_t>(activities_.size() + 1, 0));
}

std::vector<std::string> ConfusionMatrix::row_labels() const {
  auto r = activities_;
  r.emplace_back(kRandomActivity);
  return r;
}

std::vector<std::string> ConfusionMatrix::column_labels() const {
  auto c = activities_;
  c.emplace_back(kNeutralActivity);
  return c;
}

void ConfusionMatrix::add(const std::string& truth, const std::string& predicted, std::size_t count) {
  const std::size_t n = activities_.size();
  auto find = [&](const std::string& label, std::string_view extra) -> std::size_t {
    if (label == extra) return n;
    const auto it = std::find(activities_.begin(), activities_.end(), label);
    if (it == activities_.end()) throw Error(ErrorCode::MalformedInput, "unknown activity label '" + label + "'");
    return static_cast<std::size_t>(it - activities_.begin());
  };
  counts_[find(truth, kRandomActivity)][find(predicted, kNeutralActivity)] += count;
}

std::size_t ConfusionMatrix::row_sum(std::size_t row) const {
  std::size_t s = 0;
  for (auto v : counts_[row]) s += v;
  return s;
}

std::size_t ConfusionMatrix::total() const {
  std::size_t s = 0;
  for (std::size_t r = 0; r < counts_.size(); ++r) s += row_sum(r);
  return s;
}

std::string ConfusionMatrix::to_csv() const {
  std::ostringstream out;
  out << "truth";
  for (const auto& c : column_labels()) out << ',' << csv_field(c);
  out << '\n';
  const auto rows = row_labels();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out << csv_field(rows[r]);
    for (auto v : counts_[r]) out << ',' << v;
    out << '\n';
  }
  return out.str();
}

std::vector<ActivityMetrics> metrics_from_confusion(const ConfusionMatrix& cm) {
  const std::size_t n = cm.activities().size();
  std::vector<ActivityMetrics> out(n);
  for (std::size_t a = 0; a < n; ++a) {
    auto& m = out[a];
    m.activity = cm.activities()[a];
    m.true_positives = cm.at(a, a);
    for (std::size_t r = 0; r <= n; ++r)
      if (r != a) m.false_positives += cm.at(r, a);
    m.false_negatives = cm.row_sum(a) - m.true_positives;
    finish(m);
  }
  return out;
}

std::vector<ActivityMetrics> metrics_from_labels(const std::vector<std::string>& activities,
                                                 const std::vector<std::string>& truth,
                                                 const std::vector<std::string>& predicted) {
  if (truth.size() != predicted.size())
    throw Error(ErrorCode::MalformedInput, "truth and prediction lengths differ");
  std::vector<ActivityMetrics> out(activities.size());
  for (std::size_t a = 0; a < activities.size(); ++a) {
    auto& m = out[a];
    m.activity = activities[a];
    for (std::size_t i = 0; i < truth.size(); ++i) {
      const bool is_truth = truth[i] == m.activity;
      const bool is_pred = predicted[i] == m.activity;
      if (is_truth && is_pred) ++m.true_positives;
      else if (is_pred) ++m.false_positives;
      else if (is_truth) ++m.false_negatives;
    }
    finish(m);
  }
  return out;
}

ScoreResult score(const std::vector<std::string>& activities, const std::vector<std::string>& truth,
                  const std::vector<std::string>& predicted) {
  if (truth.size() != predicted.size())
    throw Error(ErrorCode::MalformedInput, "truth and prediction lengths differ");
  ConfusionMatrix cm(activities);
  for (std::size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], predicted[i]);
  auto metrics = metrics_from_confusion(cm);
  return {std::move(cm), std::move(metrics)};
}

LocationReport location_report(Location location, const ConfusionMatrix& cm) {
  LocationReport r;
  r.location = location;
  r.activities = metrics_from_confusion(cm);
  for (const auto& m : r.activities) {
    r.precision += m.precision;
    r.recall += m.recall;
  }
  if (!r.activities.empty()) {
    r.precision /= static_cast<double>(r.activities.size());
    r.recall /= static_cast<double>(r.activities.size());
  }
  return r;
}

MetricsReport aggregate_report(std::string setting, std::vector<LocationReport> locations) {
  MetricsReport r;
  r.setting = std::move(setting);
  r.locations = std::move(locations);
  for (const auto& l : r.locations) {
    r.precision += l.precision;
    r.recall += l.recall;
  }
  if (!r.locations.empty()) {
    r.precision /= static_cast<double>(r.locations.size());
    r.recall /= static_cast<double>(r.locations.size());
  }
  return r;
}

double frame_accuracy(const std::vector<std::string>& truth, const std::vector<std::string>& predicted) {
  if (truth.size() != predicted.size())
    throw Error(ErrorCode::MalformedInput, "truth and prediction lengths differ");
  if (truth.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == predicted[i] || (truth[i] == kRandomActivity && predicted[i] == kNeutralActivity)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(truth.size());
}

std::string report_to_json(const MetricsReport& report) {
  nlohmann::ordered_json j;
  j["setting"] = report.setting;
  j["locations"] = nlohmann::ordered_json::array();
  for (const auto& l : report.locations) {
    nlohmann::ordered_json lj;
    lj["location"] = std::string(to_string(l.location));
    lj["activities"] = nlohmann::ordered_json::array();
    for (const auto& m : l.activities) {
      lj["activities"].push_back({{"activity", m.activity},
                                  {"precision", m.precision},
                                  {"recall", m.recall},
                                  {"true_positives", m.true_positives},
                                  {"false_positives", m.false_positives},
                                  {"false_negatives", m.false_negatives}});
    }
    lj["average"] = {{"precision", l.precision}, {"recall", l.recall}};
    j["locations"].push_back(std::move(lj));
  }
  j["overall_average"] = {{"precision", report.precision}, {"recall", report.recall}};
  return j.dump(2) + "\n";
}

std::string report_to_csv(const MetricsReport& report) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "setting,location,activity,precision,recall\n";
  for (const auto& l : report.locations) {
    const std::string loc(to_string(l.location));
    for (const auto& m : l.activities)
      out << report.setting << ',' << loc << ',' << csv_field(m.activity) << ',' << m.precision << ','
          << m.recall << '\n';
    out << report.setting << ',' << loc << ",Average," << l.precision << ',' << l.recall << '\n';
  }
  out << report.setting << ",Overall,Average," << report.precision << ',' << report.recall << '\n';
  return out.str();
}

}  // namespace actrec
