#include <doctest.h>

#include <algorithm>
#include <json.hpp>
#include <numeric>
#include <set>

#include "actrec/error.hpp"
#include "actrec/eval.hpp"
#include "test_util.hpp"

using namespace actrec;

namespace {

LabeledSequence make_seq(const std::string& subject, const std::string& activity, int frames) {
  LabeledSequence s;
  s.subject = subject;
  s.activity = activity;
  s.location = Location::Kitchen;
  std::mt19937_64 rng(std::hash<std::string>{}(subject + activity));
  s.frames = testutil::random_sequence(rng, static_cast<std::size_t>(frames)).frames;
  return s;
}

Dataset four_subjects() {
  Dataset d;
  for (int s = 1; s <= 4; ++s) {
    const std::string id = "s" + std::to_string(s);
    d.push_back(make_seq(id, "cook", 10 + s));
    d.push_back(make_seq(id, "wash", 7));
    d.push_back(make_seq(id, std::string(kRandomActivity), 6));
  }
  return d;
}

}  // namespace

TEST_CASE("new-person splits") {
  const Dataset d = four_subjects();
  CHECK(subjects_of(d) == std::vector<std::string>{"s1", "s2", "s3", "s4"});
  std::size_t covered = 0;
  std::set<std::string> tested;
  for (const auto& subject : subjects_of(d)) {
    const Split s = split_new_person(d, subject);
    for (const auto& seq : s.train) {
      CHECK(seq.subject != subject);
      CHECK_FALSE(seq.is_random());
    }
    CHECK(s.train.size() == 2 * 6);
    for (const auto& seq : s.test) {
      CHECK(seq.subject == subject);
      covered += seq.frames.size();
    }
    tested.insert(subject);
  }
  std::size_t all = 0;
  for (const auto& seq : d) all += seq.frames.size();
  CHECK(covered == all);
  CHECK(tested.size() == 4);
}

TEST_CASE("have-seen splits") {
  const Dataset d = four_subjects();
  const Split s = split_have_seen(d, "s3");
  std::size_t from_others = 0;
  for (const auto& seq : s.train)
    if (seq.subject != "s3") ++from_others;
  CHECK(from_others == 2 * 6);
  for (const auto& seq : s.test) CHECK(seq.subject == "s3");
  const auto& cook = d[6];
  REQUIRE(cook.activity == "cook");
  // 13 frames -> 6 / 7
  const auto first = std::find_if(s.train.begin(), s.train.end(),
                                  [](const LabeledSequence& q) { return q.subject == "s3" && q.activity == "cook"; });
  const auto second = std::find_if(s.test.begin(), s.test.end(),
                                   [](const LabeledSequence& q) { return q.activity == "cook"; });
  REQUIRE(first != s.train.end());
  REQUIRE(second != s.test.end());
  CHECK(first->frames.size() + second->frames.size() == cook.frames.size());
  CHECK(std::abs(static_cast<int>(first->frames.size()) - static_cast<int>(second->frames.size())) <= 1);
  CHECK(first->frames.back().frame_index < second->frames.front().frame_index);
  CHECK(std::count_if(s.test.begin(), s.test.end(), [](const LabeledSequence& q) { return q.is_random(); }) == 1);
}

TEST_CASE("slice keeps images aligned") {
  LabeledSequence s = make_seq("x", "a", 5);
  s.images.resize(5);
  const LabeledSequence t = slice(s, 1, 3);
  CHECK(t.frames.size() == 2);
  CHECK(t.images.size() == 2);
  CHECK(t.frames[0].frame_index == s.frames[1].frame_index);
}

TEST_CASE("hand-counted metrics") {
  const std::string n(kNeutralActivity);
  const ScoreResult r = score({"A", "B"}, {"A", "A", "B", "B"}, {"A", n, "B", "A"});
  CHECK(r.metrics[0].precision == doctest::Approx(0.5));
  CHECK(r.metrics[0].recall == doctest::Approx(0.5));
  CHECK(r.metrics[1].precision == doctest::Approx(1.0));
  CHECK(r.metrics[1].recall == doctest::Approx(0.5));
  CHECK(r.confusion.at(0, 2) == 1);
  CHECK(r.confusion.row_sum(0) == 2);
}

TEST_CASE("perfect predictions") {
  const std::vector<std::string> truth{"A", "B", "C", "A"};
  const ScoreResult r = score({"A", "B", "C"}, truth, truth);
  for (const auto& m : r.metrics) {
    CHECK(m.precision == 1.0);
    CHECK(m.recall == 1.0);
  }
  CHECK(frame_accuracy(truth, truth) == 1.0);
}

TEST_CASE("random frames predicted neutral touch one cell") {
  const std::string n(kNeutralActivity);
  const std::string rnd(kRandomActivity);
  const ScoreResult a = score({"A", "B"}, {"A", "B"}, {"A", "B"});
  const ScoreResult b = score({"A", "B"}, {"A", "B", rnd, rnd}, {"A", "B", n, n});
  CHECK(b.confusion.at(2, 2) == 2);
  CHECK(b.confusion.total() == 4);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(a.metrics[i].precision == b.metrics[i].precision);
    CHECK(a.metrics[i].recall == b.metrics[i].recall);
  }
  CHECK(frame_accuracy({"A", rnd, rnd}, {"A", n, "A"}) == doctest::Approx(2.0 / 3));
  const ScoreResult c = score({"A"}, {rnd}, {"A"});
  CHECK(c.metrics[0].false_positives == 1);
  CHECK(c.metrics[0].precision == 0.0);
}

TEST_CASE("confusion and label metrics agree") {
  std::mt19937_64 rng(157);
  const std::vector<std::string> acts{"A", "B", "C"};
  const std::vector<std::string> rows{"A", "B", "C", std::string(kRandomActivity)};
  const std::vector<std::string> cols{"A", "B", "C", std::string(kNeutralActivity)};
  std::vector<std::string> truth, pred;
  for (int i = 0; i < 300; ++i) {
    truth.push_back(rows[rng() % 4]);
    pred.push_back(cols[rng() % 4]);
  }
  const ScoreResult r = score(acts, truth, pred);
  const auto direct = metrics_from_labels(acts, truth, pred);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(r.metrics[i].true_positives == direct[i].true_positives);
    CHECK(r.metrics[i].false_positives == direct[i].false_positives);
    CHECK(r.metrics[i].precision == direct[i].precision);
    CHECK(r.metrics[i].recall == direct[i].recall);
  }
  for (std::size_t row = 0; row < 4; ++row)
    CHECK(r.confusion.row_sum(row) ==
          static_cast<std::size_t>(std::count(truth.begin(), truth.end(), rows[row])));
}

TEST_CASE("unknown labels are rejected") {
  ConfusionMatrix cm({"A"});
  CHECK_THROWS_AS(cm.add("Z", "A"), Error);
  CHECK_THROWS_AS(cm.add("A", std::string(kRandomActivity)), Error);
}

TEST_CASE("overall average is the mean of location averages") {
  const double p[] = {0.727, 0.761, 0.644, 0.526, 0.738};
  std::vector<LocationReport> locs;
  for (int i = 0; i < 5; ++i) {
    LocationReport l;
    l.location = static_cast<Location>(i);
    l.precision = p[i];
    l.recall = p[i];
    locs.push_back(l);
  }
  const MetricsReport r = aggregate_report("new_person", locs);
  CHECK(std::round(r.precision * 1000) / 10 == doctest::Approx(67.9));
}

TEST_CASE("report serialization") {
  ConfusionMatrix cm({"A", "B"});
  cm.add("A", "A", 3);
  cm.add("B", "A");
  cm.add(std::string(kRandomActivity), std::string(kNeutralActivity), 2);
  const LocationReport loc = location_report(Location::Kitchen, cm);
  CHECK(loc.precision == doctest::Approx((0.75 + 0.0) / 2));
  CHECK(loc.recall == doctest::Approx(0.5));
  const MetricsReport r = aggregate_report("have_seen", {loc});
  const auto j = nlohmann::json::parse(report_to_json(r));
  CHECK(j["setting"] == "have_seen");
  CHECK(j.dump().find("kitchen") != std::string::npos);
  CHECK(report_to_csv(r).find("setting,location,activity,precision,recall") == 0);
  const std::string csv = cm.to_csv();
  CHECK(csv.find("NEUTRAL") != std::string::npos);
  CHECK(csv.find("RANDOM") != std::string::npos);
}
