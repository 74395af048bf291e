#include <doctest.h>

#include <algorithm>

#include "actrec/error.hpp"
#include "actrec/hog.hpp"
#include "actrec/rotation.hpp"
#include "actrec/synth.hpp"

using namespace actrec;

namespace {

double mean_joint_distance(const LabeledSequence& a, const LabeledSequence& b) {
  const std::size_t n = std::min(a.frames.size(), b.frames.size());
  double sum = 0.0;
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t j = 0; j < kJointCount; ++j)
      sum += (a.frames[t].joints[j].position - b.frames[t].joints[j].position).norm();
  return sum / static_cast<double>(n * kJointCount);
}

}  // namespace

TEST_CASE("deterministic in script and seed") {
  const auto s = raise_cup_script();
  const LabeledSequence a = generate_synthetic(s, 5);
  const LabeledSequence b = generate_synthetic(s, 5);
  REQUIRE(a.frames.size() == b.frames.size());
  CHECK(a.frames.size() >= 90);
  for (std::size_t t = 0; t < a.frames.size(); ++t)
    for (std::size_t j = 0; j < kJointCount; ++j) {
      CHECK(a.frames[t].joints[j].position == b.frames[t].joints[j].position);
      if (a.frames[t].joints[j].orientation)
        CHECK(*a.frames[t].joints[j].orientation == *b.frames[t].joints[j].orientation);
    }
}

TEST_CASE("noise-free constant pose gives identical frames") {
  MotionScript s = still_script();
  s.jitter_mm = 0.0;
  s.drift_mm = 0.0;
  s.keyframes.resize(1);
  const LabeledSequence seq = generate_synthetic(s, 3);
  for (const auto& f : seq.frames)
    for (std::size_t j = 0; j < kJointCount; ++j) {
      CHECK(f.joints[j].position == seq.frames[0].joints[j].position);
      if (f.joints[j].orientation) CHECK(*f.joints[j].orientation == *seq.frames[0].joints[j].orientation);
    }
}

TEST_CASE("rotations are valid") {
  const LabeledSequence seq = generate_synthetic(chop_script(), 11);
  for (const auto& f : seq.frames)
    for (std::size_t j = 0; j < kOrientedJointCount; ++j) {
      const Mat3& r = *f.joints[j].orientation;
      CHECK((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-9);
      CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("empty script") {
  MotionScript s = still_script();
  s.keyframes.clear();
  try {
    generate_synthetic(s, 1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyScript);
  }
}

TEST_CASE("scripts are far apart compared to seed noise") {
  const std::vector<MotionScript> scripts{raise_cup_script(), phone_to_ear_script(), chop_script(), still_script()};
  std::vector<std::vector<LabeledSequence>> runs;
  for (const auto& s : scripts) {
    runs.emplace_back();
    for (std::uint64_t seed : {1, 2, 3}) runs.back().push_back(generate_synthetic(s, seed));
  }
  double within = 0.0;
  int nw = 0;
  for (const auto& r : runs)
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t k = i + 1; k < 3; ++k) {
        within = std::max(within, mean_joint_distance(r[i], r[k]));
        ++nw;
      }
  double between = 1e300;
  for (std::size_t a = 0; a < runs.size(); ++a)
    for (std::size_t b = a + 1; b < runs.size(); ++b)
      for (const auto& x : runs[a])
        for (const auto& y : runs[b]) between = std::min(between, mean_joint_distance(x, y));
  CHECK(nw == 12);
  CHECK(between > 5.0 * within);
}

TEST_CASE("benchmark dataset layout") {
  SyntheticDatasetOptions opt;
  opt.subjects = 2;
  opt.seconds_per_sequence = 3.0;
  const Dataset d = generate_benchmark_dataset(opt);
  CHECK(d.size() == 2 * benchmark_scripts().size());
  CHECK(d.front().subject == "subject1");
  CHECK(std::count_if(d.begin(), d.end(), [](const LabeledSequence& s) { return s.is_random(); }) == 2);
}

TEST_CASE("rendered frame has the person in it") {
  const LabeledSequence seq = generate_synthetic(raise_cup_script(), 1);
  const ImageFrame img = render_frame(seq.frames[0], CameraIntrinsics{});
  CHECK(img.depth.width == 640);
  CHECK(img.depth.height == 480);
  CHECK(std::any_of(img.depth.values.begin(), img.depth.values.end(), [](double v) { return v > 0; }));
}
