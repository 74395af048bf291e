#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "actrec/error.hpp"
#include "actrec/features.hpp"
#include "actrec/skeleton.hpp"
#include "test_util.hpp"

using namespace actrec;

namespace {

bool frames_close(const SkeletonFrame& a, const SkeletonFrame& b, double tol) {
  if (a.frame_index != b.frame_index) return false;
  for (std::size_t j = 0; j < kJointCount; ++j) {
    const auto& ra = a.joints[j];
    const auto& rb = b.joints[j];
    if ((ra.position - rb.position).cwiseAbs().maxCoeff() > tol) return false;
    if (ra.orientation.has_value() != rb.orientation.has_value()) return false;
    if (ra.orientation && (*ra.orientation - *rb.orientation).cwiseAbs().maxCoeff() > tol) return false;
    if (std::abs(ra.position_confidence - rb.position_confidence) > tol) return false;
    if (std::abs(ra.orientation_confidence - rb.orientation_confidence) > tol) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("identity rotations parse to unit quaternions") {
  const SkeletonFrame f = parse_frame(testutil::identity_line(7));
  CHECK(f.frame_index == 7);
  CHECK(f.timestamp() == doctest::Approx(7.0 / 30.0));
  for (Joint j : kOrientedJoints) {
    const Quaternion q = to_halfspace_quaternion(f.rotation(j));
    CHECK(q.w == doctest::Approx(1.0));
  }
  CHECK(f.position(Joint::LeftHand).x() == doctest::Approx(100.0));
  CHECK(f.position(Joint::Neck).x() == doctest::Approx(10.0));
  CHECK_FALSE(f[Joint::LeftHand].orientation.has_value());
}

TEST_CASE("field count is enforced") {
  try {
    parse_frame(testutil::identity_line(1, 1));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FieldCountMismatch);
  }
}

TEST_CASE("non-finite and non-numeric values are rejected") {
  std::string line = testutil::identity_line(1);
  std::string bad = line;
  bad.replace(bad.find(",20,"), 4, ",nan,");
  try {
    parse_frame(bad);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFiniteValue);
  }
  std::string junk = line;
  junk.replace(junk.find(",20,"), 4, ",abc,");
  CHECK_THROWS_AS(parse_frame(junk), Error);
}

TEST_CASE("a quarter turn about z survives parsing") {
  std::string line = testutil::identity_line(1);
  const auto first = line.find(testutil::identity_block());
  line.replace(first, testutil::identity_block().size(), "0,-1,0,1,0,0,0,0,1");
  const SkeletonFrame f = parse_frame(line);
  Mat3 expected;
  expected << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  CHECK((f.rotation(Joint::Head) - expected).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("badly non-orthonormal blocks are rejected, mild ones repaired") {
  std::string line = testutil::identity_line(1);
  const auto first = line.find(testutil::identity_block());
  std::string bad = line;
  bad.replace(first, testutil::identity_block().size(), "1.5,0,0,0,1,0,0,0,1");
  try {
    parse_frame(bad);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonOrthonormalBeyondTolerance);
  }
  std::string mild = line;
  mild.replace(first, testutil::identity_block().size(), "1.01,0,0,0,0.99,0.005,0,0,1");
  const SkeletonFrame f = parse_frame(mild);
  const Mat3 r = f.rotation(Joint::Head);
  CHECK(orthonormality_error(r) <= 1e-6);
  CHECK(std::abs(r.determinant() - 1.0) <= 1e-6);
}

TEST_CASE("parse, serialize, parse is the identity") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20; ++i) {
    const SkeletonFrame f = testutil::random_frame(rng, i + 1);
    const SkeletonFrame a = parse_frame(serialize_frame(f));
    const SkeletonFrame b = parse_frame(serialize_frame(a));
    CHECK(frames_close(a, b, 1e-9));
    CHECK(frames_close(a, f, 1e-9));
  }
}

TEST_CASE("stream reader stops at END and skips blanks") {
  std::stringstream in;
  in << testutil::identity_line(1) << "\n\n" << testutil::identity_line(2) << "\nEND\n" << testutil::identity_line(3);
  const auto frames = read_skeleton_stream(in);
  REQUIRE(frames.size() == 2);
  CHECK(frames[1].frame_index == 2);
}

TEST_CASE("zero-confidence orientations reuse the previous one") {
  std::string line1 = testutil::identity_line(1);
  const auto first = line1.find(testutil::identity_block());
  line1.replace(first, testutil::identity_block().size(), "0,-1,0,1,0,0,0,0,1");
  std::string line2 = testutil::identity_line(2);
  // head orientation confidence is the field right after the first block
  const auto conf = line2.find(testutil::identity_block()) + testutil::identity_block().size() + 1;
  line2.replace(conf, 1, "0");
  std::stringstream in;
  in << line1 << "\n" << line2 << "\n";
  const auto frames = read_skeleton_stream(in);
  REQUIRE(frames.size() == 2);
  CHECK((frames[1].rotation(Joint::Head) - frames[0].rotation(Joint::Head)).cwiseAbs().maxCoeff() < 1e-12);
  std::stringstream only;
  only << line2 << "\n";
  CHECK(read_skeleton_stream(only)[0].rotation(Joint::Head).isIdentity(1e-12));
}

TEST_CASE("joint layout remapping") {
  const JointLayout layout = JointLayout::parse(
      "neck,head,torso,left_shoulder,left_elbow,right_shoulder,right_elbow,left_hip,left_knee,right_hip,right_knee,"
      "left_hand,right_hand,left_foot,right_foot");
  const SkeletonFrame f = parse_frame(testutil::identity_line(1), layout);
  CHECK(f.position(Joint::Head).x() == doctest::Approx(10.0));
  CHECK(f.position(Joint::Neck).x() == doctest::Approx(0.0));
  CHECK_THROWS_AS(JointLayout::parse("head,neck"), Error);
}

TEST_CASE("mirroring reflects positions and swaps sides") {
  SkeletonFrame f = parse_frame(testutil::identity_line(1));
  f[Joint::LeftHand].position = Vec3(200, 0, 1500);
  f[Joint::RightHand].position = Vec3(-50, 10, 1400);
  const SkeletonFrame m = mirror_frame(f);
  CHECK((m.position(Joint::RightHand) - Vec3(-200, 0, 1500)).norm() < 1e-12);
  CHECK((m.position(Joint::LeftHand) - Vec3(50, 10, 1400)).norm() < 1e-12);
}

TEST_CASE("mirror is an involution that keeps labels and timing") {
  std::mt19937_64 rng(13);
  LabeledSequence s = testutil::random_sequence(rng, 30);
  s.activity = "drinking water";
  s.location = Location::Kitchen;
  const LabeledSequence m = mirror_sequence(s);
  const LabeledSequence mm = mirror_sequence(m);
  REQUIRE(m.frames.size() == s.frames.size());
  CHECK(m.activity == s.activity);
  CHECK(m.location == s.location);
  for (std::size_t i = 0; i < s.frames.size(); ++i) {
    CHECK(m.frames[i].timestamp() == s.frames[i].timestamp());
    CHECK(frames_close(mm.frames[i], s.frames[i], 1e-9));
    for (Joint j : kOrientedJoints) {
      const Mat3 r = m.frames[i].rotation(j);
      CHECK(std::abs(r.determinant() - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("validate rejects non-increasing frames") {
  std::mt19937_64 rng(17);
  LabeledSequence s = testutil::random_sequence(rng, 3);
  s.frames[2].frame_index = 1;
  CHECK_THROWS_AS(validate(s), Error);
}

TEST_CASE("manifest and dataset round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "actrec_skeleton_rt";
  std::filesystem::remove_all(dir);
  std::mt19937_64 rng(19);
  Dataset data;
  for (int i = 0; i < 2; ++i) {
    LabeledSequence s = testutil::random_sequence(rng, 5);
    s.activity = i == 0 ? "brushing teeth" : std::string(kRandomActivity);
    s.location = Location::Bathroom;
    s.subject = "p" + std::to_string(i);
    data.push_back(s);
  }
  save_dataset(dir, data);
  const Dataset loaded = load_dataset(dir);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].activity == "brushing teeth");
  CHECK(loaded[1].is_random());
  CHECK(loaded[0].location == Location::Bathroom);
  CHECK(loaded[1].subject == "p1");
  for (std::size_t i = 0; i < 5; ++i) CHECK(frames_close(loaded[0].frames[i], data[0].frames[i], 1e-9));
  std::filesystem::remove_all(dir);
}

TEST_CASE("missing manifest is a missing file") {
  try {
    load_dataset("/nonexistent/actrec");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingFile);
    CHECK(is_input_error(e.code()));
  }
}
