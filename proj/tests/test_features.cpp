#include <doctest.h>

#include <numbers>
#include <random>

#include "actrec/features.hpp"
#include "actrec/skeleton.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace actrec;

namespace {

SkeletonFrame upright_frame() {
  SkeletonFrame f = parse_frame(testutil::identity_line(1));
  f[Joint::LeftHip].position = Vec3(100, -400, 2000);
  f[Joint::RightHip].position = Vec3(-100, -400, 2000);
  f[Joint::Head].position = Vec3(0, 300, 2000);
  return f;
}

}  // namespace

TEST_CASE("block dimensions") {
  std::mt19937_64 rng(23);
  const LabeledSequence s = testutil::random_sequence(rng, 80);
  for (const auto& f : featurize(s)) {
    CHECK(f.body_pose.size() == 47);
    CHECK(f.hand.size() == 16);
    CHECK(f.motion.size() == 396);
    CHECK(f.flatten().size() == 459);
    CHECK(f.flatten().allFinite());
  }
}

TEST_CASE("torso-aligned joints give identity pose quaternions") {
  std::mt19937_64 rng(29);
  SkeletonFrame f = testutil::random_frame(rng);
  for (Joint j : kOrientedJoints) f[j].orientation = f.rotation(Joint::Torso);
  const auto pose = body_pose_features(f);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(pose[4 * i] == doctest::Approx(1.0));
    CHECK(std::abs(pose[4 * i + 1]) < 1e-12);
  }
}

TEST_CASE("lean angle") {
  SkeletonFrame f = upright_frame();
  CHECK(std::abs(lean_angle(f)) < 1e-9);
  const double a = std::numbers::pi / 6;
  f[Joint::Head].position = Vec3(0, -400 + 700 * std::cos(a), 2000 - 700 * std::sin(a));
  CHECK(lean_angle(f) == doctest::Approx(0.5235987755982988).epsilon(1e-9));
}

TEST_CASE("foot positions are in the torso frame") {
  SkeletonFrame f = upright_frame();
  f[Joint::Torso].position = Vec3(10, 0, 2000);
  f[Joint::Torso].orientation = axis_angle(Vec3::UnitY(), std::numbers::pi / 2);
  f[Joint::LeftFoot].position = Vec3(10, -900, 2100);
  const auto pose = body_pose_features(f);
  const Vec3 expected = f.rotation(Joint::Torso).transpose() * Vec3(0, -900, 100);
  CHECK(pose[40] == doctest::Approx(expected.x()));
  CHECK(pose[41] == doctest::Approx(expected.y()));
  CHECK(pose[42] == doctest::Approx(expected.z()));
}

TEST_CASE("hand extremes over the window") {
  FrameHistory h;
  SkeletonFrame f = upright_frame();
  for (int i = 0; i < 8; ++i) {
    f.frame_index = i + 1;
    f[Joint::LeftHand].position.y() = 10.0 * i;
    h.push(f);
  }
  const auto hand = hand_features(h);
  CHECK(hand[6] - hand[7] == doctest::Approx(50.0));
  CHECK(hand[6] == doctest::Approx(70.0));
  // right hand is stationary
  CHECK(hand[14] == doctest::Approx(hand[15]));
  CHECK(hand[14] == doctest::Approx(f.position(Joint::RightHand).y()));
}

TEST_CASE("static pose has no motion, and a single frame pads") {
  FrameHistory h;
  h.push(upright_frame());
  const auto one = motion_features(h);
  for (std::size_t i = 0; i < 99; ++i) {
    CHECK(one[4 * i] == doctest::Approx(1.0));
    CHECK(std::abs(one[4 * i + 3]) < 1e-12);
  }
  for (int i = 0; i < 70; ++i) h.push(upright_frame());
  CHECK(motion_features(h) == one);
}

TEST_CASE("elbow turning one degree per frame") {
  FrameHistory h;
  SkeletonFrame f = upright_frame();
  const Vec3 axis = Vec3(0.3, 0.4, 0.5).normalized();
  for (int i = 0; i < 70; ++i) {
    f.frame_index = i + 1;
    f[Joint::LeftElbow].orientation = axis_angle(axis, i * std::numbers::pi / 180.0);
    h.push(f);
  }
  const auto m = motion_features(h);
  const std::size_t elbow = 4;  // left elbow in oriented-joint order
  const std::size_t offset20 = 3;
  const double w = m[4 * (offset20 * 11 + elbow)];
  CHECK(2.0 * std::acos(w) == doctest::Approx(20.0 * std::numbers::pi / 180.0).epsilon(1e-9));
}

TEST_CASE("emitted quaternions are unit and half-space") {
  std::mt19937_64 rng(31);
  const auto feats = featurize(testutil::random_sequence(rng, 70));
  for (const auto& f : feats) {
    for (std::size_t i = 0; i < 10; ++i) {
      const Quaternion q{f.body_pose[4 * i], f.body_pose[4 * i + 1], f.body_pose[4 * i + 2], f.body_pose[4 * i + 3]};
      CHECK(std::abs(q.norm() - 1.0) < 1e-9);
      CHECK(is_halfspace(q));
    }
    for (std::size_t i = 0; i < 99; ++i) {
      const Quaternion q{f.motion[4 * i], f.motion[4 * i + 1], f.motion[4 * i + 2], f.motion[4 * i + 3]};
      CHECK(std::abs(q.norm() - 1.0) < 1e-9);
      CHECK(is_halfspace(q));
    }
  }
}

TEST_CASE("mirrored stream matches the permuted features") {
  std::mt19937_64 rng(37);
  const LabeledSequence s = testutil::random_sequence(rng, 40);
  const auto a = featurize(s);
  const auto b = featurize(mirror_sequence(s));
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Eigen::VectorXd expected = oracle::mirror_features(a[i]).flatten();
    CHECK((expected - b[i].flatten()).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("rigid motion invariance except world-vertical entries") {
  std::mt19937_64 rng(41);
  const LabeledSequence s = testutil::random_sequence(rng, 70);
  const Mat3 g = axis_angle(Vec3(0.2, 0.9, 0.1).normalized(), 0.8);
  const Mat3 yaw = axis_angle(Vec3::UnitY(), 0.8);
  auto transform = [&](const Mat3& rot, const Vec3& shift) {
    LabeledSequence t = s;
    for (auto& f : t.frames)
      for (auto& rec : f.joints) {
        rec.position = rot * rec.position + shift;
        if (rec.orientation) rec.orientation = rot * *rec.orientation;
      }
    return featurize(t);
  };
  const auto base = featurize(s);
  const auto general = transform(g, Vec3(30, -40, 500));
  const auto vertical = transform(yaw, Vec3(30, 0, 500));
  for (std::size_t i = 0; i < base.size(); ++i) {
    for (std::size_t k = 0; k < 46; ++k) CHECK(general[i].body_pose[k] == doctest::Approx(base[i].body_pose[k]).epsilon(1e-9).scale(1.0));
    for (std::size_t k : {0, 1, 2, 3, 4, 5, 8, 9, 10, 11, 12, 13})
      CHECK(general[i].hand[k] == doctest::Approx(base[i].hand[k]).scale(1.0));
    for (std::size_t k = 0; k < 396; ++k) CHECK(general[i].motion[k] == doctest::Approx(base[i].motion[k]).scale(1.0));
    CHECK(vertical[i].body_pose[46] == doctest::Approx(base[i].body_pose[46]).scale(1.0));
    CHECK(vertical[i].hand[6] == doctest::Approx(base[i].hand[6]).scale(1.0));
    CHECK(vertical[i].hand[15] == doctest::Approx(base[i].hand[15]).scale(1.0));
  }
}
