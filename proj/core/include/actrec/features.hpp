#pragma once

#include <array>
#include <cstddef>
#include <deque>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "actrec/hog.hpp"
#include "actrec/skeleton.hpp"

namespace actrec {

inline constexpr std::size_t kBodyPoseDim = 47;
inline constexpr std::size_t kHandDim = 16;
inline constexpr std::size_t kMotionDim = 396;
inline constexpr std::size_t kSkeletalDim = kBodyPoseDim + kHandDim + kMotionDim;
inline constexpr std::size_t kSimpleHogDim = 2 * kHogDim;
inline constexpr std::size_t kSkeletalHogDim = 8 * kHogDim;

/// Frames back from the current one at which motion is measured.
inline constexpr std::array<int, 9> kMotionOffsets{5, 9, 14, 20, 27, 35, 44, 54, 65};
/// Samples (current included) over which hand height extremes are taken.
inline constexpr int kHandWindow = 6;
inline constexpr std::size_t kHistoryLength = 66;

/// The 10 oriented joints other than the torso, in body-pose block order.
inline constexpr std::array<Joint, 10> kPoseJoints{Joint::Head,      Joint::Neck,      Joint::LeftShoulder,
                                                   Joint::LeftElbow, Joint::RightShoulder, Joint::RightElbow,
                                                   Joint::LeftHip,   Joint::LeftKnee,  Joint::RightHip,
                                                   Joint::RightKnee};

struct FeatureVector {
  std::array<double, kBodyPoseDim> body_pose{};
  std::array<double, kHandDim> hand{};
  std::array<double, kMotionDim> motion{};
  std::optional<std::array<double, kSimpleHogDim>> hog_simple;
  std::optional<std::array<double, kSkeletalHogDim>> hog_skeletal;

  std::size_t dimension() const;
  /// body pose, hand, motion, then whichever HOG blocks are present.
  Eigen::VectorXd flatten() const;
};

/// Which blocks a model consumes. Skeletal features are always on.
struct FeatureBlocks {
  bool simple_hog = false;
  bool skeletal_hog = false;

  bool needs_images() const { return simple_hog || skeletal_hog; }
  std::size_t dimension() const {
    return kSkeletalDim + (simple_hog ? kSimpleHogDim : 0) + (skeletal_hog ? kSkeletalHogDim : 0);
  }
};

/// Most recent frames, newest last. Lookups before the first frame return the
/// earliest retained frame.
class FrameHistory {
 public:
  explicit FrameHistory(std::size_t capacity = kHistoryLength) : capacity_(capacity) {}

  void push(const SkeletonFrame& frame);
  bool empty() const { return frames_.empty(); }
  std::size_t size() const { return frames_.size(); }
  const SkeletonFrame& current() const { return frames_.back(); }
  /// Frame `k` steps before the current one, clamped to the earliest.
  const SkeletonFrame& back(std::size_t k) const;

 private:
  std::size_t capacity_;
  std::deque<SkeletonFrame> frames_;
};

std::array<double, kBodyPoseDim> body_pose_features(const SkeletonFrame& frame);
/// Angle in radians between the hip-centre -> head line and world vertical.
double lean_angle(const SkeletonFrame& frame);
std::array<double, kHandDim> hand_features(const FrameHistory& history);
std::array<double, kMotionDim> motion_features(const FrameHistory& history);

/// Stateful per-stream featurizer.
class Featurizer {
 public:
  explicit Featurizer(FeatureBlocks blocks = {}, CameraIntrinsics intrinsics = {})
      : blocks_(blocks), intrinsics_(intrinsics) {}

  /// `image` is required when any HOG block is enabled.
  FeatureVector push(const SkeletonFrame& frame, const ImageFrame* image = nullptr);

 private:
  FeatureBlocks blocks_;
  CameraIntrinsics intrinsics_;
  FrameHistory history_;
};

std::vector<FeatureVector> featurize(const LabeledSequence& seq, FeatureBlocks blocks = {},
                                     const CameraIntrinsics& intrinsics = {});

}  // namespace actrec
