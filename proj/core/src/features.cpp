#include "actrec/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "actrec/error.hpp"

namespace actrec {

namespace {

template <std::size_t N>
void put_quaternion(std::array<double, N>& out, std::size_t offset, const Quaternion& q) {
  out[offset] = q.w;
  out[offset + 1] = q.x;
  out[offset + 2] = q.y;
  out[offset + 3] = q.z;
}

template <std::size_t N>
void put_vec(std::array<double, N>& out, std::size_t offset, const Vec3& v) {
  out[offset] = v.x();
  out[offset + 1] = v.y();
  out[offset + 2] = v.z();
}

Vec3 in_frame(const SkeletonFrame& f, Joint origin, const Vec3& p) {
  return f.rotation(origin).transpose() * (p - f.position(origin));
}

}  // namespace

std::size_t FeatureVector::dimension() const {
  return kSkeletalDim + (hog_simple ? kSimpleHogDim : 0) + (hog_skeletal ? kSkeletalHogDim : 0);
}

Eigen::VectorXd FeatureVector::flatten() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(dimension()));
  Eigen::Index i = 0;
  for (double x : body_pose) v(i++) = x;
  for (double x : hand) v(i++) = x;
  for (double x : motion) v(i++) = x;
  if (hog_simple) for (double x : *hog_simple) v(i++) = x;
  if (hog_skeletal) for (double x : *hog_skeletal) v(i++) = x;
  return v;
}

void FrameHistory::push(const SkeletonFrame& frame) {
  frames_.push_back(frame);
  while (frames_.size() > capacity_) frames_.pop_front();
}

const SkeletonFrame& FrameHistory::back(std::size_t k) const {
  const std::size_t n = frames_.size();
  return frames_[k >= n ? 0 : n - 1 - k];
}

double lean_angle(const SkeletonFrame& frame) {
  const Vec3 hip_center = 0.5 * (frame.position(Joint::LeftHip) + frame.position(Joint::RightHip));
  const Vec3 spine = frame.position(Joint::Head) - hip_center;
  const double n = spine.norm();
  if (n == 0.0) return 0.0;
  // atan2 of the horizontal and vertical components is accurate near 0.
  const Vec3 up = world_up();
  const double vertical = spine.dot(up);
  const double horizontal = (spine - vertical * up).norm();
  return std::atan2(horizontal, vertical);
}

std::array<double, kBodyPoseDim> body_pose_features(const SkeletonFrame& frame) {
  std::array<double, kBodyPoseDim> out{};
  const Mat3 torso_t = frame.rotation(Joint::Torso).transpose();
  std::size_t o = 0;
  for (Joint j : kPoseJoints) {
    put_quaternion(out, o, to_halfspace_quaternion(torso_t * frame.rotation(j)));
    o += 4;
  }
  put_vec(out, o, in_frame(frame, Joint::Torso, frame.position(Joint::LeftFoot)));
  put_vec(out, o + 3, in_frame(frame, Joint::Torso, frame.position(Joint::RightFoot)));
  out[o + 6] = lean_angle(frame);
  return out;
}

std::array<double, kHandDim> hand_features(const FrameHistory& history) {
  std::array<double, kHandDim> out{};
  const SkeletonFrame& f = history.current();
  const Vec3 up = world_up();
  std::size_t o = 0;
  for (Joint hand : {Joint::LeftHand, Joint::RightHand}) {
    const Vec3& p = f.position(hand);
    put_vec(out, o, in_frame(f, Joint::Torso, p));
    put_vec(out, o + 3, in_frame(f, Joint::Head, p));
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (int k = 0; k < kHandWindow; ++k) {
      const double h = history.back(static_cast<std::size_t>(k)).position(hand).dot(up);
      hi = std::max(hi, h);
      lo = std::min(lo, h);
    }
    out[o + 6] = hi;
    out[o + 7] = lo;
    o += 8;
  }
  return out;
}

std::array<double, kMotionDim> motion_features(const FrameHistory& history) {
  std::array<double, kMotionDim> out{};
  const SkeletonFrame& now = history.current();
  std::size_t o = 0;
  for (int offset : kMotionOffsets) {
    const SkeletonFrame& then = history.back(static_cast<std::size_t>(offset));
    for (Joint j : kOrientedJoints) {
      put_quaternion(out, o, to_halfspace_quaternion(then.rotation(j).transpose() * now.rotation(j)));
      o += 4;
    }
  }
  return out;
}

FeatureVector Featurizer::push(const SkeletonFrame& frame, const ImageFrame* image) {
  history_.push(frame);
  FeatureVector fv;
  fv.body_pose = body_pose_features(frame);
  fv.hand = hand_features(history_);
  fv.motion = motion_features(history_);
  if (blocks_.needs_images()) {
    if (image == nullptr || image->rgb.empty() || image->depth.empty()) {
      throw Error(ErrorCode::MalformedInput, "HOG features enabled but frame " +
                                                 std::to_string(frame.frame_index) + " has no images");
    }
    const GrayGrid gray = to_gray(image->rgb);
    const GrayGrid depth = fill_depth_holes(image->depth);
    if (blocks_.simple_hog) fv.hog_simple = simple_hog(gray, depth, person_bbox(frame, intrinsics_));
    if (blocks_.skeletal_hog) fv.hog_skeletal = skeletal_hog(gray, depth, frame, intrinsics_);
  }
  return fv;
}

std::vector<FeatureVector> featurize(const LabeledSequence& seq, FeatureBlocks blocks,
                                     const CameraIntrinsics& intrinsics) {
  Featurizer featurizer(blocks, intrinsics);
  std::vector<FeatureVector> out;
  out.reserve(seq.frames.size());
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    out.push_back(featurizer.push(seq.frames[i], seq.has_images() ? &seq.images[i] : nullptr));
  }
  return out;
}

}  // namespace actrec
