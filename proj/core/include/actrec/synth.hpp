#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "actrec/skeleton.hpp"

namespace actrec {

struct CameraIntrinsics;

using Pose = std::array<Vec3, kJointCount>;

/// A pose reached at `time` seconds into the script's cycle. Positions are in
/// millimetres relative to the body origin (x toward the body's left, y up,
/// z away from the camera).
struct Keyframe {
  double time = 0.0;
  Pose pose{};
};

/// Looping keyframe animation used to synthesize labeled skeleton streams.
struct MotionScript {
  std::string name;
  std::string activity;
  Location location = Location::Office;
  std::vector<Keyframe> keyframes;  // ascending times within [0, cycle_seconds)
  double cycle_seconds = 4.0;
  double phase_seconds = 0.0;
  double duration_seconds = 15.0;
  double jitter_mm = 5.0;
  Vec3 origin{0.0, 0.0, 2500.0};
  /// Sideways walking: origin.x += drift_mm * sin(2 pi t / drift_period_seconds).
  double drift_mm = 0.0;
  double drift_period_seconds = 8.0;
};

Pose standing_pose();

/// Spine joints use the shoulder line as lateral axis; limbs use the shortest
/// arc from a fixed rest direction to the parent->child direction.
std::array<Mat3, kOrientedJointCount> limb_rotations(const Pose& world_positions);

/// Deterministic in (script, seed); at least 90 frames. Throws EmptyScript.
LabeledSequence generate_synthetic(const MotionScript& script, std::uint64_t seed);

MotionScript raise_cup_script();
MotionScript phone_to_ear_script();
MotionScript chop_script();
MotionScript still_script();
MotionScript random_motion_script();

/// The four activity scripts followed by the random script.
std::vector<MotionScript> benchmark_scripts();

/// Per-subject variation of a script: body scale, speed, phase, reach offsets,
/// placement in the room and handedness.
struct SubjectStyle {
  double scale = 1.0;
  double speed = 1.0;
  double phase_seconds = 0.0;
  Vec3 reach_offset_mm = Vec3::Zero();
  Vec3 origin_offset_mm = Vec3::Zero();
  bool left_handed = false;
};

SubjectStyle subject_style(int subject_index, std::uint64_t family_seed);
MotionScript apply_style(const MotionScript& script, const SubjectStyle& style);

struct SyntheticDatasetOptions {
  int subjects = 3;
  double seconds_per_sequence = 15.0;
  double jitter_mm = 5.0;
  std::uint64_t seed = 7;
  bool with_images = false;
};

/// One sequence per (subject, script); subject ids are "subject1".."subjectN".
Dataset generate_benchmark_dataset(const SyntheticDatasetOptions& options);

/// Draws the skeleton as thick limbs into a 640x480 RGB image and depth map
/// (depth in millimetres, 0 = no return).
ImageFrame render_frame(const SkeletonFrame& frame, const CameraIntrinsics& intrinsics);

}  // namespace actrec
