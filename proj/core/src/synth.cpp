#include "actrec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "actrec/error.hpp"
#include "actrec/hog.hpp"

namespace actrec {

namespace {

using J = Joint;

Pose with(Pose pose, std::initializer_list<std::pair<Joint, Vec3>> changes) {
  for (const auto& [j, p] : changes) pose[index(j)] = p;
  return pose;
}

// Smooth-step interpolation between keyframes of a looping cycle.
Pose sample(const MotionScript& script, double t) {
  const auto& keys = script.keyframes;
  if (keys.size() == 1) return keys.front().pose;
  double phase = std::fmod(t, script.cycle_seconds);
  if (phase < 0.0) phase += script.cycle_seconds;

  std::size_t next = 0;
  while (next < keys.size() && keys[next].time <= phase) ++next;
  const Keyframe& a = keys[(next + keys.size() - 1) % keys.size()];
  const Keyframe& b = keys[next % keys.size()];
  double span = b.time - a.time;
  double into = phase - a.time;
  if (span <= 0.0) span += script.cycle_seconds;
  if (into < 0.0) into += script.cycle_seconds;
  const double u = std::clamp(into / span, 0.0, 1.0);
  const double s = 0.5 - 0.5 * std::cos(std::numbers::pi * u);

  Pose out;
  for (std::size_t i = 0; i < kJointCount; ++i) out[i] = (1.0 - s) * a.pose[i] + s * b.pose[i];
  return out;
}

Pose mirror_pose(const Pose& pose) {
  Pose out;
  for (std::size_t i = 0; i < kJointCount; ++i) {
    Vec3 p = pose[i];
    p.x() = -p.x();
    out[index(mirror_joint(static_cast<Joint>(i)))] = p;
  }
  return out;
}

Mat3 spine_frame(const Vec3& up_direction, const Vec3& lateral) {
  const Vec3 a = up_direction.normalized();
  const Vec3 b = (lateral - lateral.dot(a) * a).normalized();
  Mat3 r;
  r.col(0) = b;
  r.col(1) = a;
  r.col(2) = b.cross(a);
  return r;
}

Mat3 shortest_arc(const Vec3& rest, const Vec3& direction) {
  return Eigen::Quaterniond::FromTwoVectors(rest, direction.normalized()).toRotationMatrix();
}

}  // namespace

Pose standing_pose() {
  Pose p;
  p[index(J::Head)] = {0, 560, 0};
  p[index(J::Neck)] = {0, 420, 0};
  p[index(J::Torso)] = {0, 180, 0};
  p[index(J::LeftShoulder)] = {170, 400, 0};
  p[index(J::RightShoulder)] = {-170, 400, 0};
  p[index(J::LeftElbow)] = {195, 120, 10};
  p[index(J::RightElbow)] = {-195, 120, 10};
  p[index(J::LeftHand)] = {205, -140, -20};
  p[index(J::RightHand)] = {-205, -140, -20};
  p[index(J::LeftHip)] = {100, -80, 0};
  p[index(J::RightHip)] = {-100, -80, 0};
  p[index(J::LeftKnee)] = {105, -500, -10};
  p[index(J::RightKnee)] = {-105, -500, -10};
  p[index(J::LeftFoot)] = {110, -920, 10};
  p[index(J::RightFoot)] = {-110, -920, 10};
  return p;
}

std::array<Mat3, kOrientedJointCount> limb_rotations(const Pose& w) {
  const auto at = [&](Joint j) -> const Vec3& { return w[index(j)]; };
  const Vec3 lateral = at(J::LeftShoulder) - at(J::RightShoulder);
  const Vec3 hip_center = 0.5 * (at(J::LeftHip) + at(J::RightHip));
  const Vec3 arm_rest = Vec3(0.0, -1.0, -1.0).normalized();
  const Vec3 leg_rest(0.0, -1.0, 0.0);

  std::array<Mat3, kOrientedJointCount> r;
  r[index(J::Head)] = spine_frame(at(J::Head) - at(J::Neck), lateral);
  r[index(J::Neck)] = spine_frame(at(J::Head) - at(J::Torso), lateral);
  r[index(J::Torso)] = spine_frame(at(J::Neck) - hip_center, lateral);
  r[index(J::LeftShoulder)] = shortest_arc(arm_rest, at(J::LeftElbow) - at(J::LeftShoulder));
  r[index(J::LeftElbow)] = shortest_arc(arm_rest, at(J::LeftHand) - at(J::LeftElbow));
  r[index(J::RightShoulder)] = shortest_arc(arm_rest, at(J::RightElbow) - at(J::RightShoulder));
  r[index(J::RightElbow)] = shortest_arc(arm_rest, at(J::RightHand) - at(J::RightElbow));
  r[index(J::LeftHip)] = shortest_arc(leg_rest, at(J::LeftKnee) - at(J::LeftHip));
  r[index(J::LeftKnee)] = shortest_arc(leg_rest, at(J::LeftFoot) - at(J::LeftKnee));
  r[index(J::RightHip)] = shortest_arc(leg_rest, at(J::RightKnee) - at(J::RightHip));
  r[index(J::RightKnee)] = shortest_arc(leg_rest, at(J::RightFoot) - at(J::RightKnee));
  return r;
}

LabeledSequence generate_synthetic(const MotionScript& script, std::uint64_t seed) {
  if (script.keyframes.empty()) throw Error(ErrorCode::EmptyScript, "script '" + script.name + "' has no keyframes");
  if (!(script.cycle_seconds > 0.0)) throw Error(ErrorCode::EmptyScript, "cycle length must be positive");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> jitter(0.0, 1.0);
  const auto frames = std::max<std::size_t>(90, static_cast<std::size_t>(std::lround(script.duration_seconds * kFrameRate)));

  LabeledSequence seq;
  seq.activity = script.activity;
  seq.location = script.location;
  seq.frames.reserve(frames);
  for (std::size_t n = 0; n < frames; ++n) {
    const double t = static_cast<double>(n) / kFrameRate;
    Pose pose = sample(script, t + script.phase_seconds);
    Vec3 origin = script.origin;
    if (script.drift_mm != 0.0) {
      origin.x() += script.drift_mm * std::sin(2.0 * std::numbers::pi * t / script.drift_period_seconds);
    }
    for (auto& p : pose) {
      p += origin;
      if (script.jitter_mm > 0.0) {
        for (int k = 0; k < 3; ++k) p(k) += script.jitter_mm * jitter(rng);
      }
    }

    SkeletonFrame frame;
    frame.frame_index = static_cast<std::int64_t>(n + 1);
    const auto rotations = limb_rotations(pose);
    for (std::size_t i = 0; i < kJointCount; ++i) {
      JointRecord& rec = frame.joints[i];
      rec.position = pose[i];
      rec.position_confidence = 1.0;
      if (i < kOrientedJointCount) {
        rec.orientation = rotations[i];
        rec.orientation_confidence = 1.0;
      }
    }
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

MotionScript raise_cup_script() {
  const Pose base = with(standing_pose(), {{J::LeftElbow, {210, 190, -160}}, {J::LeftHand, {40, 280, -320}}});
  const Pose rest = with(base, {{J::RightElbow, {-200, 110, -60}}, {J::RightHand, {-170, 40, -300}}});
  const Pose lifted = with(base, {{J::RightElbow, {-190, 300, -200}},
                                  {J::RightHand, {-50, 470, -130}},
                                  {J::Head, {0, 560, 15}}});
  const Pose tilted = with(lifted, {{J::Head, {0, 555, 30}}, {J::RightHand, {-45, 490, -120}}});
  MotionScript s;
  s.name = "raise cup";
  s.activity = "drinking water";
  s.cycle_seconds = 4.0;
  s.keyframes = {{0.0, rest}, {1.2, lifted}, {2.4, tilted}, {3.4, rest}};
  return s;
}

MotionScript phone_to_ear_script() {
  const Pose base = standing_pose();
  const Pose a = with(base, {{J::RightElbow, {-230, 300, -60}},
                             {J::RightHand, {-120, 540, -10}},
                             {J::Head, {-25, 555, 0}},
                             {J::LeftElbow, {320, 150, 30}},
                             {J::LeftHand, {170, -10, 50}}});
  const Pose b = with(a, {{J::RightHand, {-115, 548, -25}},
                          {J::LeftElbow, {320, 140, 40}},
                          {J::LeftHand, {180, -20, 60}}});
  MotionScript s;
  s.name = "phone to ear";
  s.activity = "talking on the phone";
  s.cycle_seconds = 5.0;
  s.keyframes = {{0.0, a}, {2.5, b}};
  return s;
}

MotionScript chop_script() {
  const Pose base = with(standing_pose(), {{J::Head, {0, 550, -90}},
                                          {J::Neck, {0, 415, -60}},
                                          {J::LeftShoulder, {170, 395, -40}},
                                          {J::RightShoulder, {-170, 395, -40}},
                                          {J::LeftElbow, {190, 120, -120}},
                                          {J::LeftHand, {90, 20, -330}}});
  const Pose up = with(base, {{J::RightElbow, {-200, 170, -140}}, {J::RightHand, {-110, 120, -340}}});
  const Pose down = with(base, {{J::RightElbow, {-200, 130, -130}}, {J::RightHand, {-110, 10, -340}}});
  MotionScript s;
  s.name = "chop";
  s.activity = "cooking (chopping)";
  s.cycle_seconds = 0.6;
  s.keyframes = {{0.0, up}, {0.3, down}};
  return s;
}

MotionScript still_script() {
  Pose clasped = with(standing_pose(), {{J::LeftElbow, {180, 140, -20}},
                                             {J::RightElbow, {-180, 140, -20}},
                                             {J::LeftHand, {60, -80, -120}},
                                             {J::RightHand, {-60, -80, -120}}});
  for (std::size_t i = 0; i < index(J::LeftHip); ++i) clasped[i].z() += 0.12 * std::max(0.0, clasped[i].y());
  Pose swayed = clasped;
  for (std::size_t i = 0; i < index(J::LeftHip); ++i) swayed[i].x() += 15.0;
  swayed[index(J::LeftHand)].x() += 15.0;
  swayed[index(J::RightHand)].x() += 15.0;
  MotionScript s;
  s.name = "still";
  s.activity = "relaxing";
  s.cycle_seconds = 6.0;
  s.keyframes = {{0.0, clasped}, {3.0, swayed}};
  return s;
}

MotionScript random_motion_script() {
  const Pose base = standing_pose();
  const Pose overhead = with(base, {{J::LeftElbow, {260, 620, -20}},
                                    {J::RightElbow, {-260, 620, -20}},
                                    {J::LeftHand, {250, 850, -50}},
                                    {J::RightHand, {-250, 850, -50}}});
  const Pose spread = with(base, {{J::LeftElbow, {460, 400, 0}},
                                  {J::RightElbow, {-460, 400, 0}},
                                  {J::LeftHand, {750, 400, 0}},
                                  {J::RightHand, {-750, 400, 0}}});
  const Pose side_stretch = with(base, {{J::Head, {120, 540, 0}},
                                        {J::Neck, {80, 410, 0}},
                                        {J::LeftShoulder, {240, 380, 0}},
                                        {J::RightShoulder, {-90, 420, 0}},
                                        {J::RightElbow, {-40, 660, -20}},
                                        {J::RightHand, {60, 880, -40}},
                                        {J::LeftElbow, {300, 110, 10}},
                                        {J::LeftHand, {330, -150, -10}}});
  const Pose wave = with(base, {{J::LeftElbow, {380, 420, -60}},
                                {J::LeftHand, {400, 680, -100}},
                                {J::RightKnee, {-105, -440, -150}},
                                {J::RightFoot, {-110, -860, -120}}});
  MotionScript s;
  s.name = "random";
  s.activity = std::string(kRandomActivity);
  s.cycle_seconds = 8.0;
  s.keyframes = {{0.0, base}, {1.5, overhead}, {3.0, spread}, {4.5, side_stretch}, {6.0, wave}};
  s.drift_mm = 350.0;
  s.drift_period_seconds = 7.0;
  return s;
}

std::vector<MotionScript> benchmark_scripts() {
  return {raise_cup_script(), phone_to_ear_script(), chop_script(), still_script(), random_motion_script()};
}

SubjectStyle subject_style(int subject_index, std::uint64_t family_seed) {
  std::mt19937_64 rng(family_seed * 1000003ULL + static_cast<std::uint64_t>(subject_index) * 7919ULL + 17ULL);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  SubjectStyle s;
  s.scale = 1.0 + 0.08 * unit(rng);
  s.speed = 1.0 + 0.12 * unit(rng);
  s.phase_seconds = 2.0 + 2.0 * unit(rng);
  s.reach_offset_mm = Vec3(25.0 * unit(rng), 25.0 * unit(rng), 25.0 * unit(rng));
  s.origin_offset_mm = Vec3(200.0 * unit(rng), 0.0, 300.0 * unit(rng));
  s.left_handed = subject_index % 3 == 1;
  return s;
}

MotionScript apply_style(const MotionScript& script, const SubjectStyle& style) {
  MotionScript out = script;
  out.cycle_seconds = script.cycle_seconds / style.speed;
  out.phase_seconds = script.phase_seconds + style.phase_seconds;
  out.drift_period_seconds = script.drift_period_seconds / style.speed;
  out.origin = script.origin + style.origin_offset_mm;
  for (auto& key : out.keyframes) {
    key.time /= style.speed;
    for (auto& p : key.pose) p *= style.scale;
    for (Joint hand : {J::LeftHand, J::RightHand}) key.pose[index(hand)] += style.reach_offset_mm;
    if (style.left_handed) key.pose = mirror_pose(key.pose);
  }
  return out;
}

Dataset generate_benchmark_dataset(const SyntheticDatasetOptions& options) {
  Dataset data;
  const auto scripts = benchmark_scripts();
  CameraIntrinsics intrinsics;
  for (int s = 0; s < options.subjects; ++s) {
    const SubjectStyle style = subject_style(s, options.seed);
    for (std::size_t k = 0; k < scripts.size(); ++k) {
      MotionScript script = apply_style(scripts[k], style);
      script.duration_seconds = options.seconds_per_sequence;
      script.jitter_mm = options.jitter_mm;
      LabeledSequence seq = generate_synthetic(script, options.seed * 7777ULL + static_cast<std::uint64_t>(s) * 101ULL + k);
      seq.subject = "subject" + std::to_string(s + 1);
      if (options.with_images) {
        for (const auto& frame : seq.frames) seq.images.push_back(render_frame(frame, intrinsics));
      }
      data.push_back(std::move(seq));
    }
  }
  return data;
}

ImageFrame render_frame(const SkeletonFrame& frame, const CameraIntrinsics& k) {
  ImageFrame img{RgbImage(k.width, k.height), GrayGrid(k.width, k.height, 0.0)};
  // Backdrop: a wall 3.5 m away with a soft horizontal gradient.
  for (int y = 0; y < k.height; ++y) {
    for (int x = 0; x < k.width; ++x) {
      img.depth.at(x, y) = 3500.0;
      const std::size_t o = (static_cast<std::size_t>(y) * k.width + x) * 3;
      const auto shade = static_cast<std::uint8_t>(150 + (x * 60) / k.width);
      img.rgb.data[o] = shade;
      img.rgb.data[o + 1] = shade;
      img.rgb.data[o + 2] = static_cast<std::uint8_t>(shade - 20);
    }
  }

  constexpr std::pair<Joint, Joint> kBones[] = {
      {J::Head, J::Neck},           {J::Neck, J::Torso},          {J::LeftShoulder, J::RightShoulder},
      {J::LeftShoulder, J::LeftElbow}, {J::LeftElbow, J::LeftHand}, {J::RightShoulder, J::RightElbow},
      {J::RightElbow, J::RightHand}, {J::Torso, J::LeftHip},      {J::Torso, J::RightHip},
      {J::LeftHip, J::LeftKnee},    {J::LeftKnee, J::LeftFoot},   {J::RightHip, J::RightKnee},
      {J::RightKnee, J::RightFoot}};
  constexpr double kLimbRadiusMm = 45.0;

  for (const auto& [a, b] : kBones) {
    const Vec3& pa = frame.position(a);
    const Vec3& pb = frame.position(b);
    if (pa.z() <= 0.0 || pb.z() <= 0.0) continue;
    const auto ua = project(pa, k);
    const auto ub = project(pb, k);
    const double radius_px = k.fx * kLimbRadiusMm / (0.5 * (pa.z() + pb.z()));
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min(ua.x(), ub.x()) - radius_px)));
    const int x1 = std::min(k.width - 1, static_cast<int>(std::ceil(std::max(ua.x(), ub.x()) + radius_px)));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min(ua.y(), ub.y()) - radius_px)));
    const int y1 = std::min(k.height - 1, static_cast<int>(std::ceil(std::max(ua.y(), ub.y()) + radius_px)));
    const Eigen::Vector2d d = ub - ua;
    const double len2 = std::max(d.squaredNorm(), 1e-9);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const Eigen::Vector2d p(x, y);
        const double s = std::clamp((p - ua).dot(d) / len2, 0.0, 1.0);
        if ((ua + s * d - p).norm() > radius_px) continue;
        const double z = pa.z() + s * (pb.z() - pa.z());
        if (z >= img.depth.at(x, y)) continue;
        img.depth.at(x, y) = z;
        const std::size_t o = (static_cast<std::size_t>(y) * k.width + x) * 3;
        img.rgb.data[o] = 200;
        img.rgb.data[o + 1] = 120;
        img.rgb.data[o + 2] = 90;
      }
    }
  }
  return img;
}

}  // namespace actrec
