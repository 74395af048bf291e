#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "actrec/image.hpp"
#include "actrec/rotation.hpp"

namespace actrec {

inline constexpr double kFrameRate = 30.0;
inline constexpr std::size_t kJointCount = 15;
inline constexpr std::size_t kOrientedJointCount = 11;
inline constexpr std::size_t kPositionOnlyJointCount = 4;
/// frame index + 11 x (9 rotation + 1 conf + 3 position + 1 conf) + 4 x (3 position + 1 conf)
inline constexpr std::size_t kFieldsPerLine = 1 + kOrientedJointCount * 14 + kPositionOnlyJointCount * 4;

/// Joint identifiers. The first 11 carry orientation.
enum class Joint : std::uint8_t {
  Head,
  Neck,
  Torso,
  LeftShoulder,
  LeftElbow,
  RightShoulder,
  RightElbow,
  LeftHip,
  LeftKnee,
  RightHip,
  RightKnee,
  LeftHand,
  RightHand,
  LeftFoot,
  RightFoot,
};

inline constexpr std::size_t index(Joint j) { return static_cast<std::size_t>(j); }
inline constexpr bool has_orientation(Joint j) { return index(j) < kOrientedJointCount; }
/// Left/right counterpart; midline joints map to themselves.
Joint mirror_joint(Joint j);
std::string_view joint_name(Joint j);

inline constexpr std::array<Joint, kOrientedJointCount> kOrientedJoints{
    Joint::Head,     Joint::Neck,      Joint::Torso,   Joint::LeftShoulder,
    Joint::LeftElbow, Joint::RightShoulder, Joint::RightElbow, Joint::LeftHip,
    Joint::LeftKnee, Joint::RightHip,  Joint::RightKnee};

/// World vertical in the sensor frame.
inline Vec3 world_up() { return Vec3::UnitY(); }

struct JointRecord {
  Vec3 position = Vec3::Zero();          // millimetres, sensor frame
  std::optional<Mat3> orientation;       // sensor frame; present for oriented joints
  double position_confidence = 1.0;
  double orientation_confidence = 0.0;
};

struct SkeletonFrame {
  std::int64_t frame_index = 0;
  std::array<JointRecord, kJointCount> joints{};

  double timestamp() const { return static_cast<double>(frame_index) / kFrameRate; }

  const JointRecord& operator[](Joint j) const { return joints[index(j)]; }
  JointRecord& operator[](Joint j) { return joints[index(j)]; }

  const Vec3& position(Joint j) const { return joints[index(j)].position; }
  /// Orientation of an oriented joint; identity if it is missing.
  Mat3 rotation(Joint j) const;
};

/// Column order of the text format. Oriented joints come first, then
/// position-only joints; both groups may be remapped.
struct JointLayout {
  std::array<Joint, kOrientedJointCount> oriented = kOrientedJoints;
  std::array<Joint, kPositionOnlyJointCount> position_only{Joint::LeftHand, Joint::RightHand,
                                                          Joint::LeftFoot, Joint::RightFoot};

  /// Parses "head,neck,..." (15 names); throws MalformedInput on bad names or grouping.
  static JointLayout parse(std::string_view names);
};

/// Rotation blocks whose orthonormality error or |det - 1| exceeds this are rejected.
inline constexpr double kOrthonormalRejectTolerance = 0.1;

/// Parses one comma-separated record. Rotations are replaced by their nearest
/// proper rotation. A rotation block with zero confidence is stored as the
/// identity with confidence 0; see OrientationFiller.
SkeletonFrame parse_frame(std::string_view line, const JointLayout& layout = {});

/// Inverse of parse_frame, printing with round-trip precision.
std::string serialize_frame(const SkeletonFrame& frame, const JointLayout& layout = {});

/// Replaces zero-confidence orientations by the last confident one for that
/// joint (identity before any is seen).
class OrientationFiller {
 public:
  void apply(SkeletonFrame& frame);

 private:
  std::array<std::optional<Mat3>, kOrientedJointCount> last_{};
};

/// Reads frames until EOF or an "END" line; blank lines are skipped.
std::vector<SkeletonFrame> read_skeleton_stream(std::istream& in, const JointLayout& layout = {});
std::vector<SkeletonFrame> read_skeleton_file(const std::filesystem::path& path,
                                              const JointLayout& layout = {});
void write_skeleton_file(const std::filesystem::path& path, const std::vector<SkeletonFrame>& frames,
                         const JointLayout& layout = {});

enum class Location : std::uint8_t { Bathroom, Bedroom, Kitchen, LivingRoom, Office };
inline constexpr std::array<Location, 5> kAllLocations{Location::Bathroom, Location::Bedroom,
                                                       Location::Kitchen, Location::LivingRoom,
                                                       Location::Office};
std::string_view to_string(Location loc);
Location parse_location(std::string_view text);

inline constexpr std::string_view kRandomActivity = "RANDOM";
inline constexpr std::string_view kNeutralActivity = "NEUTRAL";

struct LabeledSequence {
  std::vector<SkeletonFrame> frames;
  std::vector<ImageFrame> images;  // empty, or one per frame
  std::string activity;
  Location location = Location::Office;
  std::string subject;

  bool is_random() const { return activity == kRandomActivity; }
  bool has_images() const { return !images.empty(); }
};

/// Throws MalformedInput if frame indices are not strictly increasing or the
/// image list is misaligned.
void validate(const LabeledSequence& seq);

SkeletonFrame mirror_frame(const SkeletonFrame& frame);
/// Reflects across the sensor's x = 0 plane: swaps left/right joints, negates
/// x, conjugates rotations by diag(-1,1,1) and flips images horizontally.
LabeledSequence mirror_sequence(const LabeledSequence& seq);

struct ManifestEntry {
  std::string file;
  std::string activity;
  Location location = Location::Office;
  std::string subject;
};

using Dataset = std::vector<LabeledSequence>;

/// CSV with header file,activity,location,subject.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);

/// RGB_<n>.ppm / Depth_<n>.pgm for every frame from the folder named after the
/// skeleton file's stem; empty when that folder does not exist.
std::vector<ImageFrame> load_sequence_images(const std::filesystem::path& skeleton_file,
                                             const std::vector<SkeletonFrame>& frames);

/// Loads every sequence named in <dir>/manifest.csv. If a directory named after
/// the skeleton file's stem exists next to it, RGB_<n>.ppm / Depth_<n>.pgm are
/// loaded for each frame n.
Dataset load_dataset(const std::filesystem::path& dir, const JointLayout& layout = {});

/// Writes sequences as <stem>.txt files plus manifest.csv (and image folders
/// when sequences carry images).
void save_dataset(const std::filesystem::path& dir, const Dataset& data, const JointLayout& layout = {});

}  // namespace actrec
