#include "actrec/skeleton.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include <Eigen/LU>

#include "actrec/error.hpp"

namespace actrec {

namespace {

constexpr std::array<std::string_view, kJointCount> kJointNames{
    "head",      "neck",      "torso",      "left_shoulder", "left_elbow",
    "right_shoulder", "right_elbow", "left_hip", "left_knee", "right_hip",
    "right_knee", "left_hand", "right_hand", "left_foot", "right_foot"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(std::string_view field) {
  double value = 0.0;
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    // from_chars rejects "nan"/"inf" spellings some writers emit; treat them as non-finite.
    std::string lower(field);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower.find("nan") != std::string::npos || lower.find("inf") != std::string::npos) {
      throw Error(ErrorCode::NonFiniteValue, "non-finite field '" + std::string(field) + "'");
    }
    throw Error(ErrorCode::MalformedInput, "not a number: '" + std::string(field) + "'");
  }
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::NonFiniteValue, "non-finite field '" + std::string(field) + "'");
  }
  return value;
}

double parse_confidence(std::string_view field) {
  const double c = parse_number(field);
  if (c < 0.0 || c > 1.0) throw Error(ErrorCode::MalformedInput, "confidence outside [0,1]");
  return c;
}

void append_number(std::string& out, double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

}  // namespace

Joint mirror_joint(Joint j) {
  switch (j) {
    case Joint::LeftShoulder: return Joint::RightShoulder;
    case Joint::RightShoulder: return Joint::LeftShoulder;
    case Joint::LeftElbow: return Joint::RightElbow;
    case Joint::RightElbow: return Joint::LeftElbow;
    case Joint::LeftHip: return Joint::RightHip;
    case Joint::RightHip: return Joint::LeftHip;
    case Joint::LeftKnee: return Joint::RightKnee;
    case Joint::RightKnee: return Joint::LeftKnee;
    case Joint::LeftHand: return Joint::RightHand;
    case Joint::RightHand: return Joint::LeftHand;
    case Joint::LeftFoot: return Joint::RightFoot;
    case Joint::RightFoot: return Joint::LeftFoot;
    default: return j;
  }
}

std::string_view joint_name(Joint j) { return kJointNames[index(j)]; }

Mat3 SkeletonFrame::rotation(Joint j) const {
  const auto& o = joints[index(j)].orientation;
  return o ? *o : Mat3::Identity();
}

JointLayout JointLayout::parse(std::string_view names) {
  const auto parts = split(names, ',');
  if (parts.size() != kJointCount) {
    throw Error(ErrorCode::MalformedInput, "joint layout needs 15 names");
  }
  std::array<bool, kJointCount> seen{};
  JointLayout layout;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto it = std::find(kJointNames.begin(), kJointNames.end(), parts[i]);
    if (it == kJointNames.end()) {
      throw Error(ErrorCode::MalformedInput, "unknown joint '" + std::string(parts[i]) + "'");
    }
    const auto j = static_cast<Joint>(it - kJointNames.begin());
    if (seen[index(j)]) throw Error(ErrorCode::MalformedInput, "duplicate joint in layout");
    seen[index(j)] = true;
    if ((i < kOrientedJointCount) != has_orientation(j)) {
      throw Error(ErrorCode::MalformedInput,
                  "layout must list the 11 oriented joints before the 4 position-only joints");
    }
    if (i < kOrientedJointCount) {
      layout.oriented[i] = j;
    } else {
      layout.position_only[i - kOrientedJointCount] = j;
    }
  }
  return layout;
}

SkeletonFrame parse_frame(std::string_view line, const JointLayout& layout) {
  auto fields = split(trim(line), ',');
  if (fields.size() == kFieldsPerLine + 1 && fields.back().empty()) fields.pop_back();
  if (fields.size() != kFieldsPerLine) {
    throw Error(ErrorCode::FieldCountMismatch, "expected " + std::to_string(kFieldsPerLine) +
                                                   " fields, got " + std::to_string(fields.size()));
  }

  SkeletonFrame frame;
  const double index_value = parse_number(fields[0]);
  if (index_value < 0.0 || index_value != std::floor(index_value)) {
    throw Error(ErrorCode::MalformedInput, "frame index must be a non-negative integer");
  }
  frame.frame_index = static_cast<std::int64_t>(index_value);

  std::size_t f = 1;
  for (Joint j : layout.oriented) {
    Mat3 r;
    for (int k = 0; k < 9; ++k) r(k / 3, k % 3) = parse_number(fields[f++]);
    JointRecord& rec = frame[j];
    rec.orientation_confidence = parse_confidence(fields[f++]);
    for (int k = 0; k < 3; ++k) rec.position(k) = parse_number(fields[f++]);
    rec.position_confidence = parse_confidence(fields[f++]);

    if (rec.orientation_confidence == 0.0) {
      rec.orientation = Mat3::Identity();
      continue;
    }
    const double deviation = std::max(orthonormality_error(r), std::abs(r.determinant() - 1.0));
    if (deviation > kOrthonormalRejectTolerance) {
      std::ostringstream msg;
      msg << joint_name(j) << " rotation deviates from orthonormal by " << deviation;
      throw Error(ErrorCode::NonOrthonormalBeyondTolerance, msg.str());
    }
    rec.orientation = nearest_rotation(r);
  }
  for (Joint j : layout.position_only) {
    JointRecord& rec = frame[j];
    for (int k = 0; k < 3; ++k) rec.position(k) = parse_number(fields[f++]);
    rec.position_confidence = parse_confidence(fields[f++]);
    rec.orientation.reset();
    rec.orientation_confidence = 0.0;
  }
  return frame;
}

std::string serialize_frame(const SkeletonFrame& frame, const JointLayout& layout) {
  std::string out;
  out.reserve(kFieldsPerLine * 12);
  out += std::to_string(frame.frame_index);
  for (Joint j : layout.oriented) {
    const JointRecord& rec = frame[j];
    const Mat3 r = frame.rotation(j);
    for (int k = 0; k < 9; ++k) {
      out += ',';
      append_number(out, r(k / 3, k % 3));
    }
    out += ',';
    append_number(out, rec.orientation_confidence);
    for (int k = 0; k < 3; ++k) {
      out += ',';
      append_number(out, rec.position(k));
    }
    out += ',';
    append_number(out, rec.position_confidence);
  }
  for (Joint j : layout.position_only) {
    const JointRecord& rec = frame[j];
    for (int k = 0; k < 3; ++k) {
      out += ',';
      append_number(out, rec.position(k));
    }
    out += ',';
    append_number(out, rec.position_confidence);
  }
  return out;
}

void OrientationFiller::apply(SkeletonFrame& frame) {
  for (std::size_t i = 0; i < kOrientedJointCount; ++i) {
    JointRecord& rec = frame.joints[i];
    if (rec.orientation_confidence > 0.0 && rec.orientation) {
      last_[i] = rec.orientation;
    } else {
      rec.orientation = last_[i] ? *last_[i] : Mat3::Identity();
    }
  }
}

std::vector<SkeletonFrame> read_skeleton_stream(std::istream& in, const JointLayout& layout) {
  std::vector<SkeletonFrame> frames;
  OrientationFiller filler;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view t = trim(line);
    if (t.empty()) continue;
    if (t == "END") break;
    try {
      SkeletonFrame frame = parse_frame(t, layout);
      filler.apply(frame);
      frames.push_back(std::move(frame));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return frames;
}

std::vector<SkeletonFrame> read_skeleton_file(const std::filesystem::path& path, const JointLayout& layout) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open " + path.string());
  return read_skeleton_stream(in, layout);
}

void write_skeleton_file(const std::filesystem::path& path, const std::vector<SkeletonFrame>& frames,
                         const JointLayout& layout) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::MissingFile, "cannot write " + path.string());
  for (const auto& frame : frames) out << serialize_frame(frame, layout) << '\n';
  out << "END\n";
}

std::string_view to_string(Location loc) {
  switch (loc) {
    case Location::Bathroom: return "bathroom";
    case Location::Bedroom: return "bedroom";
    case Location::Kitchen: return "kitchen";
    case Location::LivingRoom: return "living_room";
    case Location::Office: return "office";
  }
  return "office";
}

Location parse_location(std::string_view text) {
  for (Location loc : kAllLocations) {
    if (to_string(loc) == trim(text)) return loc;
  }
  throw Error(ErrorCode::MalformedInput, "unknown location '" + std::string(text) + "'");
}

void validate(const LabeledSequence& seq) {
  for (std::size_t i = 1; i < seq.frames.size(); ++i) {
    if (seq.frames[i].frame_index <= seq.frames[i - 1].frame_index) {
      throw Error(ErrorCode::MalformedInput, "frame indices must be strictly increasing");
    }
  }
  if (!seq.images.empty() && seq.images.size() != seq.frames.size()) {
    throw Error(ErrorCode::MalformedInput, "image list does not align with frames");
  }
}

SkeletonFrame mirror_frame(const SkeletonFrame& frame) {
  const Mat3 m = x_reflection();
  SkeletonFrame out;
  out.frame_index = frame.frame_index;
  for (std::size_t i = 0; i < kJointCount; ++i) {
    const auto j = static_cast<Joint>(i);
    JointRecord rec = frame.joints[i];
    rec.position.x() = -rec.position.x();
    if (rec.orientation) rec.orientation = nearest_rotation(m * *rec.orientation * m);
    out[mirror_joint(j)] = rec;
  }
  return out;
}

LabeledSequence mirror_sequence(const LabeledSequence& seq) {
  validate(seq);
  LabeledSequence out;
  out.activity = seq.activity;
  out.location = seq.location;
  out.subject = seq.subject;
  out.frames.reserve(seq.frames.size());
  for (const auto& f : seq.frames) out.frames.push_back(mirror_frame(f));
  out.images.reserve(seq.images.size());
  for (const auto& img : seq.images) {
    out.images.push_back({flip_horizontal(img.rgb), flip_horizontal(img.depth)});
  }
  return out;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open manifest " + path.string());
  std::vector<ManifestEntry> entries;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto cols = split(t, ',');
    if (header) {
      header = false;
      if (cols.size() == 4 && cols[0] == "file") continue;
    }
    if (cols.size() != 4) {
      throw Error(ErrorCode::MalformedInput, "manifest rows need file,activity,location,subject");
    }
    entries.push_back({std::string(cols[0]), std::string(cols[1]), parse_location(cols[2]),
                       std::string(cols[3])});
  }
  return entries;
}

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::MissingFile, "cannot write " + path.string());
  out << "file,activity,location,subject\n";
  for (const auto& e : entries) {
    out << e.file << ',' << e.activity << ',' << to_string(e.location) << ',' << e.subject << '\n';
  }
}

std::vector<ImageFrame> load_sequence_images(const std::filesystem::path& skeleton_file,
                                             const std::vector<SkeletonFrame>& frames) {
  std::vector<ImageFrame> images;
  const auto image_dir = skeleton_file.parent_path() / skeleton_file.stem();
  if (!std::filesystem::is_directory(image_dir)) return images;
  for (const auto& frame : frames) {
    const auto n = std::to_string(frame.frame_index);
    images.push_back({read_ppm(image_dir / ("RGB_" + n + ".ppm")), read_pgm(image_dir / ("Depth_" + n + ".pgm"))});
  }
  return images;
}

Dataset load_dataset(const std::filesystem::path& dir, const JointLayout& layout) {
  Dataset data;
  for (const auto& entry : read_manifest(dir / "manifest.csv")) {
    LabeledSequence seq;
    const auto file = dir / entry.file;
    seq.frames = read_skeleton_file(file, layout);
    seq.activity = entry.activity;
    seq.location = entry.location;
    seq.subject = entry.subject;
    seq.images = load_sequence_images(file, seq.frames);
    validate(seq);
    data.push_back(std::move(seq));
  }
  return data;
}

void save_dataset(const std::filesystem::path& dir, const Dataset& data, const JointLayout& layout) {
  std::filesystem::create_directories(dir);
  std::vector<ManifestEntry> entries;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& seq = data[i];
    std::string stem = seq.subject + "_" + seq.activity + "_" + std::to_string(i);
    std::replace_if(stem.begin(), stem.end(), [](unsigned char c) { return !std::isalnum(c) && c != '_'; }, '_');
    write_skeleton_file(dir / (stem + ".txt"), seq.frames, layout);
    if (seq.has_images()) {
      const auto image_dir = dir / stem;
      std::filesystem::create_directories(image_dir);
      for (std::size_t k = 0; k < seq.frames.size(); ++k) {
        const auto n = std::to_string(seq.frames[k].frame_index);
        write_ppm(image_dir / ("RGB_" + n + ".ppm"), seq.images[k].rgb);
        write_pgm(image_dir / ("Depth_" + n + ".pgm"), seq.images[k].depth);
      }
    }
    entries.push_back({stem + ".txt", seq.activity, seq.location, seq.subject});
  }
  write_manifest(dir / "manifest.csv", entries);
}

}  // namespace actrec
