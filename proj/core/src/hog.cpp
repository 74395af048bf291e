#include "actrec/hog.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "actrec/error.hpp"

namespace actrec {

namespace {

constexpr double kNormEpsilon = 1e-6;
constexpr double kBoxPadding = 0.2;
constexpr double kMinProjectedExtent = 2.0 * kMinBoxSide;
constexpr double kBinWidthDeg = 180.0 / kHogBins;

BoundingBox clamp_box(BoundingBox box, int width, int height) {
  box.x0 = std::clamp(box.x0, 0, width);
  box.x1 = std::clamp(box.x1, 0, width);
  box.y0 = std::clamp(box.y0, 0, height);
  box.y1 = std::clamp(box.y1, 0, height);
  return box;
}

bool usable(const BoundingBox& box) { return box.width() >= kMinBoxSide && box.height() >= kMinBoxSide; }

// Weight of the first of two cells for a normalised coordinate p in (0,1);
// cell centres sit at 0.25 and 0.75.
double first_cell_weight(double p) { return std::clamp((0.75 - p) / 0.5, 0.0, 1.0); }

std::vector<Vec3> member_positions(const SkeletonFrame& frame, std::initializer_list<Joint> joints) {
  std::vector<Vec3> out;
  for (Joint j : joints) out.push_back(frame.position(j));
  return out;
}

}  // namespace

Eigen::Vector2d project(const Vec3& point, const CameraIntrinsics& k) {
  if (!(point.z() > 0.0)) {
    std::ostringstream msg;
    msg << "point at z = " << point.z() << " mm cannot be projected";
    throw Error(ErrorCode::JointBehindCamera, msg.str());
  }
  return {k.fx * point.x() / point.z() + k.cx, k.fy * point.y() / point.z() + k.cy};
}

BoundingBox projected_box(const std::vector<Vec3>& points, const CameraIntrinsics& k) {
  double umin = std::numeric_limits<double>::infinity(), vmin = umin;
  double umax = -umin, vmax = -umin;
  for (const auto& p : points) {
    const auto uv = project(p, k);
    umin = std::min(umin, uv.x());
    umax = std::max(umax, uv.x());
    vmin = std::min(vmin, uv.y());
    vmax = std::max(vmax, uv.y());
  }
  auto pad = [](double& lo, double& hi) {
    const double extent = hi - lo;
    lo -= kBoxPadding * extent;
    hi += kBoxPadding * extent;
    if (hi - lo < kMinProjectedExtent) {
      const double mid = 0.5 * (lo + hi);
      lo = mid - 0.5 * kMinProjectedExtent;
      hi = mid + 0.5 * kMinProjectedExtent;
    }
  };
  pad(umin, umax);
  pad(vmin, vmax);
  // Pixels whose centre lies inside the padded interval.
  const auto to_int = [](double v) { return static_cast<int>(std::clamp(v, -1e6, 1e6)); };
  BoundingBox box{to_int(std::ceil(umin)), to_int(std::ceil(vmin)), to_int(std::floor(umax)) + 1,
                  to_int(std::floor(vmax)) + 1};
  return clamp_box(box, k.width, k.height);
}

HogBlock hog_descriptor(const GrayGrid& grid, const BoundingBox& requested) {
  const BoundingBox box = clamp_box(requested, grid.width, grid.height);
  if (!usable(box)) {
    std::ostringstream msg;
    msg << "box [" << requested.x0 << "," << requested.x1 << ")x[" << requested.y0 << "," << requested.y1
        << ") is smaller than " << kMinBoxSide << " px inside a " << grid.width << "x" << grid.height << " grid";
    throw Error(ErrorCode::DegenerateBox, msg.str());
  }

  HogBlock hist{};
  const auto value = [&](int x, int y) {
    return grid.at(std::clamp(x, 0, grid.width - 1), std::clamp(y, 0, grid.height - 1));
  };
  const double w = box.width();
  const double h = box.height();
  for (int y = box.y0; y < box.y1; ++y) {
    const double wy0 = first_cell_weight((y - box.y0 + 0.5) / h);
    for (int x = box.x0; x < box.x1; ++x) {
      const double gx = 0.5 * (value(x + 1, y) - value(x - 1, y));
      const double gy = 0.5 * (value(x, y + 1) - value(x, y - 1));
      const double mag = std::hypot(gx, gy);
      if (mag == 0.0) continue;

      double theta = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
      theta = std::fmod(theta + 180.0, 180.0);
      const double pos = theta / kBinWidthDeg;
      const int b0 = static_cast<int>(std::floor(pos)) % kHogBins;
      const int b1 = (b0 + 1) % kHogBins;
      const double fb = pos - std::floor(pos);

      const double wx0 = first_cell_weight((x - box.x0 + 0.5) / w);
      const double wy[2] = {wy0, 1.0 - wy0};
      const double wx[2] = {wx0, 1.0 - wx0};
      for (int cy = 0; cy < kHogCells; ++cy) {
        for (int cx = 0; cx < kHogCells; ++cx) {
          const double v = mag * wy[cy] * wx[cx];
          if (v == 0.0) continue;
          const std::size_t base = static_cast<std::size_t>(cy * kHogCells + cx) * kHogBins;
          hist[base + b0] += v * (1.0 - fb);
          hist[base + b1] += v * fb;
        }
      }
    }
  }

  double norm = 0.0;
  for (double v : hist) norm += v * v;
  norm = std::sqrt(norm);
  if (norm <= kNormEpsilon) {
    hist.fill(0.0);
  } else {
    for (double& v : hist) v /= norm;
  }
  return hist;
}

std::array<BoundingBox, 4> skeletal_bboxes(const SkeletonFrame& frame, const CameraIntrinsics& k) {
  return {
      projected_box(member_positions(frame, {Joint::Head, Joint::Neck}), k),
      projected_box(member_positions(frame, {Joint::Neck, Joint::Torso, Joint::LeftShoulder, Joint::RightShoulder,
                                             Joint::LeftHip, Joint::RightHip}),
                    k),
      projected_box(member_positions(frame, {Joint::LeftShoulder, Joint::LeftElbow, Joint::LeftHand}), k),
      projected_box(member_positions(frame, {Joint::RightShoulder, Joint::RightElbow, Joint::RightHand}), k),
  };
}

BoundingBox person_bbox(const SkeletonFrame& frame, const CameraIntrinsics& k) {
  std::vector<Vec3> all;
  for (const auto& j : frame.joints) all.push_back(j.position);
  return projected_box(all, k);
}

std::array<double, 2 * kHogDim> simple_hog(const GrayGrid& rgb, const GrayGrid& depth, const BoundingBox& person_box) {
  std::array<double, 2 * kHogDim> out{};
  const HogBlock a = hog_descriptor(rgb, person_box);
  const HogBlock b = hog_descriptor(depth, person_box);
  std::copy(a.begin(), a.end(), out.begin());
  std::copy(b.begin(), b.end(), out.begin() + kHogDim);
  return out;
}

std::array<double, 8 * kHogDim> skeletal_hog(const GrayGrid& rgb, const GrayGrid& depth, const SkeletonFrame& frame,
                                             const CameraIntrinsics& k) {
  std::array<double, 8 * kHogDim> out{};
  const auto boxes = skeletal_bboxes(frame, k);
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (!usable(clamp_box(boxes[i], rgb.width, rgb.height)) || !usable(clamp_box(boxes[i], depth.width, depth.height))) {
      continue;
    }
    const HogBlock a = hog_descriptor(rgb, boxes[i]);
    const HogBlock b = hog_descriptor(depth, boxes[i]);
    std::copy(a.begin(), a.end(), out.begin() + (2 * i) * kHogDim);
    std::copy(b.begin(), b.end(), out.begin() + (2 * i + 1) * kHogDim);
  }
  return out;
}

}  // namespace actrec
