#pragma once

#include <array>

#include <Eigen/Core>

#include "actrec/image.hpp"
#include "actrec/skeleton.hpp"

namespace actrec {

inline constexpr int kHogCells = 2;
inline constexpr int kHogBins = 8;
inline constexpr std::size_t kHogDim = kHogCells * kHogCells * kHogBins;  // 32
inline constexpr int kMinBoxSide = 4;

using HogBlock = std::array<double, kHogDim>;

/// Pixel box, half-open: [x0, x1) x [y0, y1).
struct BoundingBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  bool contains(double u, double v) const { return u >= x0 && u < x1 && v >= y0 && v < y1; }
};

struct CameraIntrinsics {
  double fx = 575.0;
  double fy = 575.0;
  double cx = 320.0;
  double cy = 240.0;
  int width = 640;
  int height = 480;
};

/// Pinhole projection u = fx x / z + cx, v = fy y / z + cy.
/// Throws JointBehindCamera for z <= 0.
Eigen::Vector2d project(const Vec3& point, const CameraIntrinsics& intrinsics);

/// Smallest pixel box covering the projected points, padded by 20% of its
/// extent on every side and clamped to the image.
BoundingBox projected_box(const std::vector<Vec3>& points, const CameraIntrinsics& intrinsics);

/// 2x2 cells x 8 unsigned orientation bins centred at b * 22.5 degrees, with
/// bilinear votes in space and orientation, then L2 normalisation.
/// Layout: cell-major (row, then column), bin-minor.
/// Throws DegenerateBox when the box lies outside the grid or a side is < 4 px.
HogBlock hog_descriptor(const GrayGrid& grid, const BoundingBox& box);

enum class BodyPart { Head, Torso, LeftArm, RightArm };

/// Head, torso, left arm and right arm boxes, in that order.
std::array<BoundingBox, 4> skeletal_bboxes(const SkeletonFrame& frame, const CameraIntrinsics& intrinsics);

/// Box around all fifteen joints.
BoundingBox person_bbox(const SkeletonFrame& frame, const CameraIntrinsics& intrinsics);

/// RGB block then depth block.
std::array<double, 2 * kHogDim> simple_hog(const GrayGrid& rgb, const GrayGrid& depth, const BoundingBox& person_box);

/// Per box (head, torso, left arm, right arm): RGB block then depth block.
/// A box that collapses below the minimum side after clamping contributes zeros.
std::array<double, 8 * kHogDim> skeletal_hog(const GrayGrid& rgb, const GrayGrid& depth,
                                             const SkeletonFrame& frame, const CameraIntrinsics& intrinsics);

}  // namespace actrec
