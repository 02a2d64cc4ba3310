// Minimal two-camera example: build a fundamental matrix from calibration,
// check a correspondence against it, and triangulate the point back.

#include <cstdio>

#include "mvpose3d/mvpose3d.hpp"

namespace mv = mvpose3d;

int main() {
  // Two cameras from the synthetic ring, 144 degrees apart.
  const std::vector<mv::Camera> ring = mv::ring_cameras(5);
  const mv::Camera& left = ring[0];
  const mv::Camera& right = ring[2];

  const mv::Point3 point(350.0, -150.0, 1200.0);
  const mv::Point2 in_left = mv::project(left, point);
  const mv::Point2 in_right = mv::project(right, point);
  std::printf("3D point (%.0f, %.0f, %.0f)\n", point.x(), point.y(), point.z());
  std::printf("  camera %d sees (%.2f, %.2f)\n", left.id, in_left.x(), in_left.y());
  std::printf("  camera %d sees (%.2f, %.2f)\n", right.id, in_right.x(), in_right.y());

  // A true correspondence sits on its epipolar line, so the symmetric
  // point-to-line distance is zero up to floating-point noise.
  const mv::FundamentalMatrix f = mv::fundamental_from_cameras(left, right);
  const Eigen::Vector3d line = f.matrix * in_left.homogeneous();
  std::printf("epipolar distance in camera %d: %.3e px\n", right.id,
              mv::point_line_distance(in_right, line));

  // Triangulation recovers the point from the two pixels.
  const std::vector<std::pair<const mv::Camera*, mv::Point2>> obs = {
      {&left, in_left}, {&right, in_right}};
  const mv::Point3 back = mv::triangulate_joint(obs);
  std::printf("triangulated back to (%.3f, %.3f, %.3f), error %.3e mm\n",
              back.x(), back.y(), back.z(), (back - point).norm());
  return 0;
}
