#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mvpose3d {

using Point2 = Eigen::Vector2d;
using Point3 = Eigen::Vector3d;

// Cost sentinel for pairs that must never be matched.
inline constexpr double kForbidden = std::numeric_limits<double>::infinity();

inline bool is_forbidden(double c) { return !(c < kForbidden); }

// ---------------------------------------------------------------------------
// Errors. The CLI maps these onto exit codes (schema 2, geometry 3, config 4).

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CoincidentCameras : GeometryError {
  using GeometryError::GeometryError;
};

struct BehindCamera : GeometryError {
  using GeometryError::GeometryError;
};

struct InsufficientViews : GeometryError {
  using GeometryError::GeometryError;
};

struct DegenerateGeometry : GeometryError {
  using GeometryError::GeometryError;
};

struct SkeletonMismatch : SchemaError {
  using SchemaError::SchemaError;
};

// ---------------------------------------------------------------------------
// Poses and tracks.

struct Joint2D {
  Point2 p;
  double confidence = 1.0;
};

// One detected person in one camera. `joints` has one slot per skeleton
// joint; unobserved joints are empty.
struct Pose2D {
  int camera_id = -1;
  // Position within the per-camera detection list; -1 when unknown. Carried
  // for diagnostics and ground-truth bookkeeping, never used by the pipeline.
  int index_in_camera = -1;
  std::vector<std::optional<Joint2D>> joints;

  int present_count() const {
    int n = 0;
    for (const auto& j : joints) n += j.has_value() ? 1 : 0;
    return n;
  }
};

// A person in world coordinates (millimeters). `source_views[i]` is the
// number of cameras that observed joint i when the pose was triangulated;
// 0 when unknown (loaded from file or filled by smoothing).
struct Pose3D {
  std::vector<std::optional<Point3>> joints;
  std::vector<int> source_views;

  explicit Pose3D(std::size_t n_joints = 0)
      : joints(n_joints), source_views(n_joints, 0) {}

  int present_count() const {
    int n = 0;
    for (const auto& j : joints) n += j.has_value() ? 1 : 0;
    return n;
  }

  // Mean of the present joints.
  std::optional<Point3> centroid() const {
    Point3 sum = Point3::Zero();
    int n = 0;
    for (const auto& j : joints) {
      if (j) {
        sum += *j;
        ++n;
      }
    }
    if (n == 0) return std::nullopt;
    return Point3(sum / n);
  }
};

// Identity-stamped sequence of 3D poses, keyed by frame index.
struct Track {
  int id = -1;
  std::map<int, Pose3D> poses;
  int last_active = -1;

  bool empty() const { return poses.empty(); }
  int first_frame() const { return poses.begin()->first; }
  int last_frame() const { return poses.rbegin()->first; }

  const Pose3D* pose_at(int frame) const {
    auto it = poses.find(frame);
    return it == poses.end() ? nullptr : &it->second;
  }
};

}  // namespace mvpose3d
