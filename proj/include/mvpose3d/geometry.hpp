#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "mvpose3d/types.hpp"

namespace mvpose3d {

// Calibrated pinhole camera. Projects world points (mm) to pixels via
// P = K [R | t], with x_cam = R x_world + t and the camera looking along +z.
struct Camera {
  int id = -1;
  Eigen::Matrix3d intrinsics = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  int width = 0;
  int height = 0;

  Eigen::Matrix<double, 3, 4> projection() const {
    Eigen::Matrix<double, 3, 4> rt;
    rt.leftCols<3>() = rotation;
    rt.col(3) = translation;
    return intrinsics * rt;
  }

  // Optical center in world coordinates.
  Eigen::Vector3d center() const { return -rotation.transpose() * translation; }

  // Throws std::invalid_argument when the calibration is not a proper
  // pinhole camera (R orthonormal with det +1, K upper triangular with
  // positive focals).
  void validate() const {
    const double rot_err =
        (rotation.transpose() * rotation - Eigen::Matrix3d::Identity())
            .cwiseAbs()
            .maxCoeff();
    if (rot_err > 1e-9)
      throw std::invalid_argument("camera " + std::to_string(id) +
                                  ": rotation is not orthonormal");
    if (std::abs(rotation.determinant() - 1.0) > 1e-9)
      throw std::invalid_argument("camera " + std::to_string(id) +
                                  ": rotation determinant is not +1");
    if (!(intrinsics(0, 0) > 0.0) || !(intrinsics(1, 1) > 0.0) ||
        !(intrinsics(2, 2) > 0.0))
      throw std::invalid_argument("camera " + std::to_string(id) +
                                  ": intrinsics diagonal must be positive");
    const double k_scale = intrinsics.cwiseAbs().maxCoeff();
    if (std::abs(intrinsics(1, 0)) > 1e-9 * k_scale ||
        std::abs(intrinsics(2, 0)) > 1e-9 * k_scale ||
        std::abs(intrinsics(2, 1)) > 1e-9 * k_scale)
      throw std::invalid_argument("camera " + std::to_string(id) +
                                  ": intrinsics must be upper triangular");
    if (width < 1 || height < 1)
      throw std::invalid_argument("camera " + std::to_string(id) +
                                  ": image size must be positive");
  }
};

// Directed fundamental matrix: for a point p in `from_camera`, matrix * p~ is
// its epipolar line in `to_camera`, and q~' * matrix * p~ = 0 for any true
// correspondence (p, q). Stored with unit Frobenius norm and canonical sign.
struct FundamentalMatrix {
  Eigen::Matrix3d matrix = Eigen::Matrix3d::Zero();
  int from_camera = -1;
  int to_camera = -1;
};

inline Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d s;
  s << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return s;
}

namespace detail {

inline void canonicalize(Eigen::Matrix3d& f) {
  f /= f.norm();
  // Largest-magnitude entry made positive so equal geometries compare equal.
  int r = 0, c = 0;
  f.cwiseAbs().maxCoeff(&r, &c);
  if (f(r, c) < 0) f = -f;
}

}  // namespace detail

// F such that p_j~' F p_i~ = 0, built from the projection matrices as
// F = [e']x P_j P_i^+ with e' = P_j C_i (HZ 9.2.2). Works for any pair of
// calibrated cameras with distinct optical centers.
inline FundamentalMatrix fundamental_from_cameras(const Camera& cam_i,
                                                  const Camera& cam_j) {
  const Eigen::Vector3d ci = cam_i.center();
  const Eigen::Vector3d cj = cam_j.center();
  if ((ci - cj).norm() < 1e-6)
    throw CoincidentCameras("cameras " + std::to_string(cam_i.id) + " and " +
                            std::to_string(cam_j.id) +
                            " share an optical center");

  // Raw projection matrices mix pixel-scale and scene-scale entries badly
  // enough for the product chain below to lose six digits. Working in
  // normalized camera coordinates, with the world recentered between the two
  // cameras and rescaled by their separation, keeps every intermediate near
  // unit scale; the result is mapped back at the end.
  const Eigen::Vector3d mid = 0.5 * (ci + cj);
  const double scale = 0.5 * (ci - cj).norm();
  Eigen::Matrix4d world = Eigen::Matrix4d::Identity();
  world.topLeftCorner<3, 3>() *= scale;
  world.topRightCorner<3, 1>() = mid;

  const Eigen::Matrix3d ki_inv = cam_i.intrinsics.inverse();
  const Eigen::Matrix3d kj_inv = cam_j.intrinsics.inverse();
  const Eigen::Matrix<double, 3, 4> pi = ki_inv * cam_i.projection() * world;
  const Eigen::Matrix<double, 3, 4> pj = kj_inv * cam_j.projection() * world;
  const Eigen::Matrix<double, 4, 3> pi_pinv =
      pi.transpose() * (pi * pi.transpose()).inverse();
  const Eigen::Vector3d center_i = (ci - mid) / scale;
  const Eigen::Vector3d epipole = pj * center_i.homogeneous();

  FundamentalMatrix f;
  f.matrix = kj_inv.transpose() * (skew(epipole) * (pj * pi_pinv)) * ki_inv;
  detail::canonicalize(f.matrix);
  f.from_camera = cam_i.id;
  f.to_camera = cam_j.id;
  return f;
}

// Pinhole projection. Throws BehindCamera for points at or behind the
// camera plane.
inline Point2 project(const Camera& cam, const Point3& p) {
  const Eigen::Vector3d x = cam.rotation * p + cam.translation;
  if (x.z() <= 1e-9)
    throw BehindCamera("point has non-positive depth in camera " +
                       std::to_string(cam.id));
  const Eigen::Vector3d uvw = cam.intrinsics * x;
  return Point2(uvw.x() / uvw.z(), uvw.y() / uvw.z());
}

// Perpendicular distance from a pixel to a 2D line (a, b, c) with
// a*x + b*y + c = 0. Returns kForbidden when the line direction vanishes
// (the point maps to the epipole).
inline double point_line_distance(const Point2& p, const Eigen::Vector3d& line) {
  const double n = std::hypot(line.x(), line.y());
  if (n < 1e-12) return kForbidden;
  return std::abs(line.dot(p.homogeneous())) / n;
}

enum class EpipolarMode {
  // Perpendicular pixel distance between each point and the partner's
  // epipolar line. Thresholds are in pixels.
  kGeometric,
  // Raw bilinear forms |p_j' F p_i| + |p_i' F' p_j| on unit-norm matrices.
  kAlgebraic,
};

// Symmetric two-view joint distance: d(p_j, F_ij p_i) + d(p_i, F_ji p_j).
inline double epipolar_joint_distance(const Point2& p_i, const Point2& p_j,
                                      const FundamentalMatrix& f_ij,
                                      const FundamentalMatrix& f_ji,
                                      EpipolarMode mode = EpipolarMode::kGeometric) {
  const Eigen::Vector3d line_j = f_ij.matrix * p_i.homogeneous();
  const Eigen::Vector3d line_i = f_ji.matrix * p_j.homogeneous();
  if (mode == EpipolarMode::kAlgebraic)
    return std::abs(line_j.dot(p_j.homogeneous())) +
           std::abs(line_i.dot(p_i.homogeneous()));
  const double dj = point_line_distance(p_j, line_j);
  const double di = point_line_distance(p_i, line_i);
  if (is_forbidden(dj) || is_forbidden(di)) return kForbidden;
  return dj + di;
}

// N-view linear triangulation (DLT, HZ 12.2) with image-size conditioning.
// Throws InsufficientViews (< 2 observations) or DegenerateGeometry (rays
// parallel or nullspace not one-dimensional).
inline Point3 triangulate_joint(
    const std::vector<std::pair<const Camera*, Point2>>& observations) {
  if (observations.size() < 2)
    throw InsufficientViews("triangulation needs at least 2 observations, got " +
                            std::to_string(observations.size()));

  Eigen::MatrixXd design(2 * observations.size(), 4);
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const Camera& cam = *observations[i].first;
    // Map pixels to roughly [-1, 1] so the stacked system is well scaled.
    Eigen::Matrix3d cond = Eigen::Matrix3d::Identity();
    cond(0, 0) = 2.0 / cam.width;
    cond(1, 1) = 2.0 / cam.height;
    cond(0, 2) = -1.0;
    cond(1, 2) = -1.0;
    const Eigen::Matrix<double, 3, 4> p = cond * cam.projection();
    const Eigen::Vector3d x = cond * observations[i].second.homogeneous();
    design.row(2 * i + 0) = x.x() * p.row(2) - x.z() * p.row(0);
    design.row(2 * i + 1) = x.y() * p.row(2) - x.z() * p.row(1);
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  // A one-dimensional nullspace needs the third singular value to stay well
  // away from zero; identical or near-parallel rays collapse it.
  if (sv(2) < 1e-8 * sv(0))
    throw DegenerateGeometry("triangulation system is rank deficient");
  const Eigen::Vector4d h = svd.matrixV().col(3);
  if (std::abs(h(3)) * 1e9 < h.head<3>().norm())
    throw DegenerateGeometry("triangulated point is at infinity");
  return h.head<3>() / h(3);
}

}  // namespace mvpose3d
