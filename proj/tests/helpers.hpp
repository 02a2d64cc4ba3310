#pragma once

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "mvpose3d/mvpose3d.hpp"

namespace testutil {

// Temporary directory removed on scope exit.
class TempDir {
 public:
  TempDir() {
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path();
    std::mt19937_64 rng(std::random_device{}());
    for (int i = 0; i < 64; ++i) {
      fs::path candidate = base / ("mvpose3d_test_" + std::to_string(rng()));
      std::error_code ec;
      if (fs::create_directory(candidate, ec)) {
        path_ = candidate;
        return;
      }
    }
    throw std::runtime_error("could not create a temporary directory");
  }

  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }

  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

// Two-camera rig with a sideways baseline, both looking along +z.
inline std::vector<mvpose3d::Camera> stereo_rig(double baseline_mm,
                                                double focal = 550.0) {
  mvpose3d::Camera a;
  a.id = 0;
  a.intrinsics << focal, 0, 320, 0, focal, 240, 0, 0, 1;
  a.width = 640;
  a.height = 480;

  mvpose3d::Camera b = a;
  b.id = 1;
  b.translation = Eigen::Vector3d(-baseline_mm, 0.0, 0.0);  // center at +x
  return {a, b};
}

// Full-joint 2D pose from explicit pixel coordinates.
inline mvpose3d::Pose2D make_pose2d(int camera_id,
                                    const std::vector<mvpose3d::Point2>& pts) {
  mvpose3d::Pose2D p;
  p.camera_id = camera_id;
  for (const auto& pt : pts) p.joints.push_back(mvpose3d::Joint2D{pt, 1.0});
  return p;
}

// 3D pose where every joint is present.
inline mvpose3d::Pose3D make_pose3d(const std::vector<mvpose3d::Point3>& pts) {
  mvpose3d::Pose3D p(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) p.joints[i] = pts[i];
  return p;
}

// Pose3D with all joints sitting at one point; handy for tracking tests
// where only the centroid matters.
inline mvpose3d::Pose3D point_pose(const mvpose3d::Point3& at, int n_joints = 14) {
  mvpose3d::Pose3D p(n_joints);
  for (int i = 0; i < n_joints; ++i) p.joints[i] = at;
  return p;
}

// Ground-truth grouping of one frame's detections: for each person index,
// the set of (camera, detection index) pairs, keeping only people seen by
// at least two cameras (others cannot survive association).
inline std::vector<std::vector<std::pair<int, int>>> expected_groups(
    const mvpose3d::Scene& scene, int frame) {
  int n_people = 0;
  for (const auto& cam_labels : scene.labels[frame])
    for (int person : cam_labels) n_people = std::max(n_people, person + 1);

  std::vector<std::vector<std::pair<int, int>>> groups(n_people);
  for (std::size_t c = 0; c < scene.labels[frame].size(); ++c)
    for (std::size_t k = 0; k < scene.labels[frame][c].size(); ++k)
      groups[scene.labels[frame][c][k]].push_back(
          {scene.cameras[c].id, scene.detections[frame][c][k].index_in_camera});

  std::vector<std::vector<std::pair<int, int>>> kept;
  for (auto& g : groups) {
    if (g.size() < 2) continue;
    std::sort(g.begin(), g.end());
    kept.push_back(std::move(g));
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

// The same normal form for an association result.
inline std::vector<std::vector<std::pair<int, int>>> hypothesis_groups(
    const std::vector<mvpose3d::PersonHypothesis>& hyps) {
  std::vector<std::vector<std::pair<int, int>>> groups;
  for (const auto& h : hyps) {
    std::vector<std::pair<int, int>> g;
    for (const auto& m : h.members) g.push_back({m.camera_id, m.index_in_camera});
    std::sort(g.begin(), g.end());
    groups.push_back(std::move(g));
  }
  std::sort(groups.begin(), groups.end());
  return groups;
}

}  // namespace testutil
