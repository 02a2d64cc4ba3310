#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "mvpose3d/geometry.hpp"
#include "mvpose3d/skeleton.hpp"
#include "mvpose3d/types.hpp"

namespace mvpose3d {

enum class MotionModel { kStatic, kLinearWalk, kSinusoidalLimbs };

inline const char* motion_model_name(MotionModel m) {
  switch (m) {
    case MotionModel::kStatic: return "static";
    case MotionModel::kLinearWalk: return "linear_walk";
    case MotionModel::kSinusoidalLimbs: return "sinusoidal_limbs";
  }
  return "static";
}

inline MotionModel motion_model_from_name(const std::string& name) {
  if (name == "static") return MotionModel::kStatic;
  if (name == "linear_walk") return MotionModel::kLinearWalk;
  if (name == "sinusoidal_limbs") return MotionModel::kSinusoidalLimbs;
  throw ConfigError("unknown motion model: " + name);
}

struct SceneSpec {
  int n_people = 2;
  int n_cameras = 5;
  int n_frames = 30;
  MotionModel motion = MotionModel::kLinearWalk;
  double pixel_noise_sigma = 0.0;
  double joint_dropout_prob = 0.0;
  // Probability that a camera loses a person's knees and ankles entirely,
  // drawn once per person and camera per frame.
  double truncation_prob = 0.0;
  // Probability that a detection swaps its left and right joints, drawn per
  // pose. flip_camera selects which camera index is affected (-1 = all).
  double left_right_flip_prob = 0.0;
  int flip_camera = -1;
  // -1 gives every person a random heading; a camera index turns everyone
  // toward that camera, which maximizes the image displacement of a
  // left/right flip seen from it.
  int face_camera = -1;
  std::uint64_t rng_seed = 1;

  void validate() const {
    if (n_people < 1) throw ConfigError("n_people must be >= 1");
    if (n_cameras < 1) throw ConfigError("n_cameras must be >= 1");
    if (n_frames < 1) throw ConfigError("n_frames must be >= 1");
    auto prob = [](double p, const char* name) {
      if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(name) + " must be in [0, 1]");
    };
    if (!(pixel_noise_sigma >= 0.0)) throw ConfigError("pixel_noise_sigma must be >= 0");
    prob(joint_dropout_prob, "joint_dropout_prob");
    prob(truncation_prob, "truncation_prob");
    prob(left_right_flip_prob, "left_right_flip_prob");
    if (flip_camera < -1 || flip_camera >= n_cameras)
      throw ConfigError("flip_camera must be -1 or a camera index");
    if (face_camera < -1 || face_camera >= n_cameras)
      throw ConfigError("face_camera must be -1 or a camera index");
  }
};

// A generated scene: ground truth plus the noisy 2D detections derived from
// it. labels[frame][camera][k] is the person index behind
// detections[frame][camera][k]; it exists for checking results against the
// ground truth and is never an input to the pipeline.
struct Scene {
  SkeletonDef skeleton;
  std::vector<Camera> cameras;
  std::vector<Track> gt_tracks;
  std::vector<std::vector<std::vector<Pose2D>>> detections;
  std::vector<std::vector<std::vector<int>>> labels;
};

// Cameras on a ring around the working volume, all aimed at a point above
// the ground-plane center. VGA-sized pinhole intrinsics.
inline std::vector<Camera> ring_cameras(int n, double radius_mm = 5000.0,
                                        double height_mm = 2500.0,
                                        const Point3& look_at = Point3(0.0, 0.0, 1000.0)) {
  std::vector<Camera> cameras;
  cameras.reserve(n);
  const Eigen::Vector3d up(0.0, 0.0, 1.0);
  for (int k = 0; k < n; ++k) {
    const double angle = 2.0 * M_PI * k / n;
    const Eigen::Vector3d center(radius_mm * std::cos(angle), radius_mm * std::sin(angle),
                                 height_mm);
    const Eigen::Vector3d forward = (look_at - center).normalized();
    const Eigen::Vector3d right = forward.cross(up).normalized();
    const Eigen::Vector3d down = forward.cross(right);

    Camera cam;
    cam.id = k;
    cam.rotation.row(0) = right;
    cam.rotation.row(1) = down;
    cam.rotation.row(2) = forward;
    cam.translation = -cam.rotation * center;
    cam.intrinsics << 550.0, 0.0, 320.0, 0.0, 550.0, 240.0, 0.0, 0.0, 1.0;
    cam.width = 640;
    cam.height = 480;
    cam.validate();
    cameras.push_back(cam);
  }
  return cameras;
}

namespace detail {

// Stick-figure template in body-local millimeters: x to the person's left,
// y forward, z up, origin on the ground between the feet. Joint order
// follows default_skeleton().
inline std::vector<Point3> body_template() {
  return {
      {0.0, 0.0, 1750.0},     // head_top
      {0.0, 0.0, 1500.0},     // neck
      {-180.0, 0.0, 1450.0},  // r_shoulder
      {-260.0, 0.0, 1175.0},  // r_elbow
      {-330.0, 0.0, 900.0},   // r_wrist
      {180.0, 0.0, 1450.0},   // l_shoulder
      {260.0, 0.0, 1175.0},   // l_elbow
      {330.0, 0.0, 900.0},    // l_wrist
      {-100.0, 0.0, 1000.0},  // r_hip
      {-110.0, 0.0, 500.0},   // r_knee
      {-120.0, 0.0, 60.0},    // r_ankle
      {100.0, 0.0, 1000.0},   // l_hip
      {110.0, 0.0, 500.0},    // l_knee
      {120.0, 0.0, 60.0},     // l_ankle
  };
}

struct PersonState {
  Point2 position = Point2::Zero();  // ground-plane placement
  double heading = 0.0;              // body yaw, radians
  double phase = 0.0;                // limb-swing phase offset
};

// Forward/backward limb swing in the local frame. Amplitudes and rate keep
// every joint's per-frame displacement well under typical tracking gates.
inline void apply_limb_swing(std::vector<Point3>& joints, double s) {
  joints[3].y() += 60.0 * s;    // r_elbow
  joints[4].y() += 140.0 * s;   // r_wrist
  joints[6].y() -= 60.0 * s;    // l_elbow
  joints[7].y() -= 140.0 * s;   // l_wrist
  joints[9].y() -= 70.0 * s;    // r_knee
  joints[10].y() -= 130.0 * s;  // r_ankle
  joints[12].y() += 70.0 * s;   // l_knee
  joints[13].y() += 130.0 * s;  // l_ankle
}

}  // namespace detail

// Builds the full scene deterministically from the spec's seed: identical
// spec, identical output (within one standard library build). People are
// placed on a jittered grid with separation of at least three quarters of a
// grid cell; in the walking model everyone shares one direction, so pairwise
// distances never change.
inline Scene generate_scene(const SceneSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Scene scene;
  scene.skeleton = default_skeleton();
  scene.cameras = ring_cameras(spec.n_cameras);
  const std::size_t n_joints = scene.skeleton.n_joints();
  const auto body = detail::body_template();

  // Placement grid over a square of extent +/-1200 mm around the origin.
  const int grid = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(spec.n_people))));
  const double cell = 2400.0 / grid;
  std::vector<int> cells(grid * grid);
  std::iota(cells.begin(), cells.end(), 0);
  std::shuffle(cells.begin(), cells.end(), rng);

  std::vector<detail::PersonState> people(spec.n_people);
  for (int p = 0; p < spec.n_people; ++p) {
    const int row = cells[p] / grid;
    const int col = cells[p] % grid;
    const double jitter = cell / 8.0;
    people[p].position =
        Point2(-1200.0 + cell * (col + 0.5) + (2.0 * unit(rng) - 1.0) * jitter,
               -1200.0 + cell * (row + 0.5) + (2.0 * unit(rng) - 1.0) * jitter);
    people[p].heading = angle(rng);
    people[p].phase = angle(rng);
    if (spec.face_camera >= 0) {
      // Forward in world is (-sin h, cos h); point it at the camera.
      const Eigen::Vector3d cam_pos = scene.cameras[spec.face_camera].center();
      const Point2 to_cam = Point2(cam_pos.x(), cam_pos.y()) - people[p].position;
      people[p].heading = std::atan2(-to_cam.x(), to_cam.y());
    }
  }

  // One shared walking direction; speed capped so nobody leaves the volume.
  const double walk_angle = angle(rng);
  const Point2 walk_dir(std::cos(walk_angle), std::sin(walk_angle));
  const double walk_speed =
      std::min(25.0, 700.0 / std::max(1, spec.n_frames - 1));
  const double swing_rate = 2.0 * M_PI / 20.0;

  scene.gt_tracks.resize(spec.n_people);
  for (int p = 0; p < spec.n_people; ++p) scene.gt_tracks[p].id = p;
  scene.detections.resize(spec.n_frames);
  scene.labels.resize(spec.n_frames);

  for (int f = 0; f < spec.n_frames; ++f) {
    // Ground truth for this frame.
    std::vector<Pose3D> world_poses(spec.n_people, Pose3D(n_joints));
    for (int p = 0; p < spec.n_people; ++p) {
      auto joints = body;
      if (spec.motion == MotionModel::kSinusoidalLimbs)
        detail::apply_limb_swing(joints, std::sin(swing_rate * f + people[p].phase));

      Point2 pos = people[p].position;
      if (spec.motion == MotionModel::kLinearWalk) pos += walk_speed * f * walk_dir;

      const double c = std::cos(people[p].heading);
      const double s = std::sin(people[p].heading);
      for (std::size_t j = 0; j < n_joints; ++j) {
        const Point3& local = joints[j];
        world_poses[p].joints[j] = Point3(c * local.x() - s * local.y() + pos.x(),
                                          s * local.x() + c * local.y() + pos.y(), local.z());
      }
      scene.gt_tracks[p].poses.emplace(f, world_poses[p]);
      scene.gt_tracks[p].last_active = f;
    }

    // Detections per camera. Random draws happen in a fixed order for every
    // joint regardless of visibility so the stream stays aligned.
    scene.detections[f].resize(spec.n_cameras);
    scene.labels[f].resize(spec.n_cameras);
    for (int c = 0; c < spec.n_cameras; ++c) {
      const Camera& cam = scene.cameras[c];
      const Eigen::Matrix<double, 3, 4> P = cam.projection();
      std::vector<Pose2D> dets;
      std::vector<int> labels;

      for (int p = 0; p < spec.n_people; ++p) {
        const bool truncated = unit(rng) < spec.truncation_prob;
        const double flip_draw = unit(rng);
        const bool flipped = (spec.flip_camera == -1 || spec.flip_camera == c) &&
                             flip_draw < spec.left_right_flip_prob;

        Pose2D det;
        det.camera_id = cam.id;
        det.joints.resize(n_joints);
        for (std::size_t j = 0; j < n_joints; ++j) {
          const Eigen::Vector4d xh =
              (*world_poses[p].joints[j]).homogeneous();
          const Eigen::Vector3d img = P * xh;
          if (img.z() > 1e-9) {
            const double u = img.x() / img.z();
            const double v = img.y() / img.z();
            if (u >= 0.0 && u < cam.width && v >= 0.0 && v < cam.height)
              det.joints[j] = Joint2D{Point2(u, v), 1.0};
          }
        }
        if (truncated)
          for (int j : {9, 10, 12, 13}) det.joints[j].reset();
        if (flipped)
          for (const auto& [a, b] : scene.skeleton.mirror_pairs)
            std::swap(det.joints[a], det.joints[b]);
        for (std::size_t j = 0; j < n_joints; ++j) {
          const double drop = unit(rng);
          const double nx = gauss(rng);
          const double ny = gauss(rng);
          if (!det.joints[j]) continue;
          if (spec.joint_dropout_prob > 0.0 && drop < spec.joint_dropout_prob) {
            det.joints[j].reset();
            continue;
          }
          det.joints[j]->p.x() += spec.pixel_noise_sigma * nx;
          det.joints[j]->p.y() += spec.pixel_noise_sigma * ny;
        }

        if (det.present_count() > 0) {
          dets.push_back(std::move(det));
          labels.push_back(p);
        }
      }

      // Shuffle so downstream code cannot lean on detection order.
      std::vector<std::size_t> order(dets.size());
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
      auto& out_dets = scene.detections[f][c];
      auto& out_labels = scene.labels[f][c];
      for (std::size_t i = 0; i < order.size(); ++i) {
        out_dets.push_back(std::move(dets[order[i]]));
        out_dets.back().index_in_camera = static_cast<int>(i);
        out_labels.push_back(labels[order[i]]);
      }
    }
  }
  return scene;
}

}  // namespace mvpose3d
