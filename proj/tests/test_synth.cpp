#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "helpers.hpp"
#include "mvpose3d/mvpose3d.hpp"

using namespace mvpose3d;

namespace {

bool scenes_equal(const Scene& a, const Scene& b) {
  if (a.labels != b.labels) return false;
  if (a.detections.size() != b.detections.size()) return false;
  for (std::size_t f = 0; f < a.detections.size(); ++f) {
    if (a.detections[f].size() != b.detections[f].size()) return false;
    for (std::size_t c = 0; c < a.detections[f].size(); ++c) {
      const auto& da = a.detections[f][c];
      const auto& db = b.detections[f][c];
      if (da.size() != db.size()) return false;
      for (std::size_t k = 0; k < da.size(); ++k) {
        if (da[k].joints.size() != db[k].joints.size()) return false;
        for (std::size_t j = 0; j < da[k].joints.size(); ++j) {
          const auto& ja = da[k].joints[j];
          const auto& jb = db[k].joints[j];
          if (ja.has_value() != jb.has_value()) return false;
          if (ja && (ja->p != jb->p || ja->confidence != jb->confidence))
            return false;
        }
      }
    }
  }
  return true;
}

}  // namespace

TEST_CASE("ring cameras form a valid inward-looking rig", "[synth]") {
  const auto cams = ring_cameras(6);
  REQUIRE(cams.size() == 6);
  for (const Camera& cam : cams) {
    REQUIRE_NOTHROW(cam.validate());
    REQUIRE(cam.width == 640);
    REQUIRE(cam.height == 480);
    // The shared fixation point sits on every optical axis.
    const Point2 center = project(cam, Point3(0.0, 0.0, 1000.0));
    REQUIRE(center.x() == Catch::Approx(320.0).margin(1e-6));
    REQUIRE(center.y() == Catch::Approx(240.0).margin(1e-6));
  }
  std::set<int> ids;
  for (const Camera& cam : cams) REQUIRE(ids.insert(cam.id).second);
}

TEST_CASE("noise-free detections reproject the ground truth exactly",
          "[synth]") {
  SceneSpec spec;
  spec.n_people = 3;
  spec.n_cameras = 4;
  spec.n_frames = 5;
  spec.motion = MotionModel::kSinusoidalLimbs;
  spec.rng_seed = 2;
  const Scene scene = generate_scene(spec);

  for (int f = 0; f < spec.n_frames; ++f)
    for (int c = 0; c < spec.n_cameras; ++c)
      for (std::size_t k = 0; k < scene.detections[f][c].size(); ++k) {
        const Pose2D& det = scene.detections[f][c][k];
        const int person = scene.labels[f][c][k];
        const Pose3D& gt = scene.gt_tracks[person].poses.at(f);
        for (std::size_t j = 0; j < det.joints.size(); ++j) {
          if (!det.joints[j]) continue;
          const Point2 expected = project(scene.cameras[c], *gt.joints[j]);
          REQUIRE((det.joints[j]->p - expected).norm() < 1e-9);
        }
      }
}

TEST_CASE("scene generation is deterministic in the seed", "[synth]") {
  SceneSpec spec;
  spec.n_people = 3;
  spec.n_cameras = 3;
  spec.n_frames = 4;
  spec.pixel_noise_sigma = 2.0;
  spec.joint_dropout_prob = 0.1;
  spec.rng_seed = 77;

  const Scene a = generate_scene(spec);
  const Scene b = generate_scene(spec);
  REQUIRE(scenes_equal(a, b));

  spec.rng_seed = 78;
  const Scene c = generate_scene(spec);
  REQUIRE_FALSE(scenes_equal(a, c));
}

TEST_CASE("every person is seen by at least two cameras", "[synth]") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SceneSpec spec;
    spec.n_people = 4;
    spec.n_cameras = 4;
    spec.n_frames = 3;
    spec.rng_seed = seed;
    const Scene scene = generate_scene(spec);

    for (int f = 0; f < spec.n_frames; ++f) {
      std::map<int, int> views;
      for (int c = 0; c < spec.n_cameras; ++c)
        for (int person : scene.labels[f][c]) ++views[person];
      for (int p = 0; p < spec.n_people; ++p) REQUIRE(views[p] >= 2);
    }
  }
}

TEST_CASE("pixel noise is unbiased and has the requested scale", "[synth]") {
  SceneSpec spec;
  spec.n_people = 3;
  spec.n_cameras = 5;
  spec.n_frames = 30;
  spec.rng_seed = 15;

  const Scene clean = generate_scene(spec);
  spec.pixel_noise_sigma = 5.0;
  const Scene noisy = generate_scene(spec);

  // The same seed consumes the same draws, so the scenes align one-to-one.
  REQUIRE(clean.labels == noisy.labels);

  double sum_x = 0.0, sum_y = 0.0, sum_sq = 0.0;
  long n = 0;
  for (std::size_t f = 0; f < clean.detections.size(); ++f)
    for (std::size_t c = 0; c < clean.detections[f].size(); ++c)
      for (std::size_t k = 0; k < clean.detections[f][c].size(); ++k)
        for (std::size_t j = 0; j < clean.detections[f][c][k].joints.size(); ++j) {
          const auto& a = clean.detections[f][c][k].joints[j];
          const auto& b = noisy.detections[f][c][k].joints[j];
          if (!a || !b) continue;
          const Point2 d = b->p - a->p;
          sum_x += d.x();
          sum_y += d.y();
          sum_sq += d.squaredNorm();
          ++n;
        }

  REQUIRE(n > 3000);
  const double se = spec.pixel_noise_sigma / std::sqrt(static_cast<double>(n));
  REQUIRE(std::abs(sum_x / n) < 3.0 * se);
  REQUIRE(std::abs(sum_y / n) < 3.0 * se);
  // Per-axis variance estimate pooled over x and y.
  const double var = sum_sq / (2.0 * n);
  REQUIRE(std::sqrt(var) ==
          Catch::Approx(spec.pixel_noise_sigma).epsilon(0.1));
}

TEST_CASE("a forced flip swaps exactly the mirror joints in one camera",
          "[synth]") {
  SceneSpec spec;
  spec.n_people = 2;
  spec.n_cameras = 3;
  spec.n_frames = 2;
  spec.rng_seed = 21;

  const Scene plain = generate_scene(spec);
  spec.left_right_flip_prob = 1.0;
  spec.flip_camera = 0;
  const Scene flipped = generate_scene(spec);

  REQUIRE(plain.labels == flipped.labels);
  const auto& mirror = plain.skeleton.mirror_pairs;

  for (std::size_t f = 0; f < plain.detections.size(); ++f)
    for (std::size_t c = 0; c < plain.detections[f].size(); ++c)
      for (std::size_t k = 0; k < plain.detections[f][c].size(); ++k) {
        const Pose2D& a = plain.detections[f][c][k];
        const Pose2D& b = flipped.detections[f][c][k];

        std::vector<std::optional<Joint2D>> expected = a.joints;
        if (c == 0)
          for (const auto& [l, r] : mirror) std::swap(expected[l], expected[r]);

        REQUIRE(expected.size() == b.joints.size());
        for (std::size_t j = 0; j < expected.size(); ++j) {
          REQUIRE(expected[j].has_value() == b.joints[j].has_value());
          if (expected[j]) REQUIRE(expected[j]->p == b.joints[j]->p);
        }
      }
}

TEST_CASE("full truncation removes knees and ankles", "[synth]") {
  SceneSpec spec;
  spec.n_people = 2;
  spec.n_cameras = 3;
  spec.n_frames = 3;
  spec.truncation_prob = 1.0;
  spec.rng_seed = 23;
  const Scene scene = generate_scene(spec);

  const std::vector<int> lower = {9, 10, 12, 13};
  for (const auto& frame : scene.detections)
    for (const auto& cam : frame)
      for (const Pose2D& det : cam) {
        for (int j : lower) REQUIRE_FALSE(det.joints[j].has_value());
        REQUIRE(det.present_count() > 0);
      }
}

TEST_CASE("static scenes do not move and walks move linearly", "[synth]") {
  SceneSpec spec;
  spec.n_people = 2;
  spec.n_cameras = 3;
  spec.n_frames = 10;
  spec.motion = MotionModel::kStatic;
  spec.rng_seed = 25;
  const Scene still = generate_scene(spec);

  for (const Track& t : still.gt_tracks) {
    const Pose3D& first = t.poses.at(0);
    for (int f = 1; f < spec.n_frames; ++f) {
      const Pose3D& p = t.poses.at(f);
      for (std::size_t j = 0; j < p.joints.size(); ++j)
        REQUIRE((*p.joints[j] - *first.joints[j]).norm() < 1e-12);
    }
  }

  spec.motion = MotionModel::kLinearWalk;
  const Scene walk = generate_scene(spec);
  std::optional<Point3> shared_step;
  for (const Track& t : walk.gt_tracks) {
    const Point3 step = *t.poses.at(1).joints[0] - *t.poses.at(0).joints[0];
    REQUIRE(step.norm() <= 25.0 + 1e-9);
    REQUIRE(step.norm() > 0.0);
    // Constant velocity within a track, shared across people.
    for (int f = 1; f < spec.n_frames; ++f) {
      const Point3 s = *t.poses.at(f).joints[0] - *t.poses.at(f - 1).joints[0];
      REQUIRE((s - step).norm() < 1e-9);
    }
    if (shared_step)
      REQUIRE((*shared_step - step).norm() < 1e-9);
    else
      shared_step = step;
  }
}

TEST_CASE("limb swings move wrists and ankles but not the torso", "[synth]") {
  SceneSpec spec;
  spec.n_people = 1;
  spec.n_cameras = 3;
  spec.n_frames = 15;
  spec.motion = MotionModel::kSinusoidalLimbs;
  spec.rng_seed = 27;
  const Scene scene = generate_scene(spec);

  const Track& t = scene.gt_tracks[0];
  double wrist_travel = 0.0, hip_travel = 0.0;
  for (int f = 1; f < spec.n_frames; ++f) {
    wrist_travel += (*t.poses.at(f).joints[4] - *t.poses.at(f - 1).joints[4]).norm();
    hip_travel += (*t.poses.at(f).joints[8] - *t.poses.at(f - 1).joints[8]).norm();
  }
  REQUIRE(wrist_travel > 100.0);
  REQUIRE(hip_travel < 1e-9);
}

TEST_CASE("ground-truth tracks cover every frame with stable ids", "[synth]") {
  SceneSpec spec;
  spec.n_people = 3;
  spec.n_cameras = 3;
  spec.n_frames = 8;
  spec.rng_seed = 29;
  const Scene scene = generate_scene(spec);

  REQUIRE(scene.gt_tracks.size() == 3);
  for (int p = 0; p < 3; ++p) {
    REQUIRE(scene.gt_tracks[p].id == p);
    REQUIRE(scene.gt_tracks[p].poses.size() == 8);
    for (const auto& [frame, pose] : scene.gt_tracks[p].poses)
      REQUIRE(pose.present_count() == 14);
  }
}

TEST_CASE("people keep a minimum separation", "[synth]") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SceneSpec spec;
    spec.n_people = 5;
    spec.n_cameras = 3;
    spec.n_frames = 1;
    spec.motion = MotionModel::kStatic;
    spec.rng_seed = seed;
    const Scene scene = generate_scene(spec);

    for (std::size_t a = 0; a < scene.gt_tracks.size(); ++a)
      for (std::size_t b = a + 1; b < scene.gt_tracks.size(); ++b) {
        const Point3 ca = *scene.gt_tracks[a].poses.at(0).centroid();
        const Point3 cb = *scene.gt_tracks[b].poses.at(0).centroid();
        REQUIRE(std::hypot(ca.x() - cb.x(), ca.y() - cb.y()) > 500.0);
      }
  }
}

TEST_CASE("motion model names round-trip", "[synth]") {
  for (MotionModel m : {MotionModel::kStatic, MotionModel::kLinearWalk,
                        MotionModel::kSinusoidalLimbs})
    REQUIRE(motion_model_from_name(motion_model_name(m)) == m);
  REQUIRE_THROWS_AS(motion_model_from_name("sprint"), ConfigError);
}

TEST_CASE("scene spec validation", "[synth]") {
  SceneSpec spec;
  REQUIRE_NOTHROW(spec.validate());

  SECTION("people") {
    spec.n_people = 0;
    REQUIRE_THROWS_AS(spec.validate(), ConfigError);
  }
  SECTION("probability range") {
    spec.joint_dropout_prob = 1.5;
    REQUIRE_THROWS_AS(spec.validate(), ConfigError);
  }
  SECTION("negative noise") {
    spec.pixel_noise_sigma = -1.0;
    REQUIRE_THROWS_AS(spec.validate(), ConfigError);
  }
  SECTION("flip camera out of range") {
    spec.flip_camera = 5;
    REQUIRE_THROWS_AS(spec.validate(), ConfigError);
  }
  SECTION("face camera out of range") {
    spec.face_camera = -2;
    REQUIRE_THROWS_AS(spec.validate(), ConfigError);
  }
}
