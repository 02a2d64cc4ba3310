#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "mvpose3d/association.hpp"
#include "mvpose3d/io.hpp"
#include "mvpose3d/metrics.hpp"
#include "mvpose3d/smoothing.hpp"
#include "mvpose3d/synth.hpp"
#include "mvpose3d/tracking.hpp"

namespace mvpose3d {

// Everything one run needs. Association, tracking, and smoothing keep their
// own sub-configs; smooth toggles the smoothing stage as a whole.
struct RunConfig {
  AssociationConfig association;
  TrackingConfig tracking;
  SmoothingConfig smoothing;
  bool smooth = true;
  double alpha = 0.5;             // PCP endpoint tolerance factor
  double match_threshold = 500.0; // MOTA centroid gate, mm
  int workers = 0;                // 0 = available parallelism

  void validate(const std::vector<int>& camera_ids) const {
    association.validate(camera_ids);
    tracking.validate();
    smoothing.validate();
    if (!(alpha > 0.0)) throw ConfigError("alpha must be > 0");
    if (!(match_threshold > 0.0)) throw ConfigError("match_threshold must be > 0");
    if (workers < 0) throw ConfigError("workers must be >= 0");
  }
};

// A manifest's content loaded into memory.
struct Dataset {
  std::vector<Camera> cameras;
  SkeletonDef skeleton;
  int frame_start = 0;
  int frame_end = 0;
  std::map<int, std::vector<std::vector<Pose2D>>> detections;  // frame -> per camera
  std::vector<Track> gt_tracks;
  std::vector<MissingFrame> missing;
};

inline Dataset load_dataset(const Manifest& manifest) {
  Dataset data;
  for (const auto& path : manifest.camera_files) data.cameras.push_back(load_camera(path));
  data.skeleton = load_skeleton(manifest.skeleton_file);
  data.frame_start = manifest.frame_start;
  data.frame_end = manifest.frame_end;
  for (int f = manifest.frame_start; f <= manifest.frame_end; ++f)
    data.detections[f] = load_frame_detections(manifest, f, data.cameras,
                                               data.skeleton.n_joints(), &data.missing);
  if (!manifest.gt_tracks_file.empty()) data.gt_tracks = load_tracks(manifest.gt_tracks_file);
  return data;
}

inline std::vector<int> camera_ids(const std::vector<Camera>& cameras) {
  std::vector<int> ids;
  ids.reserve(cameras.size());
  for (const Camera& c : cameras) ids.push_back(c.id);
  return ids;
}

struct PipelineResult {
  std::map<int, std::vector<Pose3D>> frame_poses;  // per-frame estimation output
  std::vector<Track> raw_tracks;                   // before smoothing
  std::vector<Track> tracks;                       // final (smoothed when enabled)
};

// Estimates every frame (in parallel), links them into tracks (in order),
// then fills and smooths each track when smoothing is on. Results do not
// depend on the worker count.
inline PipelineResult run_pipeline(const Dataset& data, const RunConfig& cfg) {
  cfg.validate(camera_ids(data.cameras));

  std::vector<int> frames;
  frames.reserve(data.detections.size());
  for (const auto& [frame, dets] : data.detections) frames.push_back(frame);

  const FundamentalCache fmats(data.cameras);
  std::vector<std::vector<Pose3D>> estimated(frames.size());

  unsigned n_workers = cfg.workers > 0 ? static_cast<unsigned>(cfg.workers)
                                       : std::max(1u, std::thread::hardware_concurrency());
  n_workers = std::min<unsigned>(n_workers, std::max<std::size_t>(frames.size(), 1));

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&]() {
    for (std::size_t i = next.fetch_add(1); i < frames.size(); i = next.fetch_add(1)) {
      try {
        estimated[i] =
            estimate_frame(data.detections.at(frames[i]), data.cameras, fmats, cfg.association);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  if (n_workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  PipelineResult result;
  Tracker tracker(cfg.tracking);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    result.frame_poses[frames[i]] = estimated[i];
    tracker.step(frames[i], estimated[i]);
  }
  result.raw_tracks = tracker.tracks();

  if (cfg.smooth) {
    result.tracks.reserve(result.raw_tracks.size());
    for (const Track& t : result.raw_tracks)
      result.tracks.push_back(fill_and_smooth(t, cfg.smoothing));
  } else {
    result.tracks = result.raw_tracks;
  }
  return result;
}

struct SigmaSweepRow {
  double sigma = 0.0;
  double pcp = 0.0;
};

// Association and tracking run once; each sigma re-smooths the same raw
// tracks and scores them against the dataset's ground truth.
inline std::vector<SigmaSweepRow> sweep_sigma(const Dataset& data, const RunConfig& base,
                                              const std::vector<double>& sigmas) {
  if (data.gt_tracks.empty())
    throw ConfigError("sigma sweep needs a dataset with ground-truth tracks");
  if (sigmas.empty()) throw ConfigError("sigma sweep needs at least one sigma");

  RunConfig cfg = base;
  cfg.smooth = false;
  const PipelineResult result = run_pipeline(data, cfg);

  std::vector<SigmaSweepRow> rows;
  rows.reserve(sigmas.size());
  for (double sigma : sigmas) {
    SmoothingConfig sc = base.smoothing;
    sc.sigma = sigma;
    sc.validate();
    std::vector<Track> smoothed;
    smoothed.reserve(result.raw_tracks.size());
    for (const Track& t : result.raw_tracks) smoothed.push_back(fill_and_smooth(t, sc));
    rows.push_back({sigma, pcp_score(smoothed, data.gt_tracks, data.skeleton, base.alpha).overall});
  }
  return rows;
}

struct PermutationRow {
  std::vector<int> order;
  double pcp = 0.0;
};

struct PermutationStudy {
  std::vector<PermutationRow> rows;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// Runs the full pipeline once per camera-order permutation and scores each
// run against ground truth. Factorial in the camera count, hence the guard.
inline PermutationStudy permute_cameras(const Dataset& data, const RunConfig& base) {
  if (data.cameras.size() > 7)
    throw ConfigError("permutation study limited to 7 cameras (factorial growth)");
  if (data.gt_tracks.empty())
    throw ConfigError("permutation study needs a dataset with ground-truth tracks");

  std::vector<int> order = camera_ids(data.cameras);
  std::sort(order.begin(), order.end());

  PermutationStudy study;
  do {
    RunConfig cfg = base;
    cfg.association.camera_order = order;
    const PipelineResult result = run_pipeline(data, cfg);
    const double pcp = pcp_score(result.tracks, data.gt_tracks, data.skeleton, base.alpha).overall;
    study.rows.push_back({order, pcp});
  } while (std::next_permutation(order.begin(), order.end()));

  study.min = study.rows.front().pcp;
  study.max = study.rows.front().pcp;
  double sum = 0.0;
  for (const auto& row : study.rows) {
    sum += row.pcp;
    study.min = std::min(study.min, row.pcp);
    study.max = std::max(study.max, row.pcp);
  }
  study.mean = sum / study.rows.size();
  return study;
}

// Writes a generated scene to `dir` in the on-disk dataset layout and
// returns the loaded manifest. Detection files gain a .gz suffix when
// gzip_detections is set.
inline Manifest write_scene(const Scene& scene, const std::string& dir,
                            bool gzip_detections = false) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "cameras");
  fs::create_directories(fs::path(dir) / "detections");

  Manifest rel;
  rel.version = "mvpose3d/1";
  for (const Camera& cam : scene.cameras) {
    const std::string name = "cameras/cam" + std::to_string(cam.id) + ".json";
    save_camera((fs::path(dir) / name).string(), cam);
    rel.camera_files.push_back(name);
  }
  save_skeleton((fs::path(dir) / "skeleton.json").string(), scene.skeleton);
  rel.skeleton_file = "skeleton.json";

  const std::string suffix = gzip_detections ? ".json.gz" : ".json";
  rel.detection_pattern = "detections/f{frame}_c{camera}" + suffix;
  for (std::size_t f = 0; f < scene.detections.size(); ++f)
    for (std::size_t c = 0; c < scene.detections[f].size(); ++c) {
      const std::string name =
          "detections/f" + std::to_string(f) + "_c" + std::to_string(scene.cameras[c].id) + suffix;
      save_detection_file((fs::path(dir) / name).string(), static_cast<int>(f),
                          scene.cameras[c].id, scene.detections[f][c]);
    }
  rel.frame_start = 0;
  rel.frame_end = static_cast<int>(scene.detections.size()) - 1;

  save_tracks((fs::path(dir) / "gt_tracks.json").string(), scene.gt_tracks);
  rel.gt_tracks_file = "gt_tracks.json";

  const std::string manifest_path = (fs::path(dir) / "manifest.json").string();
  save_manifest(manifest_path, rel);
  return load_manifest(manifest_path);
}

}  // namespace mvpose3d
