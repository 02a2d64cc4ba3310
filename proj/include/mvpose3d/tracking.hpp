#pragma once

#include <climits>
#include <cmath>
#include <vector>

#include "mvpose3d/assignment.hpp"
#include "mvpose3d/types.hpp"

namespace mvpose3d {

struct TrackingConfig {
  // Distance (mm) below which a matched pose extends a track.
  double tau = 200.0;
  // World axis normal to the ground plane (0=x, 1=y, 2=z); used by the
  // no-overlap fallback distance.
  int ground_plane_axis = 2;
  // A track stays matchable while the gap to its last pose is at most this
  // many frames. 1 reproduces strict frame-to-frame matching.
  int max_gap = 10;

  void validate() const {
    if (!(tau > 0.0)) throw ConfigError("tau must be > 0");
    if (ground_plane_axis < 0 || ground_plane_axis > 2)
      throw ConfigError("ground_plane_axis must be 0, 1 or 2");
    if (max_gap < 0) throw ConfigError("max_gap must be >= 0");
  }
};

// Distance between two 3D poses: the mean joint distance over the joints
// present in both, or, with no overlap, the ground-plane distance between
// the centroids of the valid joints of each pose.
inline double pose_distance_3d(const Pose3D& a, const Pose3D& b,
                               const TrackingConfig& cfg = {}) {
  double sum = 0.0;
  int shared = 0;
  const std::size_t n = std::min(a.joints.size(), b.joints.size());
  for (std::size_t j = 0; j < n; ++j) {
    if (!a.joints[j] || !b.joints[j]) continue;
    sum += (*a.joints[j] - *b.joints[j]).norm();
    ++shared;
  }
  if (shared > 0) return sum / shared;

  const auto ca = a.centroid();
  const auto cb = b.centroid();
  if (!ca || !cb) return kForbidden;
  Point3 d = *ca - *cb;
  d(cfg.ground_plane_axis) = 0.0;
  return d.norm();
}

// Associates one frame of 3D poses with the existing tracks. Live tracks
// (last active within max_gap of `frame`) are matched against the new poses
// by bipartite matching on pose_distance_3d; a matched pair below tau
// extends the track, every other pose opens a new track. Fresh ids continue
// above the largest id present; ids are never reused. `frame` must exceed
// every track's last_active.
inline std::vector<Track> track_frame(std::vector<Track> tracks,
                                      const std::vector<Pose3D>& frame_poses,
                                      int frame, const TrackingConfig& cfg) {
  cfg.validate();
  int next_id = 0;
  for (const auto& t : tracks) {
    if (frame <= t.last_active)
      throw ConfigError("frame must exceed every track's last_active");
    next_id = std::max(next_id, t.id + 1);
  }

  std::vector<int> live;
  for (std::size_t i = 0; i < tracks.size(); ++i)
    if (frame - tracks[i].last_active <= cfg.max_gap)
      live.push_back(static_cast<int>(i));

  const int n_tracks = static_cast<int>(live.size());
  const int n_poses = static_cast<int>(frame_poses.size());
  CostMatrix costs(n_tracks, n_poses);
  for (int r = 0; r < n_tracks; ++r) {
    const Track& t = tracks[live[r]];
    const Pose3D& last = t.poses.at(t.last_active);
    for (int q = 0; q < n_poses; ++q)
      costs(r, q) = pose_distance_3d(last, frame_poses[q], cfg);
  }
  const Assignment sol = solve_bipartite(costs);

  std::vector<int> pose_to_track(n_poses, -1);
  for (const auto& [r, q] : sol.pairs)
    if (costs(r, q) < cfg.tau) pose_to_track[q] = live[r];

  for (int q = 0; q < n_poses; ++q) {
    if (pose_to_track[q] >= 0) {
      Track& t = tracks[pose_to_track[q]];
      t.poses.emplace(frame, frame_poses[q]);
      t.last_active = frame;
    } else {
      Track t;
      t.id = next_id++;
      t.poses.emplace(frame, frame_poses[q]);
      t.last_active = frame;
      tracks.push_back(std::move(t));
    }
  }
  return tracks;
}

// Stateful convenience wrapper around track_frame.
class Tracker {
 public:
  explicit Tracker(TrackingConfig cfg = {}) : cfg_(cfg) { cfg_.validate(); }

  const TrackingConfig& config() const { return cfg_; }
  const std::vector<Track>& tracks() const { return tracks_; }

  void step(int frame, const std::vector<Pose3D>& poses) {
    if (last_frame_ != INT_MIN && frame <= last_frame_)
      throw ConfigError("frames must be processed in increasing order");
    last_frame_ = frame;
    tracks_ = track_frame(std::move(tracks_), poses, frame, cfg_);
  }

 private:
  TrackingConfig cfg_;
  std::vector<Track> tracks_;
  int last_frame_ = INT_MIN;
};

}  // namespace mvpose3d
