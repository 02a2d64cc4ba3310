#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "mvpose3d/types.hpp"

namespace mvpose3d {

struct SmoothingConfig {
  // Gaussian standard deviation in frames.
  double sigma = 2.0;
  // Longest interior gap (frames) filled by interpolation.
  int fill_window = 10;
  // Kernel truncation radius in units of sigma.
  double kernel_radius = 3.0;

  void validate() const {
    if (!(sigma > 0.0)) throw ConfigError("sigma must be > 0");
    if (fill_window < 0) throw ConfigError("fill_window must be >= 0");
    if (!(kernel_radius >= 2.0)) throw ConfigError("kernel_radius must be >= 2");
  }
};

namespace detail {

// Dense per-joint trajectory over the track's frame span; absent samples are
// nullopt (joint not observed, or the whole pose missing at that frame).
struct JointSeries {
  int first_frame = 0;
  std::vector<std::optional<Point3>> samples;
};

inline JointSeries extract_series(const Track& track, std::size_t joint) {
  JointSeries s;
  s.first_frame = track.first_frame();
  s.samples.resize(track.last_frame() - s.first_frame + 1);
  for (const auto& [frame, pose] : track.poses) {
    if (joint < pose.joints.size() && pose.joints[joint])
      s.samples[frame - s.first_frame] = *pose.joints[joint];
  }
  return s;
}

inline std::size_t track_joint_count(const Track& track) {
  std::size_t n = 0;
  for (const auto& [frame, pose] : track.poses)
    n = std::max(n, pose.joints.size());
  return n;
}

// Rebuilds a track from per-joint series; frames where every joint is absent
// carry no pose.
inline Track assemble(const Track& original, int first_frame,
                      const std::vector<JointSeries>& series) {
  Track out;
  out.id = original.id;
  const std::size_t n_joints = series.size();
  const std::size_t span = series.empty() ? 0 : series[0].samples.size();
  for (std::size_t i = 0; i < span; ++i) {
    Pose3D pose(n_joints);
    int present = 0;
    for (std::size_t j = 0; j < n_joints; ++j) {
      if (series[j].samples[i]) {
        pose.joints[j] = series[j].samples[i];
        ++present;
      }
    }
    if (present == 0) continue;
    const int frame = first_frame + static_cast<int>(i);
    // Keep view counts for samples the original track already had.
    if (const Pose3D* orig = original.pose_at(frame)) {
      for (std::size_t j = 0; j < n_joints && j < orig->joints.size(); ++j)
        if (pose.joints[j] && orig->joints[j])
          pose.source_views[j] = orig->source_views[j];
    }
    out.poses.emplace(frame, std::move(pose));
  }
  out.last_active = out.poses.empty() ? original.last_active : out.last_frame();
  return out;
}

}  // namespace detail

// Fills interior gaps of each joint trajectory by linear interpolation
// between the flanking observed values. Gaps longer than fill_window and
// leading/trailing gaps stay absent.
inline Track fill_missing(const Track& track, const SmoothingConfig& cfg) {
  cfg.validate();
  if (track.empty()) throw ConfigError("cannot fill an empty track");

  const std::size_t n_joints = detail::track_joint_count(track);
  const int first = track.first_frame();
  std::vector<detail::JointSeries> series(n_joints);
  for (std::size_t j = 0; j < n_joints; ++j) {
    series[j] = detail::extract_series(track, j);
    auto& s = series[j].samples;
    const int n = static_cast<int>(s.size());
    int prev = -1;
    for (int i = 0; i < n; ++i) {
      if (!s[i]) continue;
      const int gap = i - prev - 1;
      if (prev >= 0 && gap > 0 && gap <= cfg.fill_window) {
        const Point3 a = *s[prev];
        const Point3 b = *s[i];
        for (int k = prev + 1; k < i; ++k) {
          const double t = static_cast<double>(k - prev) / (i - prev);
          s[k] = Point3(a + t * (b - a));
        }
      }
      prev = i;
    }
  }
  return detail::assemble(track, first, series);
}

// Smooths each joint trajectory with a truncated discrete Gaussian of
// standard deviation sigma. Weights are renormalized over the frames where
// the joint is present, so constants are preserved exactly at boundaries
// and next to unfilled gaps. Absent samples stay absent.
inline Track smooth_track(const Track& track, const SmoothingConfig& cfg) {
  cfg.validate();
  if (track.empty()) throw ConfigError("cannot smooth an empty track");

  const int radius = std::max(1, static_cast<int>(std::ceil(cfg.kernel_radius * cfg.sigma)));
  std::vector<double> kernel(2 * radius + 1);
  for (int k = -radius; k <= radius; ++k)
    kernel[k + radius] = std::exp(-0.5 * (k * k) / (cfg.sigma * cfg.sigma));

  const std::size_t n_joints = detail::track_joint_count(track);
  const int first = track.first_frame();
  std::vector<detail::JointSeries> series(n_joints);
  for (std::size_t j = 0; j < n_joints; ++j) {
    series[j] = detail::extract_series(track, j);
    const auto& in = series[j].samples;
    const int n = static_cast<int>(in.size());
    std::vector<std::optional<Point3>> out(n);
    for (int i = 0; i < n; ++i) {
      if (!in[i]) continue;
      Point3 acc = Point3::Zero();
      double wsum = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        const int src = i + k;
        if (src < 0 || src >= n || !in[src]) continue;
        acc += kernel[k + radius] * (*in[src]);
        wsum += kernel[k + radius];
      }
      out[i] = Point3(acc / wsum);
    }
    series[j].samples = std::move(out);
  }
  return detail::assemble(track, first, series);
}

// The standard post-processing order: fill, then smooth.
inline Track fill_and_smooth(const Track& track, const SmoothingConfig& cfg) {
  return smooth_track(fill_missing(track, cfg), cfg);
}

}  // namespace mvpose3d
