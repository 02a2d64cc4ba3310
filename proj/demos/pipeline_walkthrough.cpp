// Walks a synthetic multi-camera scene through every library stage by hand:
// association, triangulation, tracking, smoothing, scoring. Run it without
// arguments; it prints what each stage produced.

#include <cstdio>
#include <iostream>

#include "mvpose3d/mvpose3d.hpp"

namespace mv = mvpose3d;

int main() {
  mv::SceneSpec spec;
  spec.n_people = 3;
  spec.n_cameras = 5;
  spec.n_frames = 40;
  spec.motion = mv::MotionModel::kSinusoidalLimbs;
  spec.pixel_noise_sigma = 2.0;
  spec.joint_dropout_prob = 0.05;
  spec.rng_seed = 7;
  const mv::Scene scene = mv::generate_scene(spec);
  std::printf("scene: %d people, %d cameras, %d frames, %.1fpx noise\n\n",
              spec.n_people, spec.n_cameras, spec.n_frames,
              spec.pixel_noise_sigma);

  // Stage 1+2: group detections across views, triangulate each group.
  mv::AssociationConfig assoc;
  assoc.theta = 10.0;
  const mv::FundamentalCache fmats(scene.cameras);

  mv::Tracker tracker;
  for (int f = 0; f < spec.n_frames; ++f) {
    const auto hyps =
        mv::associate_views(scene.detections[f], scene.cameras, fmats, assoc);
    std::vector<mv::Pose3D> poses;
    for (const auto& hyp : hyps) {
      mv::Pose3D pose = mv::triangulate_person(hyp, scene.cameras);
      if (pose.present_count() > 0) poses.push_back(std::move(pose));
    }
    if (f == 0)
      std::printf("frame 0: %zu hypotheses, %zu triangulated poses\n",
                  hyps.size(), poses.size());

    // Stage 3: link this frame's poses to the running tracks.
    tracker.step(f, poses);
  }

  const std::vector<mv::Track> raw = tracker.tracks();
  std::printf("tracking: %zu tracks\n", raw.size());
  for (const mv::Track& t : raw)
    std::printf("  track %d: frames %d..%d, %zu poses\n", t.id,
                t.first_frame(), t.last_active, t.poses.size());

  // Stage 4: fill short gaps, then smooth each joint trajectory.
  mv::SmoothingConfig smoothing;
  std::vector<mv::Track> tracks;
  tracks.reserve(raw.size());
  for (const mv::Track& t : raw) tracks.push_back(mv::fill_and_smooth(t, smoothing));

  // Scoring against the ground truth the generator kept.
  const mv::PcpReport pcp = mv::pcp_score(tracks, scene.gt_tracks, scene.skeleton, 0.5);
  const mv::MotaReport mota = mv::mota_score(tracks, scene.gt_tracks, 500.0);
  std::printf("\n%s\n%s", mv::to_table(pcp).c_str(), mv::to_table(mota).c_str());
  return 0;
}
