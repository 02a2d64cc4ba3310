#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mvpose3d/assignment.hpp"
#include "mvpose3d/geometry.hpp"
#include "mvpose3d/types.hpp"

namespace mvpose3d {

// Cross-view group of 2D detections believed to be one person. Camera ids of
// the members are pairwise distinct by construction: each camera contributes
// at most one pose because a single matching is solved per camera pass.
struct PersonHypothesis {
  std::vector<Pose2D> members;

  bool has_camera(int camera_id) const {
    for (const auto& m : members)
      if (m.camera_id == camera_id) return true;
    return false;
  }
};

struct AssociationConfig {
  // Pixel threshold below which a matched detection joins the hypothesis.
  double theta = 40.0;
  // Camera ids in greedy processing order; empty means the camera list order.
  std::vector<int> camera_order;
  // Member pairs sharing fewer joints than this are uninformative and are
  // skipped; set to 1 to average over every nonempty overlap.
  int min_shared_joints = 3;
  EpipolarMode epipolar_mode = EpipolarMode::kGeometric;
  // Weight each joint term by the product of the two detection confidences.
  bool confidence_weighted = false;

  void validate(const std::vector<int>& available_camera_ids) const {
    if (!(theta > 0.0)) throw ConfigError("theta must be > 0");
    if (min_shared_joints < 1)
      throw ConfigError("min_shared_joints must be >= 1");
    if (camera_order.empty()) return;
    std::vector<int> a = available_camera_ids, b = camera_order;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b)
      throw ConfigError(
          "camera_order must be a permutation of the available camera ids");
  }
};

// All directed fundamental matrices of a rig, built once and shared.
class FundamentalCache {
 public:
  FundamentalCache() = default;

  explicit FundamentalCache(const std::vector<Camera>& cameras) {
    for (const auto& a : cameras)
      for (const auto& b : cameras) {
        if (a.id == b.id) continue;
        fmats_.emplace(std::make_pair(a.id, b.id),
                       fundamental_from_cameras(a, b));
      }
  }

  const FundamentalMatrix& get(int from_camera, int to_camera) const {
    auto it = fmats_.find({from_camera, to_camera});
    if (it == fmats_.end())
      throw ConfigError("no fundamental matrix for camera pair " +
                        std::to_string(from_camera) + " -> " +
                        std::to_string(to_camera));
    return it->second;
  }

 private:
  std::map<std::pair<int, int>, FundamentalMatrix> fmats_;
};

// Cost of assigning detection h to hypothesis: the mean over members of the
// per-member mean epipolar joint distance, taken over the joints present in
// both poses. Members with too small an overlap are skipped; kForbidden when
// no member is comparable.
inline double assignment_cost(const Pose2D& h, const PersonHypothesis& hyp,
                              const FundamentalCache& fmats,
                              const AssociationConfig& cfg = {}) {
  double member_sum = 0.0;
  int member_count = 0;
  for (const auto& m : hyp.members) {
    const FundamentalMatrix& f_hm = fmats.get(h.camera_id, m.camera_id);
    const FundamentalMatrix& f_mh = fmats.get(m.camera_id, h.camera_id);
    double joint_sum = 0.0;
    double weight_sum = 0.0;
    int shared = 0;
    const std::size_t n = std::min(h.joints.size(), m.joints.size());
    for (std::size_t j = 0; j < n; ++j) {
      if (!h.joints[j] || !m.joints[j]) continue;
      const double w = cfg.confidence_weighted
                           ? h.joints[j]->confidence * m.joints[j]->confidence
                           : 1.0;
      joint_sum += w * epipolar_joint_distance(h.joints[j]->p, m.joints[j]->p,
                                               f_hm, f_mh, cfg.epipolar_mode);
      weight_sum += w;
      ++shared;
    }
    if (shared < cfg.min_shared_joints || !(weight_sum > 0.0)) continue;
    member_sum += joint_sum / weight_sum;
    ++member_count;
  }
  if (member_count == 0) return kForbidden;
  return member_sum / member_count;
}

// Greedy cross-view association. Detections of the first camera in the
// processing order seed singleton hypotheses; every further camera is merged
// by bipartite matching, where a matched pair below theta extends the
// hypothesis and everything else (expensive matches and unmatched
// detections alike) opens a new one. Hypotheses that end with a single
// member cannot be triangulated and are dropped.
inline std::vector<PersonHypothesis> associate_views(
    const std::vector<std::vector<Pose2D>>& detections,
    const std::vector<Camera>& cameras, const FundamentalCache& fmats,
    const AssociationConfig& cfg) {
  if (detections.size() != cameras.size())
    throw ConfigError("detections must align with the camera list");
  std::vector<int> ids;
  std::map<int, std::size_t> id_to_slot;
  for (std::size_t i = 0; i < cameras.size(); ++i) {
    ids.push_back(cameras[i].id);
    id_to_slot[cameras[i].id] = i;
  }
  cfg.validate(ids);
  const std::vector<int>& order = cfg.camera_order.empty() ? ids : cfg.camera_order;

  std::vector<PersonHypothesis> hyps;
  bool first = true;
  for (int cam_id : order) {
    const auto& dets = detections[id_to_slot.at(cam_id)];
    if (first) {
      for (const auto& d : dets) hyps.push_back(PersonHypothesis{{d}});
      first = false;
      continue;
    }
    const int n_dets = static_cast<int>(dets.size());
    const int n_hyps = static_cast<int>(hyps.size());
    CostMatrix costs(n_dets, n_hyps);
    for (int k = 0; k < n_dets; ++k)
      for (int m = 0; m < n_hyps; ++m)
        costs(k, m) = assignment_cost(dets[k], hyps[m], fmats, cfg);
    const Assignment sol = solve_bipartite(costs);

    std::vector<int> det_to_hyp(n_dets, -1);
    for (const auto& [k, m] : sol.pairs) det_to_hyp[k] = m;
    for (int k = 0; k < n_dets; ++k) {
      const int m = det_to_hyp[k];
      if (m >= 0 && costs(k, m) < cfg.theta)
        hyps[m].members.push_back(dets[k]);
      else
        hyps.push_back(PersonHypothesis{{dets[k]}});
    }
  }

  std::vector<PersonHypothesis> out;
  for (auto& h : hyps)
    if (h.members.size() >= 2) out.push_back(std::move(h));
  return out;
}

// Triangulates every joint seen by at least two member cameras. Joints whose
// rays are degenerate are left absent rather than failing the pose.
inline Pose3D triangulate_person(const PersonHypothesis& hyp,
                                 const std::vector<Camera>& cameras) {
  if (hyp.members.size() < 2)
    throw InsufficientViews("hypothesis has fewer than 2 member views");
  std::map<int, const Camera*> by_id;
  for (const auto& c : cameras) by_id[c.id] = &c;

  std::size_t n_joints = 0;
  for (const auto& m : hyp.members) n_joints = std::max(n_joints, m.joints.size());

  Pose3D pose(n_joints);
  std::vector<std::pair<const Camera*, Point2>> obs;
  for (std::size_t j = 0; j < n_joints; ++j) {
    obs.clear();
    for (const auto& m : hyp.members) {
      if (j >= m.joints.size() || !m.joints[j]) continue;
      auto it = by_id.find(m.camera_id);
      if (it == by_id.end())
        throw ConfigError("hypothesis references unknown camera " +
                          std::to_string(m.camera_id));
      obs.emplace_back(it->second, m.joints[j]->p);
    }
    if (obs.size() < 2) continue;
    try {
      pose.joints[j] = triangulate_joint(obs);
      pose.source_views[j] = static_cast<int>(obs.size());
    } catch (const DegenerateGeometry&) {
      // leave the joint absent
    }
  }
  return pose;
}

// Per-frame 3D estimation: associate across views, then triangulate each
// surviving hypothesis. Poses with no recoverable joint are dropped. Output
// order follows hypothesis creation order and is deterministic.
inline std::vector<Pose3D> estimate_frame(
    const std::vector<std::vector<Pose2D>>& detections,
    const std::vector<Camera>& cameras, const FundamentalCache& fmats,
    const AssociationConfig& cfg) {
  std::vector<Pose3D> out;
  for (const auto& hyp : associate_views(detections, cameras, fmats, cfg)) {
    Pose3D p = triangulate_person(hyp, cameras);
    if (p.present_count() > 0) out.push_back(std::move(p));
  }
  return out;
}

inline std::vector<Pose3D> estimate_frame(
    const std::vector<std::vector<Pose2D>>& detections,
    const std::vector<Camera>& cameras, const AssociationConfig& cfg) {
  return estimate_frame(detections, cameras, FundamentalCache(cameras), cfg);
}

}  // namespace mvpose3d
