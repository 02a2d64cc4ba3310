#pragma once

#include <algorithm>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mvpose3d/assignment.hpp"
#include "mvpose3d/skeleton.hpp"
#include "mvpose3d/types.hpp"

namespace mvpose3d {

// Frame-indexed poses, e.g. per-frame pipeline output.
using FramePoses = std::map<int, std::vector<Pose3D>>;

// A ground-truth pose carries a stable actor id across frames.
struct ActorPose {
  int actor_id = -1;
  Pose3D pose;
};
using FrameActors = std::map<int, std::vector<ActorPose>>;

struct PcpClassTally {
  long correct = 0;
  long total = 0;

  double rate() const { return total > 0 ? static_cast<double>(correct) / total : 0.0; }
};

struct PcpActorReport {
  int actor_id = -1;
  std::map<LimbClass, PcpClassTally> per_class;

  // Mean of the class rates that actually scored limbs.
  double average() const {
    double sum = 0.0;
    int n = 0;
    for (const auto& [cls, tally] : per_class) {
      if (tally.total == 0) continue;
      sum += tally.rate();
      ++n;
    }
    return n > 0 ? sum / n : 0.0;
  }
};

struct PcpReport {
  std::vector<PcpActorReport> actors;  // sorted by actor id
  double overall = 0.0;                // mean of actor averages

  // Mean rate for one class across the actors that scored it.
  double class_average(LimbClass cls) const {
    double sum = 0.0;
    int n = 0;
    for (const auto& a : actors) {
      auto it = a.per_class.find(cls);
      if (it == a.per_class.end() || it->second.total == 0) continue;
      sum += it->second.rate();
      ++n;
    }
    return n > 0 ? sum / n : 0.0;
  }
};

struct MotaReport {
  long false_positives = 0;
  long false_negatives = 0;
  long id_switches = 0;
  long gt_count = 0;
  double mota = 1.0;
};

namespace detail {

// Mean 3D distance over joints present in both poses; Forbidden when none.
inline double mean_joint_distance(const Pose3D& a, const Pose3D& b) {
  const std::size_t n = std::min(a.joints.size(), b.joints.size());
  double sum = 0.0;
  int shared = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (!a.joints[j] || !b.joints[j]) continue;
    sum += (*a.joints[j] - *b.joints[j]).norm();
    ++shared;
  }
  return shared > 0 ? sum / shared : kForbidden;
}

inline double centroid_distance(const Pose3D& a, const Pose3D& b) {
  const auto ca = a.centroid();
  const auto cb = b.centroid();
  if (!ca || !cb) return kForbidden;
  return (*ca - *cb).norm();
}

inline bool is_scored_class(LimbClass cls) { return cls != LimbClass::kOther; }

}  // namespace detail

// Percentage of correct parts over limb endpoints in 3D. Per frame, each
// ground-truth actor (in ascending id order) claims the closest still
// unclaimed predicted pose by mean shared-joint distance. A limb scores when
// the ground truth has both endpoints; it counts correct when both predicted
// endpoints lie within alpha times the ground-truth limb length of their
// ground-truth positions. Limbs of unmatched actors count as incorrect.
// Connectivity-only limbs (class "other") are not scored.
inline PcpReport pcp_score(const FramePoses& pred, const FrameActors& gt,
                           const SkeletonDef& skeleton, double alpha) {
  skeleton.validate();
  if (!(alpha > 0.0)) throw ConfigError("alpha must be > 0");

  const std::size_t n_joints = skeleton.n_joints();
  auto check_pose = [&](const Pose3D& p) {
    if (p.joints.size() != n_joints)
      throw SkeletonMismatch("pose has " + std::to_string(p.joints.size()) +
                             " joints, skeleton defines " + std::to_string(n_joints));
  };

  std::map<int, PcpActorReport> per_actor;
  static const std::vector<Pose3D> kNoPoses;

  for (const auto& [frame, actors] : gt) {
    auto pred_it = pred.find(frame);
    const std::vector<Pose3D>& candidates = pred_it != pred.end() ? pred_it->second : kNoPoses;
    for (const Pose3D& p : candidates) check_pose(p);

    // Greedy claim, ground-truth actors in id order, each prediction used once.
    std::vector<const ActorPose*> ordered;
    ordered.reserve(actors.size());
    for (const ActorPose& a : actors) {
      check_pose(a.pose);
      ordered.push_back(&a);
    }
    std::sort(ordered.begin(), ordered.end(),
              [](const ActorPose* a, const ActorPose* b) { return a->actor_id < b->actor_id; });

    std::vector<bool> claimed(candidates.size(), false);
    for (const ActorPose* actor : ordered) {
      const Pose3D* match = nullptr;
      double best = kForbidden;
      int best_idx = -1;
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (claimed[i]) continue;
        const double d = detail::mean_joint_distance(actor->pose, candidates[i]);
        if (is_forbidden(d)) continue;
        if (best_idx < 0 || d < best) {
          best = d;
          best_idx = static_cast<int>(i);
        }
      }
      if (best_idx >= 0) {
        claimed[best_idx] = true;
        match = &candidates[best_idx];
      }

      PcpActorReport& report = per_actor[actor->actor_id];
      report.actor_id = actor->actor_id;
      for (const auto& limb : skeleton.limbs) {
        if (!detail::is_scored_class(limb.cls)) continue;
        const auto& ga = actor->pose.joints[limb.a];
        const auto& gb = actor->pose.joints[limb.b];
        if (!ga || !gb) continue;
        PcpClassTally& tally = report.per_class[limb.cls];
        ++tally.total;
        if (!match) continue;
        const auto& pa = match->joints[limb.a];
        const auto& pb = match->joints[limb.b];
        if (!pa || !pb) continue;
        const double len = (*ga - *gb).norm();
        if ((*pa - *ga).norm() <= alpha * len && (*pb - *gb).norm() <= alpha * len)
          ++tally.correct;
      }
    }
  }

  PcpReport report;
  double sum = 0.0;
  int counted = 0;
  for (auto& [id, actor] : per_actor) {
    bool scored = false;
    for (const auto& [cls, tally] : actor.per_class) scored |= tally.total > 0;
    if (scored) {
      sum += actor.average();
      ++counted;
    }
    report.actors.push_back(std::move(actor));
  }
  report.overall = counted > 0 ? sum / counted : 0.0;
  return report;
}

// Track-based convenience wrappers: a track's id doubles as the actor id.
inline FramePoses frames_from_tracks(const std::vector<Track>& tracks) {
  FramePoses frames;
  for (const Track& t : tracks)
    for (const auto& [frame, pose] : t.poses) frames[frame].push_back(pose);
  return frames;
}

inline FrameActors actors_from_tracks(const std::vector<Track>& tracks) {
  FrameActors frames;
  for (const Track& t : tracks)
    for (const auto& [frame, pose] : t.poses)
      frames[frame].push_back(ActorPose{t.id, pose});
  return frames;
}

inline PcpReport pcp_score(const std::vector<Track>& pred, const std::vector<Track>& gt,
                           const SkeletonDef& skeleton, double alpha) {
  return pcp_score(frames_from_tracks(pred), actors_from_tracks(gt), skeleton, alpha);
}

// Multi-object tracking accuracy over 3D centroids. Correspondences carry
// over from the previous frame while still within match_threshold; leftovers
// are re-matched by minimum-cost bipartite assignment. An identity switch is
// counted when a ground-truth actor pairs with a different prediction id
// than the last one it was ever paired with.
inline MotaReport mota_score(const std::vector<Track>& pred_tracks,
                             const std::vector<Track>& gt_tracks,
                             double match_threshold) {
  if (!(match_threshold > 0.0)) throw ConfigError("match_threshold must be > 0");

  std::set<int> frames;
  std::map<int, std::vector<std::pair<int, const Pose3D*>>> gt_by_frame, pred_by_frame;
  for (const Track& t : gt_tracks)
    for (const auto& [frame, pose] : t.poses) {
      gt_by_frame[frame].emplace_back(t.id, &pose);
      frames.insert(frame);
    }
  for (const Track& t : pred_tracks)
    for (const auto& [frame, pose] : t.poses) {
      pred_by_frame[frame].emplace_back(t.id, &pose);
      frames.insert(frame);
    }

  MotaReport report;
  std::map<int, int> carried;     // gt id -> pred id matched in the previous frame
  std::map<int, int> last_match;  // gt id -> pred id from any earlier frame

  for (int frame : frames) {
    static const std::vector<std::pair<int, const Pose3D*>> kNone;
    auto git = gt_by_frame.find(frame);
    auto pit = pred_by_frame.find(frame);
    const auto& gts = git != gt_by_frame.end() ? git->second : kNone;
    const auto& preds = pit != pred_by_frame.end() ? pit->second : kNone;
    report.gt_count += static_cast<long>(gts.size());

    std::map<int, std::size_t> pred_index;
    for (std::size_t i = 0; i < preds.size(); ++i) pred_index[preds[i].first] = i;

    std::vector<bool> gt_done(gts.size(), false), pred_done(preds.size(), false);
    std::map<int, int> matched;  // gt id -> pred id, this frame

    // Keep yesterday's pairs that still hold up.
    for (std::size_t g = 0; g < gts.size(); ++g) {
      auto it = carried.find(gts[g].first);
      if (it == carried.end()) continue;
      auto pi = pred_index.find(it->second);
      if (pi == pred_index.end() || pred_done[pi->second]) continue;
      const double d = detail::centroid_distance(*gts[g].second, *preds[pi->second].second);
      if (is_forbidden(d) || d > match_threshold) continue;
      gt_done[g] = true;
      pred_done[pi->second] = true;
      matched[gts[g].first] = it->second;
    }

    // Re-match the rest at minimum total distance.
    std::vector<std::size_t> free_gt, free_pred;
    for (std::size_t g = 0; g < gts.size(); ++g)
      if (!gt_done[g]) free_gt.push_back(g);
    for (std::size_t p = 0; p < preds.size(); ++p)
      if (!pred_done[p]) free_pred.push_back(p);
    if (!free_gt.empty() && !free_pred.empty()) {
      CostMatrix costs(free_gt.size(), free_pred.size());
      for (std::size_t r = 0; r < free_gt.size(); ++r)
        for (std::size_t c = 0; c < free_pred.size(); ++c) {
          const double d =
              detail::centroid_distance(*gts[free_gt[r]].second, *preds[free_pred[c]].second);
          costs(r, c) = (is_forbidden(d) || d > match_threshold) ? kForbidden : d;
        }
      for (const auto& [r, c] : solve_bipartite(costs).pairs) {
        const int gt_id = gts[free_gt[r]].first;
        const int pred_id = preds[free_pred[c]].first;
        matched[gt_id] = pred_id;
        gt_done[free_gt[r]] = true;
        pred_done[free_pred[c]] = true;
      }
    }

    for (const auto& [gt_id, pred_id] : matched) {
      auto it = last_match.find(gt_id);
      if (it != last_match.end() && it->second != pred_id) ++report.id_switches;
      last_match[gt_id] = pred_id;
    }
    for (std::size_t g = 0; g < gts.size(); ++g)
      if (!gt_done[g]) ++report.false_negatives;
    for (std::size_t p = 0; p < preds.size(); ++p)
      if (!pred_done[p]) ++report.false_positives;

    carried = matched;
  }

  report.mota = report.gt_count > 0
                    ? 1.0 - static_cast<double>(report.false_positives + report.false_negatives +
                                                report.id_switches) /
                                report.gt_count
                    : 1.0;
  return report;
}

// Plain-text table, one row per limb class plus the averages row.
inline std::string to_table(const PcpReport& report) {
  static const LimbClass kClasses[] = {LimbClass::kUpperArm, LimbClass::kLowerArm,
                                       LimbClass::kUpperLeg, LimbClass::kLowerLeg};
  std::ostringstream out;
  out << std::fixed << std::setprecision(3);
  out << std::setw(6) << std::left << "class";
  for (const auto& a : report.actors) out << std::setw(10) << ("actor" + std::to_string(a.actor_id));
  out << std::setw(10) << "mean" << '\n';
  for (LimbClass cls : kClasses) {
    out << std::setw(6) << std::left << limb_class_name(cls);
    for (const auto& a : report.actors) {
      auto it = a.per_class.find(cls);
      if (it == a.per_class.end() || it->second.total == 0)
        out << std::setw(10) << "-";
      else
        out << std::setw(10) << it->second.rate();
    }
    out << std::setw(10) << report.class_average(cls) << '\n';
  }
  out << std::setw(6) << std::left << "avg";
  for (const auto& a : report.actors) out << std::setw(10) << a.average();
  out << std::setw(10) << report.overall << '\n';
  return out.str();
}

inline std::string to_table(const MotaReport& report) {
  std::ostringstream out;
  out << "false positives:  " << report.false_positives << '\n'
      << "false negatives:  " << report.false_negatives << '\n'
      << "id switches:      " << report.id_switches << '\n'
      << "gt count:         " << report.gt_count << '\n'
      << std::fixed << std::setprecision(4) << "MOTA:             " << report.mota << '\n';
  return out.str();
}

}  // namespace mvpose3d
