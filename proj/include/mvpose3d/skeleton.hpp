#pragma once

#include <array>
#include <string>
#include <vector>

#include "mvpose3d/types.hpp"

namespace mvpose3d {

// Limb classes scored by the PCP metric; limbs marked `kOther` define
// connectivity only and are excluded from the headline averages.
enum class LimbClass { kUpperArm, kLowerArm, kUpperLeg, kLowerLeg, kOther };

inline const char* limb_class_name(LimbClass c) {
  switch (c) {
    case LimbClass::kUpperArm: return "ua";
    case LimbClass::kLowerArm: return "la";
    case LimbClass::kUpperLeg: return "ul";
    case LimbClass::kLowerLeg: return "ll";
    default: return "other";
  }
}

inline bool limb_class_from_name(const std::string& s, LimbClass& out) {
  if (s == "ua") out = LimbClass::kUpperArm;
  else if (s == "la") out = LimbClass::kLowerArm;
  else if (s == "ul") out = LimbClass::kUpperLeg;
  else if (s == "ll") out = LimbClass::kLowerLeg;
  else if (s == "other") out = LimbClass::kOther;
  else return false;
  return true;
}

struct SkeletonDef {
  struct Limb {
    int a = -1;
    int b = -1;
    LimbClass cls = LimbClass::kOther;
  };

  std::vector<std::string> joint_names;
  std::vector<Limb> limbs;
  // Index pairs swapped by a left/right confusion; used by the synthetic
  // generator to model detector flips.
  std::vector<std::pair<int, int>> mirror_pairs;

  int n_joints() const { return static_cast<int>(joint_names.size()); }

  void validate() const {
    const int j = n_joints();
    if (j == 0) throw SkeletonMismatch("skeleton has no joints");
    for (const auto& l : limbs) {
      if (l.a < 0 || l.a >= j || l.b < 0 || l.b >= j)
        throw SkeletonMismatch("limb joint index out of range");
      if (l.a == l.b) throw SkeletonMismatch("limb endpoints must differ");
    }
    for (const auto& [a, b] : mirror_pairs)
      if (a < 0 || a >= j || b < 0 || b >= j || a == b)
        throw SkeletonMismatch("mirror pair index out of range");
  }
};

// 14-joint body: shoulders, elbows, wrists, hips, knees and ankles define
// the eight scored limbs; head and torso edges are connectivity only.
inline SkeletonDef default_skeleton() {
  SkeletonDef s;
  s.joint_names = {"head_top", "neck",    "r_shoulder", "r_elbow", "r_wrist",
                   "l_shoulder", "l_elbow", "l_wrist",  "r_hip",   "r_knee",
                   "r_ankle",  "l_hip",   "l_knee",     "l_ankle"};
  using LC = LimbClass;
  s.limbs = {{2, 3, LC::kUpperArm},  {5, 6, LC::kUpperArm},
             {3, 4, LC::kLowerArm},  {6, 7, LC::kLowerArm},
             {8, 9, LC::kUpperLeg},  {11, 12, LC::kUpperLeg},
             {9, 10, LC::kLowerLeg}, {12, 13, LC::kLowerLeg},
             {0, 1, LC::kOther},     {1, 2, LC::kOther},
             {1, 5, LC::kOther},     {1, 8, LC::kOther},
             {1, 11, LC::kOther}};
  s.mirror_pairs = {{2, 5}, {3, 6}, {4, 7}, {8, 11}, {9, 12}, {10, 13}};
  return s;
}

}  // namespace mvpose3d
