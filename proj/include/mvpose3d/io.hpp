#pragma once

#include <zlib.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "mvpose3d/geometry.hpp"
#include "mvpose3d/skeleton.hpp"
#include "mvpose3d/types.hpp"

namespace mvpose3d {

using json = nlohmann::json;

// A dataset manifest: where the calibration, detection, skeleton, and
// optional ground-truth files live. All paths are stored resolved against
// the manifest's own directory.
struct Manifest {
  std::string version;
  std::vector<std::string> camera_files;
  // Per-frame per-camera detection file pattern containing the placeholders
  // {frame} and {camera}.
  std::string detection_pattern;
  int frame_start = 0;
  int frame_end = 0;  // inclusive
  std::string skeleton_file;
  std::string gt_tracks_file;  // empty when the manifest has none
};

// A detection file that was absent on disk; recorded, not fatal.
struct MissingFrame {
  int frame = 0;
  int camera = 0;
  std::string path;
};

namespace detail {

inline bool has_gz_suffix(const std::string& path) {
  return path.size() >= 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
}

inline std::string read_file(const std::string& path) {
  if (has_gz_suffix(path)) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) throw SchemaError(path + ": cannot open");
    std::string data;
    char buf[1 << 16];
    int n;
    while ((n = gzread(f, buf, sizeof(buf))) > 0) data.append(buf, n);
    const bool bad = n < 0;
    gzclose(f);
    if (bad) throw SchemaError(path + ": gzip read error");
    return data;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError(path + ": cannot open");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline void write_file(const std::string& path, const std::string& data) {
  if (has_gz_suffix(path)) {
    gzFile f = gzopen(path.c_str(), "wb");
    if (!f) throw SchemaError(path + ": cannot open for writing");
    const int written = gzwrite(f, data.data(), static_cast<unsigned>(data.size()));
    gzclose(f);
    if (written != static_cast<int>(data.size()))
      throw SchemaError(path + ": gzip write error");
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError(path + ": cannot open for writing");
  out << data;
  if (!out) throw SchemaError(path + ": write error");
}

inline Eigen::Matrix3d matrix3_from_json(const json& rows, const std::string& ctx) {
  if (!rows.is_array() || rows.size() != 3) throw SchemaError(ctx + ": expected 3 rows");
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r) {
    const json& row = rows[r];
    if (!row.is_array() || row.size() != 3) throw SchemaError(ctx + ": expected 3 columns");
    for (int c = 0; c < 3; ++c) m(r, c) = row[c].get<double>();
  }
  return m;
}

inline json matrix3_to_json(const Eigen::Matrix3d& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) rows.push_back({m(r, 0), m(r, 1), m(r, 2)});
  return rows;
}

}  // namespace detail

// Reads a whole JSON document, decompressing .gz files transparently.
inline json load_json(const std::string& path) {
  try {
    return json::parse(detail::read_file(path));
  } catch (const json::exception& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

// Writes a JSON document (keys sorted, doubles round-trip exact), gzipped
// when the path ends in .gz.
inline void save_json(const std::string& path, const json& j) {
  detail::write_file(path, j.dump(2) + "\n");
}

inline Camera camera_from_json(const json& j, const std::string& ctx) {
  try {
    Camera cam;
    cam.id = j.at("id").get<int>();
    cam.intrinsics = detail::matrix3_from_json(j.at("K"), ctx + ": K");
    cam.rotation = detail::matrix3_from_json(j.at("R"), ctx + ": R");
    const json& t = j.at("t");
    if (!t.is_array() || t.size() != 3) throw SchemaError(ctx + ": t must have 3 entries");
    for (int i = 0; i < 3; ++i) cam.translation(i) = t[i].get<double>();
    cam.width = j.at("width").get<int>();
    cam.height = j.at("height").get<int>();
    if (j.contains("dist"))
      std::cerr << "warning: " << ctx << ": distortion coefficients are ignored\n";
    cam.validate();
    return cam;
  } catch (const json::exception& e) {
    throw SchemaError(ctx + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw SchemaError(ctx + ": " + e.what());
  }
}

inline json camera_to_json(const Camera& cam) {
  json j;
  j["id"] = cam.id;
  j["K"] = detail::matrix3_to_json(cam.intrinsics);
  j["R"] = detail::matrix3_to_json(cam.rotation);
  j["t"] = {cam.translation.x(), cam.translation.y(), cam.translation.z()};
  j["width"] = cam.width;
  j["height"] = cam.height;
  return j;
}

inline Camera load_camera(const std::string& path) {
  return camera_from_json(load_json(path), path);
}

inline void save_camera(const std::string& path, const Camera& cam) {
  save_json(path, camera_to_json(cam));
}

inline SkeletonDef skeleton_from_json(const json& j, const std::string& ctx) {
  try {
    SkeletonDef def;
    for (const auto& name : j.at("joints")) def.joint_names.push_back(name.get<std::string>());
    for (const auto& limb : j.at("limbs")) {
      SkeletonDef::Limb l;
      l.a = limb.at("a").get<int>();
      l.b = limb.at("b").get<int>();
      const std::string cls = limb.at("class").get<std::string>();
      if (!limb_class_from_name(cls, l.cls))
        throw SchemaError(ctx + ": unknown limb class \"" + cls + "\"");
      def.limbs.push_back(l);
    }
    if (j.contains("mirror_pairs"))
      for (const auto& pair : j.at("mirror_pairs")) {
        if (!pair.is_array() || pair.size() != 2)
          throw SchemaError(ctx + ": mirror pair must have 2 entries");
        def.mirror_pairs.emplace_back(pair[0].get<int>(), pair[1].get<int>());
      }
    def.validate();
    return def;
  } catch (const json::exception& e) {
    throw SchemaError(ctx + ": " + e.what());
  } catch (const SkeletonMismatch& e) {
    throw SchemaError(ctx + ": " + e.what());
  }
}

inline json skeleton_to_json(const SkeletonDef& def) {
  json j;
  j["joints"] = def.joint_names;
  json limbs = json::array();
  for (const auto& l : def.limbs)
    limbs.push_back({{"a", l.a}, {"b", l.b}, {"class", limb_class_name(l.cls)}});
  j["limbs"] = limbs;
  json mirrors = json::array();
  for (const auto& [a, b] : def.mirror_pairs) mirrors.push_back({a, b});
  j["mirror_pairs"] = mirrors;
  return j;
}

inline SkeletonDef load_skeleton(const std::string& path) {
  return skeleton_from_json(load_json(path), path);
}

inline void save_skeleton(const std::string& path, const SkeletonDef& def) {
  save_json(path, skeleton_to_json(def));
}

// One detection file: every pose in one camera's view of one frame.
struct DetectionFile {
  int frame = 0;
  int camera = 0;
  std::vector<Pose2D> poses;
};

// expected_joints > 0 enforces the skeleton's joint count.
inline DetectionFile detections_from_json(const json& j, const std::string& ctx,
                                          std::size_t expected_joints = 0) {
  try {
    DetectionFile out;
    out.frame = j.at("frame").get<int>();
    out.camera = j.at("camera").get<int>();
    int index = 0;
    for (const auto& pose_json : j.at("poses")) {
      Pose2D pose;
      pose.camera_id = out.camera;
      pose.index_in_camera = index++;
      const json& joints = pose_json.at("joints");
      if (expected_joints > 0 && joints.size() != expected_joints)
        throw SchemaError(ctx + ": pose has " + std::to_string(joints.size()) +
                          " joints, skeleton defines " + std::to_string(expected_joints));
      for (const auto& joint : joints) {
        if (joint.is_null()) {
          pose.joints.emplace_back();
          continue;
        }
        if (!joint.is_array() || joint.size() < 2)
          throw SchemaError(ctx + ": joint must be [x, y, conf] or null");
        Joint2D j2;
        j2.p = Point2(joint[0].get<double>(), joint[1].get<double>());
        j2.confidence = joint.size() > 2 ? joint[2].get<double>() : 1.0;
        pose.joints.emplace_back(j2);
      }
      out.poses.push_back(std::move(pose));
    }
    return out;
  } catch (const json::exception& e) {
    throw SchemaError(ctx + ": " + e.what());
  }
}

inline json detections_to_json(int frame, int camera, const std::vector<Pose2D>& poses) {
  json j;
  j["frame"] = frame;
  j["camera"] = camera;
  json pose_list = json::array();
  for (const Pose2D& pose : poses) {
    json joints = json::array();
    for (const auto& joint : pose.joints) {
      if (joint)
        joints.push_back({joint->p.x(), joint->p.y(), joint->confidence});
      else
        joints.push_back(nullptr);
    }
    pose_list.push_back({{"joints", joints}});
  }
  j["poses"] = pose_list;
  return j;
}

inline DetectionFile load_detection_file(const std::string& path,
                                         std::size_t expected_joints = 0) {
  return detections_from_json(load_json(path), path, expected_joints);
}

inline void save_detection_file(const std::string& path, int frame, int camera,
                                const std::vector<Pose2D>& poses) {
  save_json(path, detections_to_json(frame, camera, poses));
}

inline std::vector<Track> tracks_from_json(const json& j, const std::string& ctx) {
  try {
    std::vector<Track> tracks;
    for (const auto& tj : j.at("tracks")) {
      Track track;
      track.id = tj.at("id").get<int>();
      const json& frames = tj.at("frames");
      const json& poses = tj.at("poses");
      if (frames.size() != poses.size())
        throw SchemaError(ctx + ": track " + std::to_string(track.id) +
                          ": frames and poses differ in length");
      for (std::size_t i = 0; i < frames.size(); ++i) {
        const int frame = frames[i].get<int>();
        const json& joints = poses[i];
        Pose3D pose(joints.size());
        for (std::size_t k = 0; k < joints.size(); ++k) {
          if (joints[k].is_null()) continue;
          if (!joints[k].is_array() || joints[k].size() != 3)
            throw SchemaError(ctx + ": joint must be [x, y, z] or null");
          pose.joints[k] = Point3(joints[k][0].get<double>(), joints[k][1].get<double>(),
                                  joints[k][2].get<double>());
        }
        track.poses.emplace(frame, std::move(pose));
      }
      if (!track.poses.empty()) track.last_active = track.poses.rbegin()->first;
      tracks.push_back(std::move(track));
    }
    return tracks;
  } catch (const json::exception& e) {
    throw SchemaError(ctx + ": " + e.what());
  }
}

inline json tracks_to_json(const std::vector<Track>& tracks) {
  json list = json::array();
  for (const Track& track : tracks) {
    json frames = json::array();
    json poses = json::array();
    for (const auto& [frame, pose] : track.poses) {
      frames.push_back(frame);
      json joints = json::array();
      for (const auto& joint : pose.joints) {
        if (joint)
          joints.push_back({joint->x(), joint->y(), joint->z()});
        else
          joints.push_back(nullptr);
      }
      poses.push_back(std::move(joints));
    }
    list.push_back({{"id", track.id}, {"frames", frames}, {"poses", poses}});
  }
  return json{{"tracks", list}};
}

inline std::vector<Track> load_tracks(const std::string& path) {
  return tracks_from_json(load_json(path), path);
}

inline void save_tracks(const std::string& path, const std::vector<Track>& tracks) {
  save_json(path, tracks_to_json(tracks));
}

// Loads and validates a manifest. Paths inside the file resolve relative to
// its directory; the calibration, skeleton, and ground-truth files it names
// must exist.
inline Manifest load_manifest(const std::string& path) {
  const json j = load_json(path);
  namespace fs = std::filesystem;
  const fs::path base = fs::path(path).parent_path();
  auto resolve = [&](const std::string& p) {
    return fs::path(p).is_absolute() ? p : (base / p).string();
  };
  try {
    Manifest m;
    m.version = j.at("version").get<std::string>();
    if (m.version != "mvpose3d/1")
      throw SchemaError(path + ": unsupported version \"" + m.version + "\"");
    for (const auto& cam : j.at("cameras")) {
      m.camera_files.push_back(resolve(cam.get<std::string>()));
      if (!fs::exists(m.camera_files.back()))
        throw SchemaError(path + ": calibration file not found: " + m.camera_files.back());
    }
    if (m.camera_files.empty()) throw SchemaError(path + ": manifest lists no cameras");
    m.detection_pattern = resolve(j.at("detection_pattern").get<std::string>());
    if (m.detection_pattern.find("{frame}") == std::string::npos ||
        m.detection_pattern.find("{camera}") == std::string::npos)
      throw SchemaError(path + ": detection_pattern needs {frame} and {camera} placeholders");
    m.frame_start = j.at("frame_start").get<int>();
    m.frame_end = j.at("frame_end").get<int>();
    if (m.frame_end < m.frame_start) throw SchemaError(path + ": empty frame range");
    m.skeleton_file = resolve(j.at("skeleton").get<std::string>());
    if (!fs::exists(m.skeleton_file))
      throw SchemaError(path + ": skeleton file not found: " + m.skeleton_file);
    if (j.contains("gt_tracks")) {
      m.gt_tracks_file = resolve(j.at("gt_tracks").get<std::string>());
      if (!fs::exists(m.gt_tracks_file))
        throw SchemaError(path + ": ground-truth file not found: " + m.gt_tracks_file);
    }
    return m;
  } catch (const json::exception& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

inline void save_manifest(const std::string& path, const Manifest& m) {
  json j;
  j["version"] = m.version.empty() ? "mvpose3d/1" : m.version;
  j["cameras"] = m.camera_files;
  j["detection_pattern"] = m.detection_pattern;
  j["frame_start"] = m.frame_start;
  j["frame_end"] = m.frame_end;
  j["skeleton"] = m.skeleton_file;
  if (!m.gt_tracks_file.empty()) j["gt_tracks"] = m.gt_tracks_file;
  save_json(path, j);
}

inline std::string detection_path(const Manifest& m, int frame, int camera_id) {
  std::string path = m.detection_pattern;
  auto replace_all = [&path](const std::string& key, const std::string& value) {
    for (std::size_t pos = path.find(key); pos != std::string::npos; pos = path.find(key, pos))
      path.replace(pos, key.size(), value), pos += value.size();
  };
  replace_all("{frame}", std::to_string(frame));
  replace_all("{camera}", std::to_string(camera_id));
  return path;
}

// Detections for one frame, aligned with `cameras`. A file that does not
// exist (in either plain or .gz form) yields an empty list for that camera
// and a MissingFrame entry when `missing` is given.
inline std::vector<std::vector<Pose2D>> load_frame_detections(
    const Manifest& m, int frame, const std::vector<Camera>& cameras,
    std::size_t expected_joints, std::vector<MissingFrame>* missing = nullptr) {
  namespace fs = std::filesystem;
  std::vector<std::vector<Pose2D>> per_camera(cameras.size());
  for (std::size_t c = 0; c < cameras.size(); ++c) {
    std::string path = detection_path(m, frame, cameras[c].id);
    if (!fs::exists(path)) {
      const std::string alt = detail::has_gz_suffix(path)
                                  ? path.substr(0, path.size() - 3)
                                  : path + ".gz";
      if (fs::exists(alt)) {
        path = alt;
      } else {
        if (missing) missing->push_back({frame, cameras[c].id, path});
        continue;
      }
    }
    DetectionFile file = load_detection_file(path, expected_joints);
    if (file.camera != cameras[c].id)
      throw SchemaError(path + ": file says camera " + std::to_string(file.camera) +
                        ", manifest expects " + std::to_string(cameras[c].id));
    if (file.frame != frame)
      throw SchemaError(path + ": file says frame " + std::to_string(file.frame) +
                        ", manifest expects " + std::to_string(frame));
    per_camera[c] = std::move(file.poses);
  }
  return per_camera;
}

}  // namespace mvpose3d
