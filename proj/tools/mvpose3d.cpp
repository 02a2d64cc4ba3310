// Command-line driver: runs the estimation pipeline and its stages on
// datasets described by manifest files, generates synthetic datasets, and
// evaluates track files. Logs and errors go to stderr; data goes to files or
// stdout. Exit codes: 0 ok, 2 schema error, 3 geometry degeneracy, 4 config
// error, 1 anything else.

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mvpose3d/mvpose3d.hpp"

namespace mv = mvpose3d;
using mv::json;

namespace {

void emit_error(const std::string& type, const std::string& message) {
  std::cerr << json{{"error", {{"type", type}, {"message", message}}}}.dump() << "\n";
}

mv::EpipolarMode epipolar_mode_from_name(const std::string& name) {
  if (name == "geometric") return mv::EpipolarMode::kGeometric;
  if (name == "algebraic") return mv::EpipolarMode::kAlgebraic;
  throw mv::ConfigError("unknown epipolar mode: " + name);
}

// Overlays a flat JSON config onto cfg. Keys mirror the flag names.
void apply_config_json(const json& j, mv::RunConfig& cfg, const std::string& path) {
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "theta") cfg.association.theta = value.get<double>();
      else if (key == "camera_order") cfg.association.camera_order = value.get<std::vector<int>>();
      else if (key == "min_shared_joints") cfg.association.min_shared_joints = value.get<int>();
      else if (key == "epipolar_mode") cfg.association.epipolar_mode = epipolar_mode_from_name(value.get<std::string>());
      else if (key == "confidence_weighted") cfg.association.confidence_weighted = value.get<bool>();
      else if (key == "tau") cfg.tracking.tau = value.get<double>();
      else if (key == "ground_plane_axis") cfg.tracking.ground_plane_axis = value.get<int>();
      else if (key == "max_gap") cfg.tracking.max_gap = value.get<int>();
      else if (key == "sigma") cfg.smoothing.sigma = value.get<double>();
      else if (key == "fill_window") cfg.smoothing.fill_window = value.get<int>();
      else if (key == "kernel_radius") cfg.smoothing.kernel_radius = value.get<double>();
      else if (key == "smooth") cfg.smooth = value.get<bool>();
      else if (key == "alpha") cfg.alpha = value.get<double>();
      else if (key == "match_threshold") cfg.match_threshold = value.get<double>();
      else if (key == "workers") cfg.workers = value.get<int>();
      else throw mv::ConfigError(path + ": unknown config key \"" + key + "\"");
    } catch (const json::exception& e) {
      throw mv::ConfigError(path + ": key \"" + key + "\": " + e.what());
    }
  }
}

// Shared pipeline-parameter flags. Defaults come from RunConfig; a config
// file overrides defaults; flags given on the command line win over both.
struct ConfigFlags {
  std::string config_path;
  mv::RunConfig defaults;
  double theta = defaults.association.theta;
  std::vector<int> camera_order;
  int min_shared_joints = defaults.association.min_shared_joints;
  std::string epipolar_mode = "geometric";
  bool confidence_weighted = defaults.association.confidence_weighted;
  double tau = defaults.tracking.tau;
  int ground_plane_axis = defaults.tracking.ground_plane_axis;
  int max_gap = defaults.tracking.max_gap;
  double sigma = defaults.smoothing.sigma;
  int fill_window = defaults.smoothing.fill_window;
  double kernel_radius = defaults.smoothing.kernel_radius;
  bool smooth = defaults.smooth;
  double alpha = defaults.alpha;
  double match_threshold = defaults.match_threshold;
  int workers = defaults.workers;

  CLI::Option* o_config = nullptr;
  CLI::Option* o_theta = nullptr;
  CLI::Option* o_camera_order = nullptr;
  CLI::Option* o_min_shared = nullptr;
  CLI::Option* o_epipolar = nullptr;
  CLI::Option* o_confidence = nullptr;
  CLI::Option* o_tau = nullptr;
  CLI::Option* o_axis = nullptr;
  CLI::Option* o_max_gap = nullptr;
  CLI::Option* o_sigma = nullptr;
  CLI::Option* o_fill = nullptr;
  CLI::Option* o_radius = nullptr;
  CLI::Option* o_smooth = nullptr;
  CLI::Option* o_alpha = nullptr;
  CLI::Option* o_match = nullptr;
  CLI::Option* o_workers = nullptr;

  void attach(CLI::App* cmd) {
    o_config = cmd->add_option("--config", config_path, "JSON config file; flags override it")
                   ->check(CLI::ExistingFile);
    o_theta = cmd->add_option("--theta", theta, "association gate, pixels");
    o_camera_order = cmd->add_option("--camera-order", camera_order,
                                     "camera ids in association order")
                         ->delimiter(',');
    o_min_shared = cmd->add_option("--min-shared-joints", min_shared_joints,
                                   "joints two detections must share to score a pair");
    o_epipolar = cmd->add_option("--epipolar-mode", epipolar_mode,
                                 "epipolar distance: geometric or algebraic");
    o_confidence = cmd->add_flag("--confidence-weighted,!--no-confidence-weighted",
                                 confidence_weighted, "weight joint pairs by confidence");
    o_tau = cmd->add_option("--tau", tau, "tracking gate, mm");
    o_axis = cmd->add_option("--ground-plane-axis", ground_plane_axis,
                             "up axis dropped by the centroid fallback (0=x,1=y,2=z)");
    o_max_gap = cmd->add_option("--max-gap", max_gap, "frames a track survives unmatched");
    o_sigma = cmd->add_option("--sigma", sigma, "smoothing kernel std, frames");
    o_fill = cmd->add_option("--fill-window", fill_window, "longest interpolated gap, frames");
    o_radius = cmd->add_option("--kernel-radius", kernel_radius,
                               "kernel truncation radius, units of sigma");
    o_smooth = cmd->add_flag("--smooth,!--no-smooth", smooth, "toggle the smoothing stage");
    o_alpha = cmd->add_option("--alpha", alpha, "PCP endpoint tolerance factor");
    o_match = cmd->add_option("--match-threshold", match_threshold, "MOTA centroid gate, mm");
    o_workers = cmd->add_option("--workers", workers, "estimation threads (0 = all cores)");
  }

  mv::RunConfig resolve() const {
    mv::RunConfig cfg;
    if (o_config->count()) apply_config_json(mv::load_json(config_path), cfg, config_path);
    if (o_theta->count()) cfg.association.theta = theta;
    if (o_camera_order->count()) cfg.association.camera_order = camera_order;
    if (o_min_shared->count()) cfg.association.min_shared_joints = min_shared_joints;
    if (o_epipolar->count()) cfg.association.epipolar_mode = epipolar_mode_from_name(epipolar_mode);
    if (o_confidence->count()) cfg.association.confidence_weighted = confidence_weighted;
    if (o_tau->count()) cfg.tracking.tau = tau;
    if (o_axis->count()) cfg.tracking.ground_plane_axis = ground_plane_axis;
    if (o_max_gap->count()) cfg.tracking.max_gap = max_gap;
    if (o_sigma->count()) cfg.smoothing.sigma = sigma;
    if (o_fill->count()) cfg.smoothing.fill_window = fill_window;
    if (o_radius->count()) cfg.smoothing.kernel_radius = kernel_radius;
    if (o_smooth->count()) cfg.smooth = smooth;
    if (o_alpha->count()) cfg.alpha = alpha;
    if (o_match->count()) cfg.match_threshold = match_threshold;
    if (o_workers->count()) cfg.workers = workers;
    return cfg;
  }
};

json pose3d_to_json(const mv::Pose3D& pose) {
  json joints = json::array();
  for (const auto& joint : pose.joints) {
    if (joint)
      joints.push_back({joint->x(), joint->y(), joint->z()});
    else
      joints.push_back(nullptr);
  }
  return joints;
}

// Per-frame pose file, the interchange between `associate` and `track`:
// {"frames": [{"frame": int, "poses": [[[x,y,z]|null, ...], ...]}, ...]}.
json frame_poses_to_json(const std::map<int, std::vector<mv::Pose3D>>& frames) {
  json list = json::array();
  for (const auto& [frame, poses] : frames) {
    json pose_list = json::array();
    for (const auto& pose : poses) pose_list.push_back(pose3d_to_json(pose));
    list.push_back({{"frame", frame}, {"poses", pose_list}});
  }
  return json{{"frames", list}};
}

std::map<int, std::vector<mv::Pose3D>> frame_poses_from_json(const json& j,
                                                             const std::string& ctx) {
  try {
    std::map<int, std::vector<mv::Pose3D>> frames;
    for (const auto& fj : j.at("frames")) {
      const int frame = fj.at("frame").get<int>();
      auto& poses = frames[frame];
      for (const auto& pj : fj.at("poses")) {
        mv::Pose3D pose(pj.size());
        for (std::size_t k = 0; k < pj.size(); ++k) {
          if (pj[k].is_null()) continue;
          if (!pj[k].is_array() || pj[k].size() != 3)
            throw mv::SchemaError(ctx + ": joint must be [x, y, z] or null");
          pose.joints[k] = mv::Point3(pj[k][0].get<double>(), pj[k][1].get<double>(),
                                      pj[k][2].get<double>());
        }
        poses.push_back(std::move(pose));
      }
    }
    return frames;
  } catch (const json::exception& e) {
    throw mv::SchemaError(ctx + ": " + e.what());
  }
}

json pcp_to_json(const mv::PcpReport& report) {
  json actors = json::array();
  for (const auto& actor : report.actors) {
    json classes;
    for (const auto& [cls, tally] : actor.per_class)
      classes[mv::limb_class_name(cls)] = {
          {"correct", tally.correct}, {"total", tally.total}, {"rate", tally.rate()}};
    actors.push_back(
        {{"actor_id", actor.actor_id}, {"classes", classes}, {"average", actor.average()}});
  }
  return json{{"actors", actors}, {"overall", report.overall}};
}

json mota_to_json(const mv::MotaReport& report) {
  return json{{"false_positives", report.false_positives},
              {"false_negatives", report.false_negatives},
              {"id_switches", report.id_switches},
              {"gt_count", report.gt_count},
              {"mota", report.mota}};
}

void warn_missing(const std::vector<mv::MissingFrame>& missing) {
  for (const auto& m : missing)
    std::cerr << "warning: no detections for frame " << m.frame << " camera " << m.camera
              << " (" << m.path << ")\n";
}

std::uint64_t seed_with_env_override(std::uint64_t seed) {
  const char* env = std::getenv("MVPOSE3D_SEED");
  if (!env) return seed;
  try {
    return std::stoull(env);
  } catch (const std::exception&) {
    throw mv::ConfigError(std::string("MVPOSE3D_SEED is not an integer: ") + env);
  }
}

struct PipelineArgs {
  std::string manifest_path;
  std::string tracks_out;
  std::string raw_tracks_out;
  std::string report_out;
  ConfigFlags flags;
};

void cmd_pipeline(const PipelineArgs& args) {
  const mv::Manifest manifest = mv::load_manifest(args.manifest_path);
  const mv::Dataset data = mv::load_dataset(manifest);
  warn_missing(data.missing);
  const mv::RunConfig cfg = args.flags.resolve();
  const mv::PipelineResult result = mv::run_pipeline(data, cfg);
  mv::save_tracks(args.tracks_out, result.tracks);
  std::cerr << result.tracks.size() << " tracks over frames " << data.frame_start << ".."
            << data.frame_end << " -> " << args.tracks_out << "\n";
  if (!args.raw_tracks_out.empty()) mv::save_tracks(args.raw_tracks_out, result.raw_tracks);

  if (!data.gt_tracks.empty()) {
    const mv::PcpReport pcp = mv::pcp_score(result.tracks, data.gt_tracks, data.skeleton, cfg.alpha);
    const mv::MotaReport mota = mv::mota_score(result.tracks, data.gt_tracks, cfg.match_threshold);
    std::cout << mv::to_table(pcp) << "\n" << mv::to_table(mota);
    if (!args.report_out.empty())
      mv::save_json(args.report_out, json{{"pcp", pcp_to_json(pcp)}, {"mota", mota_to_json(mota)}});
  } else if (!args.report_out.empty()) {
    throw mv::ConfigError("--report-out needs a manifest with gt_tracks");
  }
}

struct AssociateArgs {
  std::string manifest_path;
  std::string out;
  int frame = -1;
  bool single_frame = false;
  ConfigFlags flags;
};

void cmd_associate(const AssociateArgs& args) {
  const mv::Manifest manifest = mv::load_manifest(args.manifest_path);
  mv::Dataset data = mv::load_dataset(manifest);
  warn_missing(data.missing);
  mv::RunConfig cfg = args.flags.resolve();
  cfg.validate(mv::camera_ids(data.cameras));

  if (args.single_frame) {
    if (data.detections.find(args.frame) == data.detections.end())
      throw mv::ConfigError("frame " + std::to_string(args.frame) + " outside manifest range");
    auto only = std::map<int, std::vector<std::vector<mv::Pose2D>>>{
        {args.frame, data.detections.at(args.frame)}};
    data.detections = std::move(only);
  }

  const mv::FundamentalCache fmats(data.cameras);
  std::map<int, std::vector<mv::Pose3D>> frames;
  for (const auto& [frame, dets] : data.detections)
    frames[frame] = mv::estimate_frame(dets, data.cameras, fmats, cfg.association);
  mv::save_json(args.out, frame_poses_to_json(frames));
  std::cerr << frames.size() << " frames estimated -> " << args.out << "\n";
}

struct TrackArgs {
  std::string poses_path;
  std::string tracks_out;
  ConfigFlags flags;
};

void cmd_track(const TrackArgs& args) {
  const auto frames = frame_poses_from_json(mv::load_json(args.poses_path), args.poses_path);
  const mv::RunConfig cfg = args.flags.resolve();
  mv::Tracker tracker(cfg.tracking);
  for (const auto& [frame, poses] : frames) tracker.step(frame, poses);
  mv::save_tracks(args.tracks_out, tracker.tracks());
  std::cerr << tracker.tracks().size() << " tracks -> " << args.tracks_out << "\n";
}

struct SmoothArgs {
  std::string tracks_path;
  std::string tracks_out;
  ConfigFlags flags;
};

void cmd_smooth(const SmoothArgs& args) {
  const auto tracks = mv::load_tracks(args.tracks_path);
  const mv::RunConfig cfg = args.flags.resolve();
  std::vector<mv::Track> smoothed;
  smoothed.reserve(tracks.size());
  for (const auto& t : tracks) smoothed.push_back(mv::fill_and_smooth(t, cfg.smoothing));
  mv::save_tracks(args.tracks_out, smoothed);
  std::cerr << smoothed.size() << " tracks smoothed -> " << args.tracks_out << "\n";
}

struct EvalPcpArgs {
  std::string pred_path, gt_path, skeleton_path, report_out;
  double alpha = 0.5;
};

void cmd_eval_pcp(const EvalPcpArgs& args) {
  const auto pred = mv::load_tracks(args.pred_path);
  const auto gt = mv::load_tracks(args.gt_path);
  const auto skeleton = mv::load_skeleton(args.skeleton_path);
  const mv::PcpReport report = mv::pcp_score(pred, gt, skeleton, args.alpha);
  std::cout << mv::to_table(report);
  if (!args.report_out.empty()) mv::save_json(args.report_out, pcp_to_json(report));
}

struct EvalMotaArgs {
  std::string pred_path, gt_path, report_out;
  double match_threshold = 500.0;
};

void cmd_eval_mota(const EvalMotaArgs& args) {
  const auto pred = mv::load_tracks(args.pred_path);
  const auto gt = mv::load_tracks(args.gt_path);
  const mv::MotaReport report = mv::mota_score(pred, gt, args.match_threshold);
  std::cout << mv::to_table(report);
  if (!args.report_out.empty()) mv::save_json(args.report_out, mota_to_json(report));
}

struct SynthArgs {
  std::string out_dir;
  std::string motion = "linear_walk";
  mv::SceneSpec spec;
  bool gzip = false;
};

void cmd_synth(const SynthArgs& args) {
  mv::SceneSpec spec = args.spec;
  spec.motion = mv::motion_model_from_name(args.motion);
  spec.rng_seed = seed_with_env_override(spec.rng_seed);
  const mv::Scene scene = mv::generate_scene(spec);
  const mv::Manifest manifest = mv::write_scene(scene, args.out_dir, args.gzip);
  std::cerr << spec.n_people << " people, " << spec.n_cameras << " cameras, " << spec.n_frames
            << " frames -> " << args.out_dir << "\n";
  std::cout << (std::filesystem::path(args.out_dir) / "manifest.json").string() << "\n";
  (void)manifest;
}

struct SweepArgs {
  std::string manifest_path;
  std::string report_out;
  std::vector<double> sigmas{0.01, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 50.0};
  ConfigFlags flags;
};

void cmd_sweep_sigma(const SweepArgs& args) {
  const mv::Manifest manifest = mv::load_manifest(args.manifest_path);
  const mv::Dataset data = mv::load_dataset(manifest);
  warn_missing(data.missing);
  const auto rows = mv::sweep_sigma(data, args.flags.resolve(), args.sigmas);
  std::cout << std::setw(10) << std::left << "sigma" << "pcp\n" << std::fixed;
  json jrows = json::array();
  for (const auto& row : rows) {
    std::cout << std::setprecision(2) << std::setw(10) << std::left << row.sigma
              << std::setprecision(4) << row.pcp << "\n";
    jrows.push_back({{"sigma", row.sigma}, {"pcp", row.pcp}});
  }
  if (!args.report_out.empty()) mv::save_json(args.report_out, json{{"rows", jrows}});
}

struct PermuteArgs {
  std::string manifest_path;
  std::string report_out;
  ConfigFlags flags;
};

void cmd_permute_cameras(const PermuteArgs& args) {
  const mv::Manifest manifest = mv::load_manifest(args.manifest_path);
  const mv::Dataset data = mv::load_dataset(manifest);
  warn_missing(data.missing);
  const mv::PermutationStudy study = mv::permute_cameras(data, args.flags.resolve());

  std::cout << std::fixed << std::setprecision(4);
  json jrows = json::array();
  for (const auto& row : study.rows) {
    std::string order;
    for (std::size_t i = 0; i < row.order.size(); ++i)
      order += (i ? "," : "") + std::to_string(row.order[i]);
    std::cout << std::setw(20) << std::left << order << row.pcp << "\n";
    jrows.push_back({{"order", row.order}, {"pcp", row.pcp}});
  }
  std::cout << "mean " << study.mean << "  min " << study.min << "  max " << study.max
            << "  spread " << (study.max - study.min) << "\n";
  if (!args.report_out.empty())
    mv::save_json(args.report_out, json{{"rows", jrows},
                                        {"mean", study.mean},
                                        {"min", study.min},
                                        {"max", study.max}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-view multi-person 3D pose estimation and tracking"};
  app.require_subcommand(1);

  PipelineArgs pipeline;
  auto* cmd_pipe = app.add_subcommand("pipeline", "associate, triangulate, track, smooth");
  cmd_pipe->add_option("--manifest", pipeline.manifest_path, "dataset manifest")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_pipe->add_option("--tracks-out", pipeline.tracks_out, "output track file")->required();
  cmd_pipe->add_option("--raw-tracks-out", pipeline.raw_tracks_out,
                       "also write pre-smoothing tracks");
  cmd_pipe->add_option("--report-out", pipeline.report_out,
                       "write PCP/MOTA report JSON (needs gt_tracks)");
  pipeline.flags.attach(cmd_pipe);

  AssociateArgs assoc;
  auto* cmd_assoc = app.add_subcommand("associate", "per-frame association and triangulation");
  cmd_assoc->add_option("--manifest", assoc.manifest_path, "dataset manifest")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_assoc->add_option("--out", assoc.out, "output per-frame pose file")->required();
  auto* frame_opt = cmd_assoc->add_option("--frame", assoc.frame, "process only this frame");
  assoc.flags.attach(cmd_assoc);

  TrackArgs track;
  auto* cmd_tr = app.add_subcommand("track", "link per-frame poses into tracks");
  cmd_tr->add_option("--poses", track.poses_path, "per-frame pose file from associate")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_tr->add_option("--tracks-out", track.tracks_out, "output track file")->required();
  track.flags.attach(cmd_tr);

  SmoothArgs smooth;
  auto* cmd_sm = app.add_subcommand("smooth", "fill gaps and smooth a track file");
  cmd_sm->add_option("--tracks", smooth.tracks_path, "input track file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_sm->add_option("--tracks-out", smooth.tracks_out, "output track file")->required();
  smooth.flags.attach(cmd_sm);

  EvalPcpArgs eval_pcp;
  auto* cmd_ep = app.add_subcommand("eval-pcp", "score predicted tracks against ground truth");
  cmd_ep->add_option("--pred", eval_pcp.pred_path, "predicted track file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_ep->add_option("--gt", eval_pcp.gt_path, "ground-truth track file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_ep->add_option("--skeleton", eval_pcp.skeleton_path, "skeleton definition")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_ep->add_option("--alpha", eval_pcp.alpha, "endpoint tolerance factor");
  cmd_ep->add_option("--report-out", eval_pcp.report_out, "write report JSON");

  EvalMotaArgs eval_mota;
  auto* cmd_em = app.add_subcommand("eval-mota", "tracking accuracy against ground truth");
  cmd_em->add_option("--pred", eval_mota.pred_path, "predicted track file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_em->add_option("--gt", eval_mota.gt_path, "ground-truth track file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_em->add_option("--match-threshold", eval_mota.match_threshold, "centroid gate, mm");
  cmd_em->add_option("--report-out", eval_mota.report_out, "write report JSON");

  SynthArgs synth;
  auto* cmd_sy = app.add_subcommand("synth", "generate a synthetic dataset");
  cmd_sy->add_option("--out", synth.out_dir, "output dataset directory")->required();
  cmd_sy->add_option("--people", synth.spec.n_people, "number of people");
  cmd_sy->add_option("--cameras", synth.spec.n_cameras, "number of cameras");
  cmd_sy->add_option("--frames", synth.spec.n_frames, "number of frames");
  cmd_sy->add_option("--motion", synth.motion, "static, linear_walk, or sinusoidal_limbs");
  cmd_sy->add_option("--pixel-noise", synth.spec.pixel_noise_sigma, "detection noise std, px");
  cmd_sy->add_option("--dropout", synth.spec.joint_dropout_prob, "per-joint dropout probability");
  cmd_sy->add_option("--truncation", synth.spec.truncation_prob,
                     "per person-camera lower-body truncation probability");
  cmd_sy->add_option("--flip-prob", synth.spec.left_right_flip_prob,
                     "left/right flip probability per pose");
  cmd_sy->add_option("--flip-camera", synth.spec.flip_camera,
                     "camera index affected by flips (-1 = all)");
  cmd_sy->add_option("--face-camera", synth.spec.face_camera,
                     "turn everyone toward this camera (-1 = random headings)");
  cmd_sy->add_option("--seed", synth.spec.rng_seed, "RNG seed (MVPOSE3D_SEED overrides)");
  cmd_sy->add_flag("--gzip", synth.gzip, "gzip detection files");

  SweepArgs sweep;
  auto* cmd_sw = app.add_subcommand("sweep-sigma", "PCP for a list of smoothing sigmas");
  cmd_sw->add_option("--manifest", sweep.manifest_path, "dataset manifest with gt_tracks")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_sw->add_option("--sigmas", sweep.sigmas, "sigma values to evaluate")->delimiter(',');
  cmd_sw->add_option("--report-out", sweep.report_out, "write rows as JSON");
  sweep.flags.attach(cmd_sw);

  PermuteArgs permute;
  auto* cmd_pc = app.add_subcommand("permute-cameras", "PCP under every camera-order permutation");
  cmd_pc->add_option("--manifest", permute.manifest_path, "dataset manifest with gt_tracks")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_pc->add_option("--report-out", permute.report_out, "write rows as JSON");
  permute.flags.attach(cmd_pc);

  try {
    app.parse(argc, argv);
    assoc.single_frame = frame_opt->count() > 0;
    if (cmd_pipe->parsed()) cmd_pipeline(pipeline);
    else if (cmd_assoc->parsed()) cmd_associate(assoc);
    else if (cmd_tr->parsed()) cmd_track(track);
    else if (cmd_sm->parsed()) cmd_smooth(smooth);
    else if (cmd_ep->parsed()) cmd_eval_pcp(eval_pcp);
    else if (cmd_em->parsed()) cmd_eval_mota(eval_mota);
    else if (cmd_sy->parsed()) cmd_synth(synth);
    else if (cmd_sw->parsed()) cmd_sweep_sigma(sweep);
    else if (cmd_pc->parsed()) cmd_permute_cameras(permute);
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 4;
  } catch (const mv::SchemaError& e) {
    emit_error("schema", e.what());
    return 2;
  } catch (const mv::GeometryError& e) {
    emit_error("geometry", e.what());
    return 3;
  } catch (const mv::ConfigError& e) {
    emit_error("config", e.what());
    return 4;
  } catch (const std::invalid_argument& e) {
    emit_error("config", e.what());
    return 4;
  } catch (const std::exception& e) {
    emit_error("internal", e.what());
    return 1;
  }
}
