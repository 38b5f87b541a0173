#include "proxykit/pipeline.hpp"

#include "proxykit/cubemap.hpp"
#include "proxykit/errors.hpp"
#include "proxykit/fusion.hpp"
#include "proxykit/generator.hpp"
#include "proxykit/losses.hpp"
#include "proxykit/renderer.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <sstream>

namespace proxykit {

using nlohmann::json;

namespace {

using Setter = std::function<void(const json&)>;

void read_object(const json& j, const std::string& where, const std::map<std::string, Setter>& fields) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    const auto it = fields.find(key);
    if (it == fields.end()) throw ParseError(where + ": unknown key '" + key + "'");
    try {
      it->second(value);
    } catch (const json::exception& e) {
      throw ParseError(where + "." + key + ": " + e.what());
    }
  }
}

template <class T>
Setter into(T& field) {
  return [&field](const json& v) { field = v.get<T>(); };
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::filesystem::path& p) {
  return p.empty() || p.is_absolute() || base.empty() ? p : base / p;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

json pose_json(const CameraPose& p) {
  const Quat& q = p.rotation;
  return {{"position", {round_sig9(p.position.x()), round_sig9(p.position.y()), round_sig9(p.position.z())}},
          {"quaternion", {round_sig9(q.w()), round_sig9(q.x()), round_sig9(q.y()), round_sig9(q.z())}}};
}

ImageD semantic_rgb(const SemanticImage& sem) {
  ImageD out(sem.width(), sem.height(), 3, 0.0);
  for (std::size_t i = 0; i < sem.pixel_count(); ++i) {
    const Rgb8 c = semantic_color(sem.data()[i]);
    out.data()[i * 3 + 0] = c.r / 255.0;
    out.data()[i * 3 + 1] = c.g / 255.0;
    out.data()[i * 3 + 2] = c.b / 255.0;
  }
  return out;
}

DepthFrame render_frame(const ProxyScene& scene, const Intrinsics& intr, const CameraPose& pose) {
  RenderOutput r = scene.render({intr, pose, kChannelDepth | kChannelSemantic | kChannelInstance});
  DepthFrame f{std::move(*r.depth), intr, pose, semantic_rgb(*r.semantic), std::move(*r.semantic), std::move(*r.instance)};
  return f;
}

/// Tracks written files and stage progress for the manifest.
class Run {
 public:
  explicit Run(std::filesystem::path out) : out_(std::move(out)) {}

  std::filesystem::path path(const std::string& rel) const {
    const auto p = out_ / rel;
    std::filesystem::create_directories(p.parent_path());
    return p;
  }
  void add(const std::string& rel) { artifacts_.push_back(rel); }
  void text(const std::string& rel, const std::string& content) {
    write_text(path(rel), content);
    add(rel);
  }
  void stage(const std::string& name) { current_ = name; }
  void done() { completed_.push_back(current_); }

  json frames = json::array();

  std::filesystem::path write_manifest(bool complete) const {
    std::vector<std::string> sorted = artifacts_;
    std::sort(sorted.begin(), sorted.end());
    json arts = json::array();
    for (const auto& rel : sorted) {
      const auto p = out_ / rel;
      arts.push_back({{"path", rel}, {"sha256", sha256_file(p)}, {"bytes", std::filesystem::file_size(p)}});
    }
    json m = {{"complete", complete},
              {"stages_completed", completed_},
              {"artifacts", arts},
              {"frame_count", frames.size()},
              {"frames", frames}};
    if (!complete) m["failed_stage"] = current_;
    const auto p = out_ / "manifest.json";
    write_text(p, m.dump(2) + "\n");
    return p;
  }

 private:
  std::filesystem::path out_;
  std::vector<std::string> artifacts_;
  std::vector<std::string> completed_;
  std::string current_;
};

}  // namespace

PipelineConfig parse_pipeline_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed config JSON: ") + e.what());
  }
  PipelineConfig c;
  std::string layout, output_dir, replay_dir;
  PlannerConfig& p = c.planner;
  ScheduleConfig& s = c.schedule;
  read_object(j, "config",
              {{"layout", into(layout)},
               {"seed", into(c.seed)},
               {"output_dir", into(output_dir)},
               {"room", into(c.room)},
               {"planner",
                [&](const json& v) {
                  read_object(v, "planner",
                              {{"n_quadrants", into(p.n_quadrants)},
                               {"sparse_count", into(p.sparse_count)},
                               {"min_clearance_m", into(p.min_clearance_m)},
                               {"frames_per_traj", into(p.frames_per_traj)},
                               {"camera_height_m", into(p.camera_height_m)},
                               {"radius_fraction", into(p.radius_fraction)},
                               {"fov_deg", into(p.fov_deg)},
                               {"image_size", into(p.image_size)},
                               {"probe_size", into(p.probe_size)},
                               {"max_retries", into(p.max_retries)},
                               {"retry_shrink", into(p.retry_shrink)},
                               {"panorama_views", into(p.panorama_views)},
                               {"max_pitch_deg", into(p.max_pitch_deg)}});
                }},
               {"schedule",
                [&](const json& v) {
                  read_object(v, "schedule",
                              {{"theta_min", into(s.theta_min)},
                               {"theta_max", into(s.theta_max)},
                               {"clamp_min", into(s.clamp_min)},
                               {"clamp_max", into(s.clamp_max)},
                               {"resolutions", into(s.resolutions)},
                               {"frames_evaluated", into(s.frames_evaluated)},
                               {"eval_size", into(s.eval_size)}});
                }},
               {"oracle",
                [&](const json& v) {
                  read_object(v, "oracle",
                              {{"kind", into(c.oracle.kind)},
                               {"true_scale", into(c.oracle.true_scale)},
                               {"replay_dir", into(replay_dir)}});
                }},
               {"fusion",
                [&](const json& v) {
                  read_object(v, "fusion",
                              {{"voxel_size", into(c.fusion.voxel_size)},
                               {"stride", into(c.fusion.stride)},
                               {"render_size", into(c.fusion.render_size)}});
                }},
               {"guidance", [&](const json& v) {
                  read_object(v, "guidance",
                              {{"face_size", into(c.guidance.face_size)}, {"face_fov_deg", into(c.guidance.face_fov_deg)}});
                }}});
  if (c.oracle.kind != "synthetic" && c.oracle.kind != "replay")
    throw ParseError("config.oracle.kind: expected 'synthetic' or 'replay'");
  c.layout = resolve(base_dir, layout);
  if (!output_dir.empty()) c.output_dir = resolve(base_dir, output_dir);
  c.oracle.replay_dir = resolve(base_dir, replay_dir);
  try {
    c.planner.check();
    c.schedule.check();
  } catch (const DimensionError& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  if (c.fusion.stride < 1 || c.fusion.render_size < 1 || c.guidance.face_size < 1 || !(c.guidance.face_fov_deg >= 90.0))
    throw ParseError("config: invalid fusion or guidance settings");
  return c;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  return parse_pipeline_config(read_text(path), path.parent_path());
}

std::string sha256_file(const std::filesystem::path& path) {
  const std::string bytes = read_text(path);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || !EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) ||
      !EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) || !EVP_DigestFinal_ex(ctx.get(), digest, &len))
    throw IoError("SHA-256 failed for " + path.string());
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const IoError*>(&e)) return 1;
  if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const ParseError*>(&e)) return 2;
  if (dynamic_cast<const NoValidPoses*>(&e) || dynamic_cast<const DegenerateRoom*>(&e)) return 3;
  if (dynamic_cast<const OracleFailure*>(&e)) return 4;
  if (dynamic_cast<const std::filesystem::filesystem_error*>(&e)) return 1;
  return 5;
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
  if (!cfg.layout.empty() && !std::filesystem::exists(cfg.layout)) throw IoError("layout not found: " + cfg.layout.string());
  if (cfg.oracle.kind == "replay" && !std::filesystem::is_directory(cfg.oracle.replay_dir))
    throw IoError("replay directory not found: " + cfg.oracle.replay_dir.string());
  std::filesystem::create_directories(cfg.output_dir);
  Run run(cfg.output_dir);

  try {
    run.stage("layout");
    const SceneLayout layout = cfg.layout.empty() ? generate_layout(cfg.seed) : load_layout(cfg.layout);
    validate_layout(layout);
    if (cfg.room < 0 || cfg.room >= static_cast<int>(layout.rooms.size()))
      throw ValidationError("room index out of range", "room " + std::to_string(cfg.room));
    const Room& room = layout.rooms[cfg.room];
    run.text("layout.json", serialize_layout(layout));
    const auto scene = std::make_shared<const ProxyScene>(layout);
    const Vec2 c2 = area_centroid(room.floor_polygon);
    const double eye = std::min(room.floor_z + cfg.planner.camera_height_m, room.ceiling_z - cfg.planner.min_clearance_m);
    const Vec3 center(c2.x(), c2.y(), eye);
    run.done();

    run.stage("guidance");
    const CubemapRig rig{center, 0.0, cfg.guidance.face_fov_deg};
    const CubemapRender cube = scene->render_cubemap(rig, cfg.guidance.face_size, kChannelDepth | kChannelSemantic);
    const Cubemap<double> xyz = xyz_positional_encoding(rig, cfg.guidance.face_size);
    for (int f = 0; f < kCubeFaces; ++f) {
      const std::string sfx(face_suffix(f));
      write_pfm(cube.depth->faces[f], run.path("guidance/depth_" + sfx + ".pfm"));
      run.add("guidance/depth_" + sfx + ".pfm");
      write_png(depth_preview(cube.depth->faces[f], 10.0), run.path("guidance/depth_" + sfx + ".png"));
      run.add("guidance/depth_" + sfx + ".png");
      write_semantic_png(cube.semantic->faces[f], run.path("guidance/semantic_" + sfx + ".png"));
      run.add("guidance/semantic_" + sfx + ".png");
      write_pfm(xyz.faces[f], run.path("guidance/xyz_" + sfx + ".pfm"));
      run.add("guidance/xyz_" + sfx + ".pfm");
    }
    run.done();

    run.stage("initial_views");
    const std::vector<RenderTarget> initial = initial_panorama_views(center, cfg.planner);
    json initial_json = json::array();
    for (std::size_t k = 0; k < initial.size(); ++k) {
      const RenderOutput r = scene->render(initial[k]);
      const std::string stem = "views/initial_" + std::to_string(k);
      write_pfm(*r.depth, run.path(stem + "_depth.pfm"));
      run.add(stem + "_depth.pfm");
      write_semantic_png(*r.semantic, run.path(stem + "_semantic.png"));
      run.add(stem + "_semantic.png");
      initial_json.push_back(pose_json(initial[k].pose));
    }
    run.text("views/initial_views.json", initial_json.dump(2) + "\n");
    run.done();

    run.stage("planning");
    std::vector<Trajectory> trajectories;
    for (const Quadrant& q : partition_quadrants(layout, cfg.room))
      trajectories.push_back(plan_trajectory(*scene, room, q, cfg.planner));
    for (const auto& t : trajectories)
      run.text("trajectories/traj_" + std::to_string(t.quadrant_id) + ".json", trajectory_to_json(t));
    const std::vector<RenderTarget> pano = sample_panorama_training_views(center, cfg.planner.panorama_views, cfg.planner);
    json pano_json = json::array();
    for (std::size_t i = 0; i < pano.size(); ++i) {
      json e = pose_json(pano[i].pose);
      e["frame"] = i;
      e["fov_deg"] = pano[i].intrinsics.fov_deg;
      e["width"] = pano[i].intrinsics.width;
      e["height"] = pano[i].intrinsics.height;
      pano_json.push_back(e);
    }
    run.text("panorama_views.json", pano_json.dump(2) + "\n");
    run.done();

    run.stage("alignment");
    std::unique_ptr<NvsOracle> oracle;
    if (cfg.oracle.kind == "synthetic") {
      oracle = std::make_unique<SyntheticOracle>(scene, cfg.oracle.true_scale);
    } else {
      oracle = std::make_unique<DirectoryReplayOracle>(cfg.oracle.replay_dir);
    }
    const ProxyDepthReference reference(scene);
    json alignment = json::array();
    std::vector<CameraPose> all_target, all_estimated;
    for (const auto& t : trajectories) {
      const SearchTrace trace = bisection_search(*oracle, t, reference, cfg.schedule);
      run.text("alignment/trace_" + std::to_string(t.quadrant_id) + ".json", trace.to_json());
      alignment.push_back({{"trajectory", t.quadrant_id},
                           {"theta_star", trace.theta_star},
                           {"loss_star", trace.loss_star},
                           {"evaluations", trace.evaluations}});
      if (cfg.oracle.kind == "synthetic") {
        // Camera path the generator would follow at the selected scale.
        Vec3 c = Vec3::Zero();
        for (const auto& p : t.poses) c += p.position;
        c /= static_cast<double>(t.poses.size());
        const double s = trace.theta_star / cfg.oracle.true_scale;
        for (const auto& p : t.poses) {
          all_target.push_back(p);
          all_estimated.emplace_back(p.rotation, c + s * (p.position - c));
        }
      }
    }
    run.done();

    run.stage("fusion");
    const Intrinsics fusion_intr = cfg.planner.intrinsics().resized(cfg.fusion.render_size, cfg.fusion.render_size);
    std::vector<CameraPose> frame_poses;
    for (const auto& t : trajectories) {
      for (int i = 0; i < t.frame_count(); ++i) {
        json e = pose_json(t.poses[i]);
        e["index"] = run.frames.size();
        e["source"] = "nvs";
        e["trajectory"] = t.quadrant_id;
        e["frame"] = i;
        run.frames.push_back(e);
        frame_poses.push_back(t.poses[i]);
      }
    }
    for (std::size_t i = 0; i < pano.size(); ++i) {
      json e = pose_json(pano[i].pose);
      e["index"] = run.frames.size();
      e["source"] = "panorama";
      e["frame"] = i;
      run.frames.push_back(e);
      frame_poses.push_back(pano[i].pose);
    }
    std::vector<DepthFrame> frames;
    frames.reserve(frame_poses.size());
    for (const auto& pose : frame_poses) frames.push_back(render_frame(*scene, fusion_intr, pose));
    const PointCloud cloud = fuse_frames(frames, cfg.fusion.stride, cfg.fusion.voxel_size);
    frames.clear();
    write_ply(cloud, run.path("fused.ply"));
    run.add("fused.ply");
    run.done();

    run.stage("metrics");
    json metrics;
    metrics["alignment"] = alignment;
    if (!all_target.empty()) {
      const AlignmentReport pr = verify_alignment(all_target, all_estimated);
      metrics["pose_errors"] = {{"translation_rmse_m", pr.translation_rmse},
                                {"translation_median_m", pr.translation_median},
                                {"rotation_rmse_deg", pr.rotation_rmse_deg},
                                {"rotation_median_deg", pr.rotation_median_deg}};
      metrics["true_scale"] = cfg.oracle.true_scale;
    } else {
      metrics["pose_errors"] = nullptr;
    }
    std::vector<CameraPose> eval_poses;
    for (const auto& t : initial) eval_poses.push_back(t.pose);
    const DepthErrorReport dr = depth_alignment_report(layout, cloud, eval_poses, fusion_intr);
    metrics["depth"] = {{"rmse_m", dr.rmse_m}, {"abs_rel", dr.abs_rel}, {"pixels", dr.pixels}};

    const DepthFrame view = render_frame(*scene, fusion_intr, eval_poses.front());
    const MaskedLoss l_depth =
        masked_depth_loss(rasterize_points(cloud, fusion_intr, view.pose), view.depth, mask_from_semantics(*view.semantic));
    const double l_3dgs = loss_3dgs(*view.color, rasterize_point_colors(cloud, fusion_intr, view.pose));
    PointCloud guidance_cloud;
    for (int f = 0; f < kCubeFaces; ++f) {
      const DepthFrame gf{cube.depth->faces[f], rig.face_intrinsics(cfg.guidance.face_size), rig.face_pose(f), {}, {}, {}};
      guidance_cloud.append(backproject(gf, 4));
    }
    const double l_nn = nn_loss(guidance_cloud.positions, cloud);
    const TotalLoss total = total_loss({l_3dgs, std::nullopt, l_nn, l_depth.value});
    metrics["losses"] = {{"l_3dgs", l_3dgs},
                         {"l_nn", l_nn},
                         {"l_depth", l_depth.value},
                         {"l_depth_empty_mask", l_depth.empty_mask},
                         {"total", total.value},
                         {"l_geom_missing", total.geom_missing}};
    metrics["frame_count"] = run.frames.size();
    metrics["point_count"] = cloud.size();
    run.text("metrics.json", metrics.dump(2) + "\n");
    run.done();
  } catch (...) {
    run.write_manifest(false);
    throw;
  }
  return {run.write_manifest(true), static_cast<int>(run.frames.size())};
}

}  // namespace proxykit
