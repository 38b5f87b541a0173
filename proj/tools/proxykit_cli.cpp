// Command-line front end. Exit status: 0 ok, 1 I/O, 2 validation,
// 3 planning, 4 alignment, 5 other.

#include "proxykit/errors.hpp"
#include "proxykit/expansion.hpp"
#include "proxykit/fusion.hpp"
#include "proxykit/generator.hpp"
#include "proxykit/losses.hpp"
#include "proxykit/parallel.hpp"
#include "proxykit/pipeline.hpp"
#include "proxykit/renderer.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

using namespace proxykit;
using nlohmann::json;

namespace {

struct Globals {
  std::string config;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string out;
};

std::filesystem::path require_out(const Globals& g) {
  if (g.out.empty()) throw IoError("--out is required");
  return g.out;
}

void emit(const json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw IoError("cannot write " + out);
  f << text;
}

PointCloud render_trajectory_cloud(const ProxyScene& scene, const std::vector<Trajectory>& trajs, int size, int stride,
                                   double voxel) {
  std::vector<DepthFrame> frames;
  for (const auto& t : trajs) {
    const Intrinsics intr = t.intrinsics.resized(size, size);
    for (const auto& pose : t.poses) {
      RenderOutput r = scene.render({intr, pose, kChannelDepth | kChannelSemantic | kChannelInstance});
      frames.push_back({std::move(*r.depth), intr, pose, std::nullopt, std::move(*r.semantic), std::move(*r.instance)});
    }
  }
  return fuse_frames(frames, stride, voxel);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"proxykit: proxy-layout rendering, planning, alignment and fusion"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "Pipeline config JSON");
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--threads", g.threads, "Worker thread cap (0 = all cores)");
  app.add_option("--out", g.out, "Output file or directory");

  std::function<void()> action;

  auto* gen = app.add_subcommand("generate", "Generate a random single-room layout");
  gen->fallthrough();
  gen->callback([&] {
    action = [&] {
      save_layout(generate_layout(g.seed), require_out(g));
    };
  });

  std::string validate_path;
  auto* val = app.add_subcommand("validate", "Validate a layout file");
  val->fallthrough();
  val->add_option("layout", validate_path)->required();
  val->callback([&] {
    action = [&] {
      validate_layout(load_layout(validate_path));
      std::cout << "ok: " << validate_path << "\n";
    };
  });

  std::string layout_path, traj_path;
  int face_size = 256, room_index = 0;
  double face_fov = 95.0;
  std::vector<double> center;
  auto* ren = app.add_subcommand("render", "Render guidance cubemap or trajectory frames");
  ren->fallthrough();
  ren->add_option("--layout", layout_path)->required();
  ren->add_option("--trajectory", traj_path, "Render every frame of this trajectory instead");
  ren->add_option("--face-size", face_size);
  ren->add_option("--face-fov", face_fov);
  ren->add_option("--center", center, "Cubemap center x y z")->expected(3);
  ren->add_option("--room", room_index);
  ren->callback([&] {
    action = [&] {
      const auto out = require_out(g);
      std::filesystem::create_directories(out);
      const SceneLayout layout = load_layout(layout_path);
      const ProxyScene scene(layout);
      if (!traj_path.empty()) {
        const Trajectory t = load_trajectory(traj_path);
        for (int i = 0; i < t.frame_count(); ++i) {
          const RenderOutput r = scene.render({t.intrinsics, t.poses[i], kChannelDepth | kChannelSemantic});
          char stem[32];
          std::snprintf(stem, sizeof stem, "frame_%03d", i);
          write_pfm(*r.depth, out / (std::string(stem) + "_depth.pfm"));
          write_semantic_png(*r.semantic, out / (std::string(stem) + "_semantic.png"));
        }
        return;
      }
      Vec3 c;
      if (center.size() == 3) {
        c = Vec3(center[0], center[1], center[2]);
      } else {
        if (room_index < 0 || room_index >= static_cast<int>(layout.rooms.size())) throw UnknownId("room out of range");
        const Room& room = layout.rooms[room_index];
        const Vec2 a = area_centroid(room.floor_polygon);
        c = Vec3(a.x(), a.y(), std::min(room.floor_z + 1.5, room.ceiling_z - 0.3));
      }
      const CubemapRig rig{c, 0.0, face_fov};
      const CubemapRender cube = scene.render_cubemap(rig, face_size, kChannelDepth | kChannelSemantic);
      const Cubemap<double> xyz = xyz_positional_encoding(rig, face_size);
      for (int f = 0; f < kCubeFaces; ++f) {
        const std::string sfx(face_suffix(f));
        write_pfm(cube.depth->faces[f], out / ("depth_" + sfx + ".pfm"));
        write_png(depth_preview(cube.depth->faces[f], 10.0), out / ("depth_" + sfx + ".png"));
        write_semantic_png(cube.semantic->faces[f], out / ("semantic_" + sfx + ".png"));
        write_pfm(xyz.faces[f], out / ("xyz_" + sfx + ".pfm"));
      }
    };
  });

  auto* plan = app.add_subcommand("plan", "Plan the four quadrant trajectories of a room");
  plan->fallthrough();
  plan->add_option("--layout", layout_path)->required();
  plan->add_option("--room", room_index);
  plan->callback([&] {
    action = [&] {
      const auto out = require_out(g);
      std::filesystem::create_directories(out);
      const PlannerConfig cfg = g.config.empty() ? PlannerConfig{} : load_pipeline_config(g.config).planner;
      for (const auto& t : plan_room(load_layout(layout_path), room_index, cfg))
        save_trajectory(t, out / ("traj_" + std::to_string(t.quadrant_id) + ".json"));
    };
  });

  std::string oracle_kind = "synthetic", replay_dir;
  double true_scale = 1.3;
  auto* align = app.add_subcommand("align", "Search the camera scale of a trajectory");
  align->fallthrough();
  align->add_option("--layout", layout_path)->required();
  align->add_option("--trajectory", traj_path)->required();
  align->add_option("--oracle", oracle_kind)->check(CLI::IsMember({"synthetic", "replay"}));
  align->add_option("--true-scale", true_scale);
  align->add_option("--replay-dir", replay_dir);
  align->callback([&] {
    action = [&] {
      const ScheduleConfig sched = g.config.empty() ? ScheduleConfig{} : load_pipeline_config(g.config).schedule;
      const SceneLayout layout = load_layout(layout_path);
      const auto scene = std::make_shared<const ProxyScene>(layout);
      std::unique_ptr<NvsOracle> oracle;
      if (oracle_kind == "synthetic") {
        oracle = std::make_unique<SyntheticOracle>(scene, true_scale);
      } else {
        if (!std::filesystem::is_directory(replay_dir)) throw IoError("replay directory not found: " + replay_dir);
        oracle = std::make_unique<DirectoryReplayOracle>(replay_dir);
      }
      const SearchTrace trace = bisection_search(*oracle, load_trajectory(traj_path), ProxyDepthReference(scene), sched);
      emit(json::parse(trace.to_json()), g.out);
    };
  });

  std::vector<std::string> traj_paths;
  int render_size = 128, stride = 2;
  double voxel = 0.01;
  auto* fuse = app.add_subcommand("fuse", "Render trajectory frames and fuse them into a PLY cloud");
  fuse->fallthrough();
  fuse->add_option("--layout", layout_path)->required();
  fuse->add_option("--trajectory", traj_paths)->required();
  fuse->add_option("--render-size", render_size);
  fuse->add_option("--stride", stride);
  fuse->add_option("--voxel", voxel);
  fuse->callback([&] {
    action = [&] {
      const ProxyScene scene(load_layout(layout_path));
      std::vector<Trajectory> trajs;
      for (const auto& p : traj_paths) trajs.push_back(load_trajectory(p));
      write_ply(render_trajectory_cloud(scene, trajs, render_size, stride, voxel), require_out(g));
    };
  });

  std::string image_a, image_b, depth_rd, depth_gt, semantic_png, means_ply, ref_ply;
  double lambda = 0.2;
  auto* losses = app.add_subcommand("losses", "Evaluate reconstruction loss terms on files");
  losses->fallthrough();
  losses->add_option("--image", image_a, "Target image (PFM)");
  losses->add_option("--rendered", image_b, "Rendered image (PFM)");
  losses->add_option("--lambda", lambda);
  losses->add_option("--depth-rendered", depth_rd, "Rendered depth (PFM)");
  losses->add_option("--depth-reference", depth_gt, "Proxy depth (PFM)");
  losses->add_option("--semantic", semantic_png, "Proxy semantic render (PNG) for the supervision mask");
  losses->add_option("--means", means_ply, "Gaussian means (PLY)");
  losses->add_option("--reference", ref_ply, "Reference cloud (PLY)");
  losses->callback([&] {
    action = [&] {
      LossParts parts;
      json j;
      if (!image_a.empty() && !image_b.empty()) j["l_3dgs"] = parts.l_3dgs = loss_3dgs(read_pfm(image_a), read_pfm(image_b), lambda);
      if (!depth_rd.empty() && !depth_gt.empty()) {
        const ImageD rd = read_pfm(depth_rd);
        const Mask m = semantic_png.empty() ? Mask(rd.width(), rd.height(), 1, 1) : mask_from_semantics(read_semantic_png(semantic_png));
        const MaskedLoss l = masked_depth_loss(rd, read_pfm(depth_gt), m);
        j["l_depth"] = parts.l_depth = l.value;
        j["l_depth_empty_mask"] = l.empty_mask;
      }
      if (!means_ply.empty() && !ref_ply.empty())
        j["l_nn"] = parts.l_nn = nn_loss(read_ply(means_ply).positions, read_ply(ref_ply));
      const TotalLoss total = total_loss(parts);
      j["total"] = total.value;
      j["l_geom_missing"] = total.geom_missing;
      emit(j, g.out);
    };
  });

  std::string target_path, estimated_path, cloud_path;
  auto* metrics = app.add_subcommand("metrics", "Pose and depth alignment errors");
  metrics->fallthrough();
  metrics->add_option("--target", target_path, "Target trajectory JSON");
  metrics->add_option("--estimated", estimated_path, "Estimated trajectory JSON");
  metrics->add_option("--layout", layout_path);
  metrics->add_option("--cloud", cloud_path, "Reconstruction cloud (PLY)");
  metrics->add_option("--trajectory", traj_path, "Evaluation poses for the depth report");
  metrics->callback([&] {
    action = [&] {
      json j;
      if (!target_path.empty() && !estimated_path.empty()) {
        const Trajectory a = load_trajectory(target_path), b = load_trajectory(estimated_path);
        const AlignmentReport r = verify_alignment(a.poses, b.poses);
        j["pose_errors"] = {{"translation_rmse_m", r.translation_rmse},
                            {"translation_median_m", r.translation_median},
                            {"rotation_rmse_deg", r.rotation_rmse_deg},
                            {"rotation_median_deg", r.rotation_median_deg}};
      }
      if (!layout_path.empty() && !cloud_path.empty() && !traj_path.empty()) {
        const Trajectory t = load_trajectory(traj_path);
        const DepthErrorReport r = depth_alignment_report(load_layout(layout_path), read_ply(cloud_path), t.poses, t.intrinsics);
        j["depth"] = {{"rmse_m", r.rmse_m}, {"abs_rel", r.abs_rel}, {"pixels", r.pixels}};
      }
      emit(j, g.out);
    };
  });

  auto* pipe = app.add_subcommand("pipeline", "Run every stage from a config file");
  pipe->fallthrough();
  pipe->callback([&] {
    action = [&] {
      if (g.config.empty()) throw IoError("--config is required");
      PipelineConfig cfg = load_pipeline_config(g.config);
      if (!g.out.empty()) cfg.output_dir = g.out;
      if (app.count("--seed") > 0) cfg.seed = g.seed;
      const PipelineResult r = run_pipeline(cfg);
      std::cout << "manifest: " << r.manifest.string() << " (" << r.frame_count << " frames)\n";
    };
  });

  std::string base_path, addition_path;
  std::uint32_t connector_id = 0;
  auto* exp = app.add_subcommand("expand", "Merge an addition layout through a dangling connector");
  exp->fallthrough();
  exp->add_option("--base", base_path)->required();
  exp->add_option("--addition", addition_path)->required();
  exp->add_option("--connector", connector_id)->required();
  exp->callback([&] {
    action = [&] {
      save_layout(expand_layout(load_layout(base_path), load_layout(addition_path), connector_id), require_out(g));
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    set_thread_limit(g.threads);
    action();
  } catch (const ValidationError& e) {
    std::cerr << "validation failed: " << e.reason() << " [" << e.entity() << "]\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return 0;
}
