#pragma once

#include "proxykit/planner.hpp"
#include "proxykit/scale_align.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace proxykit {

struct OracleConfig {
  std::string kind = "synthetic";  // "synthetic" or "replay"
  double true_scale = 1.3;
  std::filesystem::path replay_dir;
};

struct FusionConfig {
  double voxel_size = 0.01;
  int stride = 2;
  int render_size = 128;  // square render size of every fused frame
};

struct GuidanceConfig {
  int face_size = 256;
  double face_fov_deg = 95.0;
};

/// Everything a pipeline run depends on. Relative paths resolve against
/// the directory of the config file.
struct PipelineConfig {
  std::filesystem::path layout;  // empty: generate from `seed`
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "proxykit_out";
  int room = 0;
  PlannerConfig planner;
  ScheduleConfig schedule;
  OracleConfig oracle;
  FusionConfig fusion;
  GuidanceConfig guidance;
};

/// Throws ParseError on malformed JSON, unknown keys or wrong types.
PipelineConfig parse_pipeline_config(const std::string& json_text,
                                     const std::filesystem::path& base_dir = {});
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

struct PipelineResult {
  std::filesystem::path manifest;
  int frame_count = 0;
};

/// Runs every stage and writes `manifest.json` into the output directory.
/// When a stage throws, the manifest is still written with "complete": false
/// and the failing stage named, then the error propagates.
PipelineResult run_pipeline(const PipelineConfig& cfg);

/// Process exit status for an error: 1 I/O, 2 validation or parsing,
/// 3 planning, 4 alignment, 5 anything else.
int exit_code_for(const std::exception& e);

}  // namespace proxykit
