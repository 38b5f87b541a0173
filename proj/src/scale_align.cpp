#include "proxykit/scale_align.hpp"

#include "proxykit/errors.hpp"
#include "proxykit/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>

namespace proxykit {

namespace {

std::vector<ImageD> render_depths(const ProxyScene& scene, const Trajectory& traj,
                                  const std::function<Vec3(std::size_t)>& position) {
  std::vector<ImageD> out(traj.poses.size());
  for (std::size_t i = 0; i < traj.poses.size(); ++i) {
    const CameraPose pose(traj.poses[i].rotation, position(i));
    out[i] = std::move(*scene.render({traj.intrinsics, pose, kChannelDepth}).depth);
  }
  return out;
}

Vec3 centroid(const Trajectory& traj) {
  Vec3 c = Vec3::Zero();
  for (const auto& p : traj.poses) c += p.position;
  return traj.poses.empty() ? c : Vec3(c / static_cast<double>(traj.poses.size()));
}

bool valid_depth(double d) { return std::isfinite(d) && d > 0.0; }

}  // namespace

std::vector<ImageD> ProxyDepthReference::render(const Trajectory& trajectory) const {
  return render_depths(*scene_, trajectory, [&](std::size_t i) { return trajectory.poses[i].position; });
}

SyntheticOracle::SyntheticOracle(const SceneLayout& layout, double true_scale)
    : SyntheticOracle(std::make_shared<ProxyScene>(layout), true_scale) {}

SyntheticOracle::SyntheticOracle(std::shared_ptr<const ProxyScene> scene, double true_scale)
    : scene_(std::move(scene)), true_scale_(true_scale) {
  if (!(true_scale > 0.0) || !std::isfinite(true_scale)) throw DimensionError("synthetic oracle: true scale must be positive");
}

std::vector<ImageD> SyntheticOracle::generate(double theta, const Trajectory& trajectory) const {
  const Vec3 c = centroid(trajectory);
  const double s = theta / true_scale_;
  return render_depths(*scene_, trajectory, [&](std::size_t i) { return Vec3(c + s * (trajectory.poses[i].position - c)); });
}

std::filesystem::path DirectoryReplayOracle::frame_path(const std::filesystem::path& dir, double theta, int frame) {
  char sub[64], name[64];
  std::snprintf(sub, sizeof sub, "theta_%.4f", theta);
  std::snprintf(name, sizeof name, "depth_%03d.pfm", frame);
  return dir / sub / name;
}

std::vector<ImageD> DirectoryReplayOracle::generate(double theta, const Trajectory& trajectory) const {
  std::vector<ImageD> out;
  for (int i = 0; i < trajectory.frame_count(); ++i) {
    const auto path = frame_path(dir_, theta, i);
    if (!std::filesystem::exists(path)) throw OracleFailure("replay oracle: missing " + path.string(), theta);
    out.push_back(read_pfm(path));
  }
  return out;
}

void ScheduleConfig::check() const {
  if (!(theta_min < theta_max)) throw DimensionError("schedule: theta_min must be < theta_max");
  if (!(clamp_min <= theta_min && theta_max <= clamp_max)) throw DimensionError("schedule: interval outside clamp bounds");
  if (resolutions.empty()) throw DimensionError("schedule: empty resolution list");
  for (std::size_t i = 0; i < resolutions.size(); ++i) {
    if (!(resolutions[i] > 0.0)) throw DimensionError("schedule: resolutions must be positive");
    if (i > 0 && !(resolutions[i] > resolutions[i - 1])) throw DimensionError("schedule: resolutions must increase");
  }
  if (frames_evaluated < 1 || eval_size < 0) throw DimensionError("schedule: invalid frame settings");
}

std::string SearchTrace::to_json() const {
  nlohmann::json levels_json = nlohmann::json::array();
  for (const auto& lv : levels) {
    levels_json.push_back({{"resolution", lv.resolution},
                           {"candidates", lv.candidates},
                           {"losses", lv.losses},
                           {"selected", lv.selected},
                           {"selected_loss", lv.selected_loss}});
  }
  const nlohmann::json j = {
      {"levels", levels_json}, {"theta_star", theta_star}, {"loss_star", loss_star}, {"evaluations", evaluations}};
  return j.dump(2) + "\n";
}

double depth_alignment_loss(std::span<const ImageD> generated, std::span<const ImageD> reference) {
  if (generated.size() != reference.size() || generated.empty())
    throw ShapeMismatch("depth_alignment_loss: frame counts differ or are zero");
  double sum = 0.0;
  int frames = 0;
  for (std::size_t f = 0; f < generated.size(); ++f) {
    const ImageD& a = generated[f];
    const ImageD& b = reference[f];
    if (!a.same_shape(b) || a.channels() != 1) throw ShapeMismatch("depth_alignment_loss: frame dimensions differ");
    double frame_sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
      const double x = a.data()[i], y = b.data()[i];
      if (!valid_depth(x) || !valid_depth(y)) continue;
      frame_sum += std::abs(x - y);
      ++n;
    }
    if (n == 0) continue;
    sum += frame_sum / static_cast<double>(n);
    ++frames;
  }
  return frames == 0 ? kInf : sum / frames;
}

SearchTrace coarse_to_fine_search(const std::function<double(double)>& loss, const ScheduleConfig& cfg,
                                  bool concurrent) {
  cfg.check();
  const double l = cfg.theta_max - cfg.theta_min;
  std::map<double, double> memo;
  const auto lookup = [&](double theta) -> const double* {
    auto it = memo.lower_bound(theta - 1e-12);
    return it != memo.end() && std::abs(it->first - theta) <= 1e-12 ? &it->second : nullptr;
  };

  SearchTrace trace;
  double best = 0.0, best_loss = kInf;
  bool have_best = false;
  for (std::size_t k = 0; k < cfg.resolutions.size(); ++k) {
    std::vector<double> cand;
    if (k == 0) {
      cand = {cfg.theta_min, cfg.theta_max};
    } else {
      const double step = l / cfg.resolutions[k];
      for (double c : {best - step, best, best + step}) cand.push_back(std::clamp(c, cfg.clamp_min, cfg.clamp_max));
    }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end(), [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
               cand.end());

    std::vector<double> fresh;
    for (double c : cand)
      if (!lookup(c)) fresh.push_back(c);
    std::vector<double> fresh_loss(fresh.size());
    if (concurrent && fresh.size() > 1) {
      parallel_for(fresh.size(), [&](std::size_t i) { fresh_loss[i] = loss(fresh[i]); });
    } else {
      for (std::size_t i = 0; i < fresh.size(); ++i) fresh_loss[i] = loss(fresh[i]);
    }
    for (std::size_t i = 0; i < fresh.size(); ++i) {
      if (std::isnan(fresh_loss[i])) throw OracleFailure("loss is NaN", fresh[i]);
      memo.emplace(fresh[i], fresh_loss[i]);
    }
    trace.evaluations += static_cast<int>(fresh.size());

    SearchLevel level;
    level.resolution = cfg.resolutions[k];
    level.candidates = cand;
    for (double c : cand) level.losses.push_back(*lookup(c));
    // Best over everything evaluated so far; ascending order makes ties pick the smaller theta.
    for (const auto& [theta, value] : memo) {
      if (!have_best || value < best_loss || (value == best_loss && theta < best)) {
        best = theta;
        best_loss = value;
        have_best = true;
      }
    }
    level.selected = best;
    level.selected_loss = best_loss;
    trace.levels.push_back(std::move(level));
  }
  trace.theta_star = best;
  trace.loss_star = best_loss;
  return trace;
}

std::vector<int> evaluation_frames(int n_frames, int count) {
  if (n_frames < 1) throw DimensionError("evaluation_frames: empty trajectory");
  if (count >= n_frames) {
    std::vector<int> all(n_frames);
    for (int i = 0; i < n_frames; ++i) all[i] = i;
    return all;
  }
  if (count == 1) return {0};
  std::vector<int> out;
  for (int i = 0; i < count; ++i)
    out.push_back(static_cast<int>(std::lround(static_cast<double>(i) * (n_frames - 1) / (count - 1))));
  return out;
}

SearchTrace bisection_search(const NvsOracle& oracle, const Trajectory& trajectory, const DepthReference& reference,
                             const ScheduleConfig& cfg) {
  cfg.check();
  Trajectory eval;
  eval.intrinsics = cfg.eval_size > 0 ? trajectory.intrinsics.resized(cfg.eval_size, cfg.eval_size) : trajectory.intrinsics;
  eval.quadrant_id = trajectory.quadrant_id;
  eval.radius = trajectory.radius;
  for (int i : evaluation_frames(trajectory.frame_count(), cfg.frames_evaluated)) eval.poses.push_back(trajectory.poses[i]);

  const std::vector<ImageD> gt = reference.render(eval);
  std::mutex serial;
  const auto loss = [&](double theta) {
    std::vector<ImageD> gen;
    try {
      if (oracle.concurrent_safe()) {
        gen = oracle.generate(theta, eval);
      } else {
        const std::lock_guard lock(serial);
        gen = oracle.generate(theta, eval);
      }
    } catch (const OracleFailure&) {
      throw;
    } catch (const std::exception& e) {
      throw OracleFailure(e.what(), theta);
    }
    if (gen.size() != gt.size()) throw OracleFailure("oracle returned a wrong frame count", theta);
    return depth_alignment_loss(gen, gt);
  };
  return coarse_to_fine_search(loss, cfg, oracle.concurrent_safe());
}

double ReplayLossTable::operator()(double theta) const {
  auto it = losses_.lower_bound(theta - 1e-9);
  if (it == losses_.end() || std::abs(it->first - theta) > 1e-9) throw OracleFailure("no recorded loss", theta);
  return it->second;
}

double rmse(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s / static_cast<double>(values.size()));
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double hi = values[mid];
  if (values.size() % 2 == 1) return hi;
  const double lo = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lo + hi);
}

AlignmentReport verify_alignment(std::span<const CameraPose> target, std::span<const CameraPose> estimated) {
  if (target.size() != estimated.size())
    throw LengthMismatch("verify_alignment: " + std::to_string(target.size()) + " targets vs " +
                         std::to_string(estimated.size()) + " estimates");
  AlignmentReport r;
  for (std::size_t i = 0; i < target.size(); ++i) {
    r.translation_errors_m.push_back((target[i].position - estimated[i].position).norm());
    r.rotation_errors_deg.push_back(rad2deg(rotation_angle_between(target[i].rotation, estimated[i].rotation)));
  }
  r.translation_rmse = rmse(r.translation_errors_m);
  r.translation_median = median(r.translation_errors_m);
  r.rotation_rmse_deg = rmse(r.rotation_errors_deg);
  r.rotation_median_deg = median(r.rotation_errors_deg);
  return r;
}

}  // namespace proxykit
