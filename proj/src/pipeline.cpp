/******************************************************************************
 * Copyright 2026 The plp Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/
#include "plp/pipeline.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <thread>

#include "plp/errors.hpp"
#include "plp/logging.hpp"
#include "plp/pnp.hpp"
#include "plp/serialize.hpp"

namespace plp {

namespace {

constexpr uint64_t kRenderSeedSalt = 0x9e3779b97f4a7c15ull;
constexpr uint64_t kPerturbSeedSalt = 0xc2b2ae3d27d4eb4full;
constexpr uint64_t kPlaneSeedSalt = 0x165667b19e3779f9ull;

uint64_t fnv1a64(const std::string& data) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec3 v(gauss(rng), gauss(rng), gauss(rng));
  while (v.norm() < 1e-9) {
    v = Vec3(gauss(rng), gauss(rng), gauss(rng));
  }
  return v.normalized();
}

Vec3 image_line_through(const ImageLineSegment& seg) {
  return seg.s.homogeneous().cross(seg.e.homogeneous());
}

}  // namespace

FeatureSet FeatureSet::parse(const std::string& name) {
  if (name == "points") {
    return {false, false};
  }
  if (name == "points+lines") {
    return {true, false};
  }
  if (name == "points+lines+planes") {
    return {true, true};
  }
  throw ConfigError("unknown feature set: " + name);
}

std::string FeatureSet::tag() const {
  if (use_planes) {
    return "plp";
  }
  return use_lines ? "pl" : "p";
}

MapStore build_map_from_observations(const SyntheticScene& scene,
                                     const ObservationSet& obs,
                                     const FeatureSet& features,
                                     const InitPerturbation& perturbation,
                                     uint64_t seed, MapBuildInfo* info_out) {
  MapStore map;
  map.intrinsics = scene.K();
  MapBuildInfo info;

  std::mt19937_64 rng(seed ^ kPerturbSeedSalt);
  for (size_t i = 0; i < scene.trajectory.size(); ++i) {
    Keyframe kf;
    kf.id = static_cast<int>(i);
    kf.timestamp = scene.timestamps[i];
    kf.pose = scene.trajectory[i];
    kf.fixed = i == 0;
    if (i > 0 &&
        (perturbation.rot_deg > 0.0 || perturbation.trans_m > 0.0)) {
      const Vec3 axis = random_unit(rng);
      const Vec3 dir = random_unit(rng);
      const Mat3 dR = so3_exp(axis * (perturbation.rot_deg * M_PI / 180.0));
      kf.pose = PoseSE3(dR * kf.pose.rotation,
                        dR * kf.pose.translation + perturbation.trans_m * dir);
    }
    map.keyframes.push_back(kf);
  }

  // Claimed correspondence id -> measurement indices, in render order.
  std::map<int, std::vector<int>> point_groups;
  for (size_t i = 0; i < obs.points.size(); ++i) {
    point_groups[obs.points[i].landmark].push_back(static_cast<int>(i));
  }
  std::map<int, std::vector<int>> line_groups;
  if (features.use_lines) {
    for (size_t i = 0; i < obs.lines.size(); ++i) {
      line_groups[obs.lines[i].landmark].push_back(static_cast<int>(i));
    }
  }

  for (const auto& [scene_id, meas_idx] : point_groups) {
    if (meas_idx.size() < 2) {
      continue;
    }
    const PointMeas& m0 = obs.points[meas_idx[0]];
    const PointMeas& m1 = obs.points[meas_idx[1]];
    const PoseSE3& pose0 = map.keyframes[m0.frame].pose;
    const PoseSE3& pose1 = map.keyframes[m1.frame].pose;
    Vec3 position;
    try {
      position = triangulate_point_dlt(
          {projection_matrix(map.intrinsics, pose0),
           projection_matrix(map.intrinsics, pose1)},
          {m0.pixel, m1.pixel});
    } catch (const Error&) {
      continue;
    }
    const double z0 = pose0.transform(position).z();
    const double z1 = pose1.transform(position).z();
    if (!position.allFinite() || z0 < 0.1 || z1 < 0.1 || z0 > 100.0 ||
        z1 > 100.0) {
      continue;
    }
    PointLandmark lm;
    lm.id = static_cast<int>(map.points.size());
    lm.position = position;
    lm.ref_keyframe = m0.frame;
    map.points.push_back(lm);
    info.scene_to_map_point[scene_id] = lm.id;
    info.point_label.push_back(m0.label);

    for (int mi : meas_idx) {
      const PointMeas& m = obs.points[mi];
      PointObservation o;
      o.id = map.next_observation_id++;
      o.keyframe = m.frame;
      o.landmark = lm.id;
      o.pixel = {m.pixel.x(), m.pixel.y()};
      map.point_obs.push_back(o);
      info.point_obs_meas.push_back(mi);
    }
  }

  for (const auto& [scene_id, meas_idx] : line_groups) {
    if (meas_idx.size() < 2) {
      continue;
    }
    const LineMeas& m0 = obs.lines[meas_idx[0]];
    const PoseSE3& pose0 = map.keyframes[m0.frame].pose;
    const Mat34 P0 = projection_matrix(map.intrinsics, pose0);
    const Vec3 l0 = image_line_through(m0.segment);

    PlueckerLine line;
    LineSegment3 endpoints;
    bool ok = false;
    for (size_t k = 1; k < meas_idx.size() && !ok; ++k) {
      const LineMeas& mk = obs.lines[meas_idx[k]];
      const PoseSE3& posek = map.keyframes[mk.frame].pose;
      try {
        line = triangulate_two_view(
            l0, P0, image_line_through(mk.segment),
            projection_matrix(map.intrinsics, posek), &m0.segment, &pose0,
            &map.intrinsics);
        endpoints = trim_endpoints(line, m0.segment, pose0, map.intrinsics);
        ok = true;
      } catch (const Error&) {
      }
    }
    if (!ok) {
      continue;
    }
    LineLandmark lm;
    lm.id = static_cast<int>(map.lines.size());
    lm.state = to_orthonormal(line);
    lm.pluecker = from_orthonormal(lm.state);
    lm.endpoints = endpoints;
    lm.ref_keyframe = m0.frame;
    map.lines.push_back(lm);
    info.scene_to_map_line[scene_id] = lm.id;

    for (int mi : meas_idx) {
      const LineMeas& m = obs.lines[mi];
      LineObservation o;
      o.id = map.next_observation_id++;
      o.keyframe = m.frame;
      o.landmark = lm.id;
      o.segment = m.segment;
      map.line_obs.push_back(o);
      info.line_obs_meas.push_back(mi);
    }
  }

  if (info_out != nullptr) {
    *info_out = std::move(info);
  }
  return map;
}

void fit_scene_planes(MapStore& map, const std::vector<int>& point_labels,
                      uint64_t seed) {
  std::map<int, LabeledPoints> sets;
  for (const PointLandmark& lm : map.points) {
    if (!lm.alive) {
      continue;
    }
    const int label = point_labels.at(lm.id);
    if (label < 0) {
      continue;
    }
    sets[label].ids.push_back(lm.id);
    sets[label].positions.push_back(lm.position);
  }
  if (sets.empty()) {
    return;
  }
  std::vector<LabeledPoints> candidate_sets;
  for (auto& [label, set] : sets) {
    candidate_sets.push_back(std::move(set));
  }

  GeometricThresholds th;
  try {
    th = adaptive_thresholds(map.median_depth(map.keyframes.front().id), th);
  } catch (const Error&) {
    return;
  }

  std::vector<Plane3> planes;
  try {
    planes = sequential_ransac_planes(candidate_sets, th, seed);
  } catch (const NoModelFound&) {
    return;
  }

  for (Plane3& plane : planes) {
    PlaneLandmark lm;
    lm.id = static_cast<int>(map.planes.size());
    lm.plane = std::move(plane);
    map.planes.push_back(lm);
  }

  // Incremental merging over the fitted set.
  std::vector<Vec3> positions(map.points.size());
  for (size_t i = 0; i < map.points.size(); ++i) {
    positions[i] = map.points[i].position;
  }
  for (size_t i = 0; i < map.planes.size(); ++i) {
    if (!map.planes[i].alive) {
      continue;
    }
    for (size_t j = i + 1; j < map.planes.size(); ++j) {
      if (!map.planes[j].alive) {
        continue;
      }
      const auto merged =
          try_merge(map.planes[i].plane, map.planes[j].plane, positions, th);
      if (merged.has_value()) {
        map.planes[i].plane = *merged;
        map.planes[i].plane.member_ids = merged->member_ids;
        map.planes[j].alive = false;
      }
    }
  }
  for (size_t i = 0; i < map.points.size(); ++i) {
    map.points[i].position = positions[i];
  }

  for (const PlaneLandmark& plane : map.planes) {
    if (!plane.alive) {
      continue;
    }
    for (int id : plane.plane.member_ids) {
      if (map.points.at(id).plane_id < 0) {
        map.points.at(id).plane_id = plane.id;
      }
    }
  }
}

namespace {

void loop_stage(const ExperimentConfig& config, const SyntheticScene& scene,
                const MapBuildInfo& info, MapStore& map, RunResult& result) {
  const int n = static_cast<int>(map.keyframes.size());
  if (n < 3) {
    return;
  }
  LoopStats stats;

  // Snapshot of the pre-drift map.
  std::vector<Vec3> pre_points(map.points.size());
  for (size_t i = 0; i < map.points.size(); ++i) {
    pre_points[i] = map.points[i].position;
  }

  // Inject progressive scale drift, keyframe 0 stays clean.
  std::vector<double> drift_scale(n);
  std::vector<KeyframeCorrection> inject(n);
  for (int i = 0; i < n; ++i) {
    drift_scale[i] = std::pow(1.0 + config.loop.scale_drift,
                              static_cast<double>(i) /
                                  static_cast<double>(n - 1));
    Sim3Transform drift;
    drift.s = drift_scale[i];
    inject[i].keyframe_id = map.keyframes[i].id;
    inject[i].old_state = sim3_from_se3(map.keyframes[i].pose);
    inject[i].new_state = sim3_compose(inject[i].old_state, drift);
  }
  correct_map(map, inject);
  stats.ate_before_correction =
      compute_ate([&] {
        std::vector<PoseSE3> est;
        for (const Keyframe& kf : map.keyframes) {
          est.push_back(kf.pose);
        }
        return est;
      }(), scene.trajectory, AlignMode::kSim3).ate_rmse;

  // Simulated loop detection: 3D-3D matches between the loop-region map and
  // the same physical points as the drifted end-of-loop local map sees them.
  std::vector<Vec3> src, dst;
  const PoseSE3& first_gt = scene.trajectory.front();
  const PoseSE3& last_gt = scene.trajectory.back();
  for (const auto& [scene_id, map_id] : info.scene_to_map_point) {
    if (!map.points[map_id].alive) {
      continue;
    }
    const Vec3& x = scene.points[scene_id];
    const auto in_view = [&](const PoseSE3& pose) {
      const Vec3 xc = pose.transform(x);
      if (xc.z() <= 0.2) {
        return false;
      }
      PixelPoint px;
      px.u = scene.K().fx * xc.x() / xc.z() + scene.K().cx;
      px.v = scene.K().fy * xc.y() / xc.z() + scene.K().cy;
      return scene.in_image(px, 4.0);
    };
    if (!in_view(first_gt) || !in_view(last_gt)) {
      continue;
    }
    src.push_back(pre_points[map_id] / drift_scale[n - 1]);
    dst.push_back(map.points[map_id].position);
  }
  if (src.size() < 3) {
    throw InsufficientObservations("loop_stage: too few loop matches");
  }
  const Sim3Transform S_est = estimate_sim3_from_matches(src, dst);

  const Sim3Transform S0 = sim3_from_se3(map.keyframes.front().pose);
  const Sim3Transform Send = sim3_from_se3(map.keyframes.back().pose);
  LoopConstraint loop;
  loop.kf_from = map.keyframes.front().id;
  loop.kf_to = map.keyframes.back().id;
  loop.relative = sim3_compose(S0, sim3_compose(S_est, Send.inverse()));
  loop.weight = config.loop.loop_edge_weight;

  PoseGraph graph = build_pose_graph(map, {loop});
  const std::vector<PoseGraphNode> old_nodes = graph.nodes;
  const PoseGraphReport pg_report = optimize_pose_graph(graph, 100);
  stats.loop_edge_residual = pg_report.final_edge_residuals.back();

  stats.scale_errors.resize(n);
  for (int i = 0; i < n; ++i) {
    stats.scale_errors[i] = std::abs(graph.nodes[i].state.s * drift_scale[i] - 1.0);
  }

  std::vector<KeyframeCorrection> corrections(n);
  for (int i = 0; i < n; ++i) {
    corrections[i].keyframe_id = graph.nodes[i].id;
    corrections[i].old_state = old_nodes[i].state;
    corrections[i].new_state = graph.nodes[i].state;
  }
  correct_map(map, corrections);

  // Loop fusion: merge landmarks that coincide after the correction.
  try {
    const GeometricThresholds th =
        adaptive_thresholds(map.median_depth(map.keyframes.front().id), {});
    fuse_duplicate_points(map, th.eps_d);
  } catch (const Error&) {
  }

  for (const LineLandmark& lm : map.lines) {
    if (lm.alive) {
      stats.max_klein_residual =
          std::max(stats.max_klein_residual, lm.pluecker.klein_residual());
    }
  }
  stats.ate_after_correction =
      compute_ate([&] {
        std::vector<PoseSE3> est;
        for (const Keyframe& kf : map.keyframes) {
          est.push_back(kf.pose);
        }
        return est;
      }(), scene.trajectory, AlignMode::kSim3).ate_rmse;

  if (config.loop.global_ba) {
    BAProblem problem = build_problem(map, {});
    const SolverReport report =
        solve_local_ba(problem, config.kernel, config.solver);
    write_back(problem, report, map);
    result.rejected_outliers +=
        static_cast<int>(report.rejected_observations.size() +
                         report.rejected_line_landmarks.size());
  }

  stats.ran = true;
  result.loop_stats = stats;
}

}  // namespace

RunResult run_single(const ExperimentConfig& config,
                     const std::string& features, uint64_t seed) {
  FeatureSet fs = FeatureSet::parse(features);
  RunResult result;
  result.seed = seed;
  result.features = features;
  result.run_id = fs.tag() + "-" + std::to_string(seed);
  result.config_hash = config_hash(config);

  try {
    const SyntheticScene scene = generate_scene(config.scene, seed);
    RenderOptions render;
    render.noise_px = config.noise.pixel_sigma;
    render.point_outlier_rate = config.noise.point_mismatch_rate;
    render.line_outlier_rate = fs.use_lines ? config.noise.line_mismatch_rate : 0.0;
    render.mask_corruption_rate = config.noise.mask_corruption_rate;
    const ObservationSet obs =
        render_observations(scene, render, seed ^ kRenderSeedSalt);

    MapBuildInfo info;
    MapStore map = build_map_from_observations(scene, obs, fs,
                                               config.init_perturbation, seed,
                                               &info);
    result.gt_trajectory = scene.trajectory;
    result.timestamps = scene.timestamps;

    {
      std::vector<PoseSE3> init;
      for (const Keyframe& kf : map.keyframes) {
        init.push_back(kf.pose);
      }
      result.init_ate_rmse =
          compute_ate(init, scene.trajectory, AlignMode::kSim3).ate_rmse;
    }

    if (fs.use_planes) {
      fit_scene_planes(map, info.point_label, seed ^ kPlaneSeedSalt);
    }

    BAProblem problem = build_problem(map, {});
    std::function<void(BAProblem&)> between;
    if (fs.use_planes) {
      between = [&map](BAProblem& p) {
        for (const BAPoint& bp : p.points) {
          map.points.at(bp.id).position = bp.position;
        }
        apply_point_plane_step(map);
        for (BAPoint& bp : p.points) {
          bp.position = map.points.at(bp.id).position;
        }
      };
    }
    result.report = solve_local_ba(problem, config.kernel, config.solver, between);
    write_back(problem, result.report, map);
    result.rejected_outliers =
        static_cast<int>(result.report.rejected_observations.size() +
                         result.report.rejected_line_landmarks.size());
    {
      const VecX r = residuals(problem);
      double sum = 0.0;
      for (int i = 0; i + 1 < r.size(); i += 2) {
        sum += std::hypot(r[i], r[i + 1]);
      }
      result.mean_reproj_px = r.size() > 0 ? sum / (r.size() / 2) : 0.0;
    }

    if (config.loop.enabled) {
      loop_stage(config, scene, info, map, result);
    }

    for (const Keyframe& kf : map.keyframes) {
      result.est_trajectory.push_back(kf.pose);
    }
    const TrajectoryMetrics metrics =
        compute_ate(result.est_trajectory, scene.trajectory, AlignMode::kSim3);
    result.ate_rmse = metrics.ate_rmse;
    result.mean_ape = metrics.mean_ape();
  } catch (const Error& e) {
    result.failed = true;
    result.error = e.what();
    log_error("run ", result.run_id, " failed: ", e.what());
  }
  return result;
}

int run_experiment(const ExperimentConfig& config, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  struct Job {
    std::string features;
    uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const std::string& f : config.features) {
    FeatureSet::parse(f);  // validate before spawning workers
    for (uint64_t seed : config.seeds) {
      jobs.push_back({f, seed});
    }
  }

  std::vector<RunResult> results(jobs.size());
  const int threads = std::max(1, config.threads);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= jobs.size()) {
        break;
      }
      results[i] = run_single(config, jobs[i].features, jobs[i].seed);
      log_info("run ", results[i].run_id, " ate_rmse=", results[i].ate_rmse);
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back(worker);
    }
    for (std::thread& t : pool) {
      t.join();
    }
  }

  // Deterministic output order regardless of worker scheduling: jobs are
  // already (features, seed) ordered.
  std::ofstream csv(fs::path(out_dir) / "metrics.csv");
  csv << metrics_csv(results);
  csv.close();

  Json rows = Json::array();
  for (const RunResult& r : results) {
    rows.push_back(run_result_to_json(r));
  }
  save_json_file((fs::path(out_dir) / "metrics.json").string(),
                 Json{{"version", 1},
                      {"config_hash", config_hash(config)},
                      {"deterministic", config.deterministic},
                      {"rows", rows}});

  for (const RunResult& r : results) {
    if (r.failed) {
      continue;
    }
    save_json_file((fs::path(out_dir) / (r.run_id + "_est.json")).string(),
                   trajectory_to_json(r.est_trajectory, r.timestamps));
    save_json_file((fs::path(out_dir) / (r.run_id + "_gt.json")).string(),
                   trajectory_to_json(r.gt_trajectory, r.timestamps));
  }

  for (const RunResult& r : results) {
    if (r.failed) {
      return 2;
    }
  }
  return 0;
}

uint64_t config_hash(const ExperimentConfig& config) {
  Json j = experiment_config_to_json(config);
  j.erase("seeds");
  j.erase("output_dir");
  j.erase("threads");
  j.erase("deterministic");
  return fnv1a64(j.dump());
}

}  // namespace plp
