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
#include "plp/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "plp/errors.hpp"

namespace plp {

namespace {

Json vec3_to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw ConfigError("expected 3-array");
  }
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

Json pose_to_json(const PoseSE3& pose) {
  Json rot = Json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      rot.push_back(pose.rotation(r, c));
    }
  }
  return Json{{"rotation", rot}, {"translation", vec3_to_json(pose.translation)}};
}

PoseSE3 pose_from_json(const Json& j) {
  const Json& rot = j.at("rotation");
  if (!rot.is_array() || rot.size() != 9) {
    throw ConfigError("pose rotation must be a 9-array");
  }
  Mat3 R;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      R(r, c) = rot[3 * r + c].get<double>();
    }
  }
  return PoseSE3(R, vec3_from_json(j.at("translation")));
}

Json intrinsics_to_json(const CameraIntrinsics& K) {
  return Json{{"fx", K.fx}, {"fy", K.fy}, {"cx", K.cx}, {"cy", K.cy}};
}

CameraIntrinsics intrinsics_from_json(const Json& j) {
  CameraIntrinsics K;
  K.fx = j.at("fx").get<double>();
  K.fy = j.at("fy").get<double>();
  K.cx = j.at("cx").get<double>();
  K.cy = j.at("cy").get<double>();
  if (!(K.fx > 0.0) || !(K.fy > 0.0)) {
    throw ConfigError("intrinsics: focal lengths must be positive");
  }
  return K;
}

Json scene_config_to_json(const SceneConfig& c) {
  return Json{{"trajectory", c.trajectory},
              {"keyframes", c.keyframes},
              {"planes", c.num_planes},
              {"points_per_plane", c.points_per_plane},
              {"free_points", c.free_points},
              {"lines", c.num_lines},
              {"line_on_plane_fraction", c.line_on_plane_fraction},
              {"room", vec3_to_json(c.room)},
              {"intrinsics", intrinsics_to_json(c.intrinsics)},
              {"image_size", Json::array({c.image_width, c.image_height})},
              {"min_line_length", c.min_line_length},
              {"max_line_length", c.max_line_length}};
}

SceneConfig scene_config_from_json(const Json& j) {
  SceneConfig c;
  c.trajectory = j.value("trajectory", c.trajectory);
  c.keyframes = j.value("keyframes", c.keyframes);
  c.num_planes = j.value("planes", c.num_planes);
  c.points_per_plane = j.value("points_per_plane", c.points_per_plane);
  c.free_points = j.value("free_points", c.free_points);
  c.num_lines = j.value("lines", c.num_lines);
  c.line_on_plane_fraction =
      j.value("line_on_plane_fraction", c.line_on_plane_fraction);
  if (j.contains("room")) {
    c.room = vec3_from_json(j.at("room"));
  }
  if (j.contains("intrinsics")) {
    c.intrinsics = intrinsics_from_json(j.at("intrinsics"));
  }
  if (j.contains("image_size")) {
    c.image_width = j.at("image_size").at(0).get<int>();
    c.image_height = j.at("image_size").at(1).get<int>();
  }
  c.min_line_length = j.value("min_line_length", c.min_line_length);
  c.max_line_length = j.value("max_line_length", c.max_line_length);
  return c;
}

}  // namespace

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open " + path);
  }
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("malformed JSON in " + path + ": " + e.what());
  }
}

void save_json_file(const std::string& path, const Json& value) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot write " + path);
  }
  out << value.dump(2) << "\n";
}

Json scene_to_json(const SyntheticScene& scene) {
  Json planes = Json::array();
  for (const ScenePlane& p : scene.planes) {
    planes.push_back(Json{{"id", p.id},
                          {"center", vec3_to_json(p.center)},
                          {"normal", vec3_to_json(p.normal)},
                          {"u_axis", vec3_to_json(p.u_axis)},
                          {"v_axis", vec3_to_json(p.v_axis)},
                          {"half_u", p.half_u},
                          {"half_v", p.half_v}});
  }
  Json points = Json::array();
  for (size_t i = 0; i < scene.points.size(); ++i) {
    points.push_back(Json{{"id", static_cast<int>(i)},
                          {"plane", scene.point_plane[i]},
                          {"xyz", vec3_to_json(scene.points[i])}});
  }
  Json lines = Json::array();
  for (size_t i = 0; i < scene.lines.size(); ++i) {
    lines.push_back(Json{{"id", static_cast<int>(i)},
                         {"plane", scene.line_plane[i]},
                         {"start", vec3_to_json(scene.lines[i].start)},
                         {"end", vec3_to_json(scene.lines[i].end)}});
  }
  Json trajectory = Json::array();
  for (size_t i = 0; i < scene.trajectory.size(); ++i) {
    Json p = pose_to_json(scene.trajectory[i]);
    p["id"] = static_cast<int>(i);
    p["timestamp"] = scene.timestamps[i];
    trajectory.push_back(p);
  }
  return Json{{"version", 1},
              {"seed", scene.seed},
              {"config", scene_config_to_json(scene.config)},
              {"planes", planes},
              {"points", points},
              {"lines", lines},
              {"trajectory", trajectory}};
}

SyntheticScene scene_from_json(const Json& j) {
  SyntheticScene scene;
  scene.seed = j.at("seed").get<uint64_t>();
  scene.config = scene_config_from_json(j.at("config"));
  for (const Json& p : j.at("planes")) {
    ScenePlane plane;
    plane.id = p.at("id").get<int>();
    plane.center = vec3_from_json(p.at("center"));
    plane.normal = vec3_from_json(p.at("normal"));
    plane.u_axis = vec3_from_json(p.at("u_axis"));
    plane.v_axis = vec3_from_json(p.at("v_axis"));
    plane.half_u = p.at("half_u").get<double>();
    plane.half_v = p.at("half_v").get<double>();
    scene.planes.push_back(plane);
  }
  for (const Json& p : j.at("points")) {
    scene.points.push_back(vec3_from_json(p.at("xyz")));
    scene.point_plane.push_back(p.at("plane").get<int>());
  }
  for (const Json& l : j.at("lines")) {
    scene.lines.push_back(
        {vec3_from_json(l.at("start")), vec3_from_json(l.at("end"))});
    scene.line_plane.push_back(l.at("plane").get<int>());
  }
  for (const Json& p : j.at("trajectory")) {
    scene.trajectory.push_back(pose_from_json(p));
    scene.timestamps.push_back(p.at("timestamp").get<double>());
  }
  return scene;
}

Json trajectory_to_json(const std::vector<PoseSE3>& poses,
                        const std::vector<double>& timestamps) {
  Json out = Json::array();
  for (size_t i = 0; i < poses.size(); ++i) {
    Json p = pose_to_json(poses[i]);
    p["id"] = static_cast<int>(i);
    p["timestamp"] = i < timestamps.size() ? timestamps[i]
                                           : static_cast<double>(i);
    out.push_back(p);
  }
  return Json{{"version", 1}, {"poses", out}};
}

void trajectory_from_json(const Json& j, std::vector<PoseSE3>* poses,
                          std::vector<double>* timestamps) {
  poses->clear();
  if (timestamps != nullptr) {
    timestamps->clear();
  }
  for (const Json& p : j.at("poses")) {
    poses->push_back(pose_from_json(p));
    if (timestamps != nullptr) {
      timestamps->push_back(p.value("timestamp", 0.0));
    }
  }
}

Json experiment_config_to_json(const ExperimentConfig& c) {
  Json seeds = Json::array();
  for (uint64_t s : c.seeds) {
    seeds.push_back(s);
  }
  return Json{
      {"version", 1},
      {"scene", scene_config_to_json(c.scene)},
      {"noise",
       Json{{"pixel_sigma", c.noise.pixel_sigma},
            {"point_mismatch_rate", c.noise.point_mismatch_rate},
            {"line_mismatch_rate", c.noise.line_mismatch_rate},
            {"mask_corruption_rate", c.noise.mask_corruption_rate}}},
      {"features", c.features},
      {"init_perturbation",
       Json{{"rot_deg", c.init_perturbation.rot_deg},
            {"trans_m", c.init_perturbation.trans_m}}},
      {"loop",
       Json{{"enabled", c.loop.enabled},
            {"scale_drift", c.loop.scale_drift},
            {"loop_edge_weight", c.loop.loop_edge_weight},
            {"global_ba", c.loop.global_ba}}},
      {"solver",
       Json{{"max_iterations", c.solver.max_iterations},
            {"rounds", c.solver.rounds},
            {"chi2_threshold", c.solver.chi2_threshold},
            {"trim_ratio", c.solver.trim_ratio},
            {"relative_tol", c.solver.relative_tol},
            {"huber_delta", c.kernel.delta}}},
      {"seeds", seeds},
      {"output_dir", c.output_dir},
      {"threads", c.threads},
      {"deterministic", c.deterministic}};
}

ExperimentConfig experiment_config_from_json(const Json& j) {
  ExperimentConfig c;
  try {
    if (j.contains("scene")) {
      c.scene = scene_config_from_json(j.at("scene"));
    }
    if (j.contains("noise")) {
      const Json& n = j.at("noise");
      c.noise.pixel_sigma = n.value("pixel_sigma", c.noise.pixel_sigma);
      c.noise.point_mismatch_rate =
          n.value("point_mismatch_rate", c.noise.point_mismatch_rate);
      c.noise.line_mismatch_rate =
          n.value("line_mismatch_rate", c.noise.line_mismatch_rate);
      c.noise.mask_corruption_rate =
          n.value("mask_corruption_rate", c.noise.mask_corruption_rate);
    }
    if (j.contains("features")) {
      c.features = j.at("features").get<std::vector<std::string>>();
    }
    for (const std::string& f : c.features) {
      FeatureSet::parse(f);  // validate
    }
    if (j.contains("init_perturbation")) {
      const Json& p = j.at("init_perturbation");
      c.init_perturbation.rot_deg = p.value("rot_deg", 0.0);
      c.init_perturbation.trans_m = p.value("trans_m", 0.0);
    }
    if (j.contains("loop")) {
      const Json& l = j.at("loop");
      c.loop.enabled = l.value("enabled", false);
      c.loop.scale_drift = l.value("scale_drift", c.loop.scale_drift);
      c.loop.loop_edge_weight =
          l.value("loop_edge_weight", c.loop.loop_edge_weight);
      c.loop.global_ba = l.value("global_ba", c.loop.global_ba);
    }
    if (j.contains("solver")) {
      const Json& s = j.at("solver");
      c.solver.max_iterations = s.value("max_iterations", c.solver.max_iterations);
      c.solver.rounds = s.value("rounds", c.solver.rounds);
      c.solver.chi2_threshold = s.value("chi2_threshold", c.solver.chi2_threshold);
      c.solver.trim_ratio = s.value("trim_ratio", c.solver.trim_ratio);
      c.solver.relative_tol = s.value("relative_tol", c.solver.relative_tol);
      c.kernel.delta = s.value("huber_delta", c.kernel.delta);
    }
    if (j.contains("seeds")) {
      const Json& s = j.at("seeds");
      if (s.is_array()) {
        c.seeds = s.get<std::vector<uint64_t>>();
      } else if (s.is_object()) {
        const uint64_t start = s.value("start", 0);
        const int count = s.value("count", 1);
        c.seeds.clear();
        for (int i = 0; i < count; ++i) {
          c.seeds.push_back(start + static_cast<uint64_t>(i));
        }
      } else {
        throw ConfigError("seeds must be an array or {start, count}");
      }
    }
    c.output_dir = j.value("output_dir", c.output_dir);
    c.threads = j.value("threads", c.threads);
    c.deterministic = j.value("deterministic", c.deterministic);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("invalid experiment config: ") + e.what());
  }
  if (c.seeds.empty()) {
    throw ConfigError("experiment config needs at least one seed");
  }
  return c;
}

Json solver_report_to_json(const SolverReport& r) {
  return Json{{"iterations", r.iterations},
              {"initial_cost", r.initial_cost},
              {"final_cost", r.final_cost},
              {"cost_trace", r.cost_trace},
              {"rejected_observations", r.rejected_observations},
              {"invalid_observations", r.invalid_observations},
              {"rejected_line_landmarks", r.rejected_line_landmarks},
              {"inlier_count", r.inlier_count},
              {"converged", r.converged}};
}

Json run_result_to_json(const RunResult& r) {
  Json out{{"run_id", r.run_id},
           {"seed", r.seed},
           {"features", r.features},
           {"config_hash", r.config_hash},
           {"ate_rmse_m", r.ate_rmse},
           {"mean_ape_m", r.mean_ape},
           {"init_ate_rmse_m", r.init_ate_rmse},
           {"rejected_outliers", r.rejected_outliers},
           {"failed", r.failed},
           {"solver_report", solver_report_to_json(r.report)}};
  if (!r.error.empty()) {
    out["error"] = r.error;
  }
  if (r.loop_stats.ran) {
    out["loop"] = Json{{"scale_errors", r.loop_stats.scale_errors},
                       {"max_klein_residual", r.loop_stats.max_klein_residual},
                       {"loop_edge_residual", r.loop_stats.loop_edge_residual},
                       {"ate_before_correction", r.loop_stats.ate_before_correction},
                       {"ate_after_correction", r.loop_stats.ate_after_correction}};
  }
  return out;
}

std::string metrics_csv(const std::vector<RunResult>& rows) {
  std::ostringstream os;
  os << "run_id,seed,config_hash,ate_rmse_m,mean_ape_m,rejected_outliers\n";
  char buf[64];
  for (const RunResult& r : rows) {
    os << r.run_id << "," << r.seed << "," << r.config_hash << ",";
    std::snprintf(buf, sizeof(buf), "%.17g", r.ate_rmse);
    os << buf << ",";
    std::snprintf(buf, sizeof(buf), "%.17g", r.mean_ape);
    os << buf << "," << r.rejected_outliers << "\n";
  }
  return os.str();
}

}  // namespace plp
