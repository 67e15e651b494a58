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
#ifndef PLP_PIPELINE_HPP
#define PLP_PIPELINE_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "plp/ba.hpp"
#include "plp/loop_closure.hpp"
#include "plp/map_store.hpp"
#include "plp/metrics.hpp"
#include "plp/scene.hpp"

namespace plp {

struct NoiseConfig {
  double pixel_sigma = 1.0;
  double point_mismatch_rate = 0.0;
  double line_mismatch_rate = 0.0;
  double mask_corruption_rate = 0.0;
};

struct InitPerturbation {
  double rot_deg = 0.0;
  double trans_m = 0.0;
};

struct LoopStageConfig {
  bool enabled = false;
  double scale_drift = 0.1;
  double loop_edge_weight = 10.0;
  bool global_ba = true;
};

// Feature toggles mirroring the ablation columns.
struct FeatureSet {
  bool use_lines = true;
  bool use_planes = false;

  static FeatureSet parse(const std::string& name);  // throws ConfigError
  std::string tag() const;  // "p", "pl", "plp"
};

struct ExperimentConfig {
  SceneConfig scene;
  NoiseConfig noise;
  std::vector<std::string> features = {"points+lines"};
  InitPerturbation init_perturbation;
  LoopStageConfig loop;
  SolverConfig solver;
  RobustKernel kernel;
  std::vector<uint64_t> seeds = {0};
  std::string output_dir = "out";
  int threads = 1;
  bool deterministic = true;
};

struct LoopStats {
  bool ran = false;
  // |s_opt_i * s_drift_i - 1| per node: recovered scale vs injected drift.
  std::vector<double> scale_errors;
  double max_klein_residual = 0.0;
  double loop_edge_residual = 0.0;
  double ate_before_correction = 0.0;
  double ate_after_correction = 0.0;
};

struct RunResult {
  std::string run_id;
  uint64_t seed = 0;
  std::string features;
  uint64_t config_hash = 0;

  double ate_rmse = 0.0;
  double mean_ape = 0.0;
  double init_ate_rmse = 0.0;   // ATE of the perturbed initialization
  double mean_reproj_px = 0.0;  // mean residual norm over surviving obs
  int rejected_outliers = 0;    // gated observations + culled line landmarks
  SolverReport report;
  LoopStats loop_stats;

  std::vector<PoseSE3> est_trajectory;
  std::vector<PoseSE3> gt_trajectory;
  std::vector<double> timestamps;

  bool failed = false;
  std::string error;
};

// Bookkeeping from map construction, used by evaluation code.
struct MapBuildInfo {
  std::unordered_map<int, int> scene_to_map_point;
  std::unordered_map<int, int> scene_to_map_line;
  std::vector<int> point_obs_meas;  // map.point_obs[k] -> index into obs.points
  std::vector<int> line_obs_meas;   // map.line_obs[k] -> index into obs.lines
  std::vector<int> point_label;     // per map point id, from its first claim
};

// Builds a map from rendered observations: perturbed keyframes plus
// DLT-triangulated point and two-view-triangulated line landmarks.
MapStore build_map_from_observations(const SyntheticScene& scene,
                                     const ObservationSet& obs,
                                     const FeatureSet& features,
                                     const InitPerturbation& perturbation,
                                     uint64_t seed,
                                     MapBuildInfo* info_out = nullptr);

// Fits plane landmarks from the segmentation labels and assigns memberships.
void fit_scene_planes(MapStore& map, const std::vector<int>& point_labels,
                      uint64_t seed);

RunResult run_single(const ExperimentConfig& config,
                     const std::string& features, uint64_t seed);

// Full sweep: features x seeds, CSV + JSON artifacts under out_dir.
// Returns 0 on success, 2 when any run failed in the solver.
int run_experiment(const ExperimentConfig& config, const std::string& out_dir);

uint64_t config_hash(const ExperimentConfig& config);

}  // namespace plp

#endif  // PLP_PIPELINE_HPP
