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
#ifndef PLP_BA_HPP
#define PLP_BA_HPP

#include <functional>
#include <utility>
#include <vector>

#include "plp/camera.hpp"
#include "plp/line.hpp"
#include "plp/map_store.hpp"
#include "plp/se3.hpp"
#include "plp/types.hpp"

namespace plp {

constexpr double kChi2TwoDof95 = 5.991;

// Huber loss on the whitened squared residual e^T Omega e.
struct RobustKernel {
  double delta = 2.447651527;  // sqrt(5.991)

  double cost(double chi2) const;
  // First-order IRLS weight rho'(chi2).
  double weight(double chi2) const;
};

struct SolverConfig {
  int max_iterations = 30;
  int rounds = 2;
  double chi2_threshold = kChi2TwoDof95;
  double trim_ratio = 0.1;
  double relative_tol = 1e-8;
  double cost_floor = 1e-15;
  double init_lambda_scale = 1e-4;
  double max_lambda = 1e12;
};

struct SolverReport {
  int iterations = 0;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  std::vector<double> cost_trace;          // accepted costs, non-increasing
  std::vector<int> rejected_observations;  // chi-square gate
  std::vector<int> invalid_observations;   // behind camera / degenerate
  std::vector<int> rejected_line_landmarks;
  int inlier_count = 0;
  bool converged = false;
};

struct BAPose {
  int id = 0;
  PoseSE3 pose;
  bool fixed = false;
};

struct BAPoint {
  int id = 0;
  Vec3 position = Vec3::Zero();
};

struct BALine {
  int id = 0;
  OrthonormalLine state;
  PlueckerLine pluecker;  // always from_orthonormal(state)
  int ref_keyframe_slot = -1;

  void refresh() { pluecker = from_orthonormal(state); }
};

struct BAPointObs {
  int id = 0;
  int pose = 0;      // slot into poses
  int point = 0;     // slot into points
  PixelPoint pixel;
  Mat2 info = Mat2::Identity();
  bool valid = true;
};

struct BALineObs {
  int id = 0;
  int pose = 0;
  int line = 0;
  ImageLineSegment segment;
  Mat2 info = Mat2::Identity();
  bool valid = true;
};

struct BAProblem {
  CameraIntrinsics intrinsics;
  std::vector<BAPose> poses;
  std::vector<BAPoint> points;
  std::vector<BALine> lines;
  std::vector<BAPointObs> point_obs;
  std::vector<BALineObs> line_obs;
  bool optimize_landmarks = true;

  int count_valid_observations() const;
};

// Stacked 2-vector residuals of all valid observations, ordered by
// observation id. Observations that fail to project are marked invalid and
// reported through newly_invalid.
VecX residuals(BAProblem& problem, std::vector<int>* newly_invalid = nullptr);

// Sum of rho(e^T Omega e) over valid observations; +inf when any valid
// observation fails to project.
double robust_cost(const BAProblem& problem, const RobustKernel& kernel);

struct PointJacobians {
  Vec2 residual;
  Mat23 J_point;
  Mat26 J_pose;  // d e / d (omega, rho), left-multiplicative retract
};
struct LineJacobians {
  Vec2 residual;
  Mat24 J_line;  // d e / d (theta_vec, theta) orthonormal update
  Mat26 J_pose;
};

PointJacobians point_jacobians(const BAProblem& problem, const BAPointObs& obs);
LineJacobians line_jacobians(const BAProblem& problem, const BALineObs& obs);

// Levenberg-Marquardt over the free poses with all landmarks held fixed.
SolverReport solve_motion_only(BAProblem& problem, const RobustKernel& kernel,
                               int max_iters);

// Window bundle adjustment: config.rounds LM rounds with chi-square gating
// and line positive-depth / endpoint-trimming culling between rounds. The
// between_rounds hook runs after gating (used for the point-plane step).
SolverReport solve_local_ba(
    BAProblem& problem, const RobustKernel& kernel, const SolverConfig& config,
    const std::function<void(BAProblem&)>& between_rounds = {});

// Projects every plane's member points onto the plane.
void apply_point_plane_step(MapStore& map);

struct PointMatch {
  Vec3 position;
  PixelPoint pixel;
};
struct LineMatch {
  PlueckerLine line;
  ImageLineSegment segment;
};

// Motion-only refinement of a single camera pose from 3D-2D matches.
std::pair<PoseSE3, SolverReport> relocalize(
    const std::vector<PointMatch>& point_matches,
    const std::vector<LineMatch>& line_matches, const PoseSE3& init,
    const CameraIntrinsics& K, const RobustKernel& kernel = {},
    const SolverConfig& config = {});

// Window extraction and write-back against the map.
BAProblem build_problem(const MapStore& map, const std::vector<int>& window);
void write_back(const BAProblem& problem, const SolverReport& report,
                MapStore& map);

}  // namespace plp

#endif  // PLP_BA_HPP
