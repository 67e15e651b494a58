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
#include "plp/jacobian_check.hpp"

#include <algorithm>
#include <random>

#include "plp/ba.hpp"
#include "plp/numdiff.hpp"

namespace plp {

namespace {
constexpr double kFdStep = 1e-6;
}

double JacobianCheckResult::worst() const {
  return std::max({max_rel_error_point, max_rel_error_point_pose,
                   max_rel_error_line, max_rel_error_line_pose});
}

JacobianCheckResult run_jacobian_check(int trials, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) {
    return lo + (hi - lo) * unit(rng);
  };
  auto rand_unit3 = [&] {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec3 v(gauss(rng), gauss(rng), gauss(rng));
    while (v.norm() < 1e-9) {
      v = Vec3(gauss(rng), gauss(rng), gauss(rng));
    }
    return v.normalized();
  };

  JacobianCheckResult result;
  result.trials = trials;

  for (int trial = 0; trial < trials; ++trial) {
    BAProblem problem;
    problem.intrinsics = {uniform(300.0, 800.0), uniform(300.0, 800.0),
                          uniform(250.0, 400.0), uniform(200.0, 300.0)};
    const Mat3 R = so3_exp(rand_unit3() * uniform(0.0, 2.8));
    const PoseSE3 pose(R, Vec3(uniform(-2.0, 2.0), uniform(-2.0, 2.0),
                               uniform(-2.0, 2.0)));
    problem.poses.push_back({0, pose, false});

    // Point landmark in front of the camera.
    const Vec3 point_cam(uniform(-1.5, 1.5), uniform(-1.5, 1.5),
                         uniform(1.0, 6.0));
    problem.points.push_back({0, pose.inverse().transform(point_cam)});
    BAPointObs pobs;
    pobs.id = 0;
    pobs.pose = 0;
    pobs.point = 0;
    const PixelPoint ppx = project_point(pose, problem.intrinsics,
                                         problem.points[0].position);
    pobs.pixel = {ppx.u + uniform(-20.0, 20.0), ppx.v + uniform(-20.0, 20.0)};
    problem.point_obs.push_back(pobs);

    // Line landmark spanning the same depth band.
    Vec3 a_cam, b_cam;
    do {
      a_cam = Vec3(uniform(-1.5, 1.5), uniform(-1.5, 1.5), uniform(1.0, 6.0));
      b_cam = Vec3(uniform(-1.5, 1.5), uniform(-1.5, 1.5), uniform(1.0, 6.0));
    } while ((a_cam - b_cam).norm() < 0.3 ||
             a_cam.cross(b_cam).norm() < 1e-3);
    const Vec3 a = pose.inverse().transform(a_cam);
    const Vec3 b = pose.inverse().transform(b_cam);
    BALine line;
    line.id = 0;
    line.state = to_orthonormal(pluecker_from_endpoints(a, b));
    line.refresh();
    problem.lines.push_back(line);
    BALineObs lobs;
    lobs.id = 1;
    lobs.pose = 0;
    lobs.line = 0;
    const PixelPoint pa = project_point(pose, problem.intrinsics, a);
    const PixelPoint pb = project_point(pose, problem.intrinsics, b);
    lobs.segment.s = {pa.u + uniform(-15.0, 15.0), pa.v + uniform(-15.0, 15.0)};
    lobs.segment.e = {pb.u + uniform(-15.0, 15.0), pb.v + uniform(-15.0, 15.0)};
    problem.line_obs.push_back(lobs);

    const PointJacobians pj = point_jacobians(problem, problem.point_obs[0]);
    const LineJacobians lj = line_jacobians(problem, problem.line_obs[0]);

    const MatX fd_point = central_difference(
        2, 3,
        [&](int k, double h) -> VecX {
          BAProblem p = problem;
          p.points[0].position[k] += h;
          return point_jacobians(p, p.point_obs[0]).residual;
        },
        kFdStep);
    const MatX fd_point_pose = central_difference(
        2, 6,
        [&](int k, double h) -> VecX {
          BAProblem p = problem;
          Vec6 delta = Vec6::Zero();
          delta[k] = h;
          p.poses[0].pose = se3_retract(p.poses[0].pose, delta);
          return point_jacobians(p, p.point_obs[0]).residual;
        },
        kFdStep);
    const MatX fd_line = central_difference(
        2, 4,
        [&](int k, double h) -> VecX {
          BAProblem p = problem;
          Vec4 delta = Vec4::Zero();
          delta[k] = h;
          p.lines[0].state = update_orthonormal(p.lines[0].state, delta);
          p.lines[0].refresh();
          return line_jacobians(p, p.line_obs[0]).residual;
        },
        kFdStep);
    const MatX fd_line_pose = central_difference(
        2, 6,
        [&](int k, double h) -> VecX {
          BAProblem p = problem;
          Vec6 delta = Vec6::Zero();
          delta[k] = h;
          p.poses[0].pose = se3_retract(p.poses[0].pose, delta);
          return line_jacobians(p, p.line_obs[0]).residual;
        },
        kFdStep);

    result.max_rel_error_point =
        std::max(result.max_rel_error_point,
                 relative_matrix_error(pj.J_point, fd_point));
    result.max_rel_error_point_pose =
        std::max(result.max_rel_error_point_pose,
                 relative_matrix_error(pj.J_pose, fd_point_pose));
    result.max_rel_error_line =
        std::max(result.max_rel_error_line,
                 relative_matrix_error(lj.J_line, fd_line));
    result.max_rel_error_line_pose =
        std::max(result.max_rel_error_line_pose,
                 relative_matrix_error(lj.J_pose, fd_line_pose));
  }
  return result;
}

}  // namespace plp
