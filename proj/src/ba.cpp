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
#include "plp/ba.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <unordered_map>

#include "plp/errors.hpp"

namespace plp {

double RobustKernel::cost(double chi2) const {
  const double d2 = delta * delta;
  if (chi2 <= d2) {
    return chi2;
  }
  return 2.0 * delta * std::sqrt(chi2) - d2;
}

double RobustKernel::weight(double chi2) const {
  const double d2 = delta * delta;
  if (chi2 <= d2) {
    return 1.0;
  }
  return delta / std::sqrt(chi2);
}

int BAProblem::count_valid_observations() const {
  int n = 0;
  for (const BAPointObs& o : point_obs) {
    n += o.valid ? 1 : 0;
  }
  for (const BALineObs& o : line_obs) {
    n += o.valid ? 1 : 0;
  }
  return n;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ObsRef {
  int id = 0;
  bool is_line = false;
  int idx = 0;
};

std::vector<ObsRef> ordered_observations(const BAProblem& p) {
  std::vector<ObsRef> order;
  order.reserve(p.point_obs.size() + p.line_obs.size());
  for (size_t i = 0; i < p.point_obs.size(); ++i) {
    order.push_back({p.point_obs[i].id, false, static_cast<int>(i)});
  }
  for (size_t i = 0; i < p.line_obs.size(); ++i) {
    order.push_back({p.line_obs[i].id, true, static_cast<int>(i)});
  }
  std::sort(order.begin(), order.end(),
            [](const ObsRef& a, const ObsRef& b) { return a.id < b.id; });
  return order;
}

Vec2 point_residual(const BAProblem& p, const BAPointObs& o) {
  const PixelPoint pred =
      project_point(p.poses[o.pose].pose, p.intrinsics, p.points[o.point].position);
  return Vec2(pred.u - o.pixel.u, pred.v - o.pixel.v);
}

Vec2 line_residual(const BAProblem& p, const BALineObs& o) {
  const PlueckerLine line_c =
      transform_line(p.poses[o.pose].pose, p.lines[o.line].pluecker);
  const Vec3 l = project_line(p.intrinsics, line_c);
  return line_reprojection_error(l, o.segment);
}

// d e / d l for the incidence residual, 2x3.
Mat23 error_wrt_image_line(const Vec3& l, const ImageLineSegment& seg) {
  const double n2 = l[0] * l[0] + l[1] * l[1];
  const double n = std::sqrt(n2);
  Mat23 J;
  const Vec3 xs = seg.s.homogeneous();
  const Vec3 xe = seg.e.homogeneous();
  const double as = xs.dot(l) / n2;
  const double ae = xe.dot(l) / n2;
  J.row(0) = (xs - as * Vec3(l[0], l[1], 0.0)).transpose() / n;
  J.row(1) = (xe - ae * Vec3(l[0], l[1], 0.0)).transpose() / n;
  return J;
}

// d L_w / d (theta_vec, theta) of the orthonormal parameterization, 6x4.
Mat64 line_wrt_orthonormal(const OrthonormalLine& o) {
  const double w1 = o.W(0, 0);
  const double w2 = o.W(1, 0);
  const Vec3 u1 = o.U.col(0);
  const Vec3 u2 = o.U.col(1);
  const Vec3 u3 = o.U.col(2);
  Mat64 D = Mat64::Zero();
  D.block<3, 1>(3, 0) = w2 * u3;
  D.block<3, 1>(0, 1) = -w1 * u3;
  D.block<3, 1>(0, 2) = w1 * u2;
  D.block<3, 1>(3, 2) = -w2 * u1;
  D.block<3, 1>(0, 3) = -w2 * u1;
  D.block<3, 1>(3, 3) = w1 * u2;
  return D;
}

}  // namespace

VecX residuals(BAProblem& problem, std::vector<int>* newly_invalid) {
  const std::vector<ObsRef> order = ordered_observations(problem);
  std::vector<double> values;
  values.reserve(2 * order.size());
  for (const ObsRef& ref : order) {
    try {
      if (ref.is_line) {
        BALineObs& o = problem.line_obs[ref.idx];
        if (!o.valid) {
          continue;
        }
        const Vec2 e = line_residual(problem, o);
        values.push_back(e[0]);
        values.push_back(e[1]);
      } else {
        BAPointObs& o = problem.point_obs[ref.idx];
        if (!o.valid) {
          continue;
        }
        const Vec2 e = point_residual(problem, o);
        values.push_back(e[0]);
        values.push_back(e[1]);
      }
    } catch (const Error&) {
      if (ref.is_line) {
        problem.line_obs[ref.idx].valid = false;
      } else {
        problem.point_obs[ref.idx].valid = false;
      }
      if (newly_invalid != nullptr) {
        newly_invalid->push_back(ref.id);
      }
    }
  }
  return Eigen::Map<VecX>(values.data(), static_cast<int>(values.size()));
}

double robust_cost(const BAProblem& problem, const RobustKernel& kernel) {
  double cost = 0.0;
  try {
    for (const BAPointObs& o : problem.point_obs) {
      if (!o.valid) {
        continue;
      }
      const Vec2 e = point_residual(problem, o);
      cost += kernel.cost(e.dot(o.info * e));
    }
    for (const BALineObs& o : problem.line_obs) {
      if (!o.valid) {
        continue;
      }
      const Vec2 e = line_residual(problem, o);
      cost += kernel.cost(e.dot(o.info * e));
    }
  } catch (const Error&) {
    return kInf;
  }
  return cost;
}

PointJacobians point_jacobians(const BAProblem& problem,
                               const BAPointObs& obs) {
  const PoseSE3& pose = problem.poses[obs.pose].pose;
  const CameraIntrinsics& K = problem.intrinsics;
  const Vec3 xc = pose.transform(problem.points[obs.point].position);
  if (xc.z() <= kMinDepth) {
    throw BehindCamera("point_jacobians");
  }
  const double iz = 1.0 / xc.z();
  PointJacobians out;
  out.residual = Vec2(K.fx * xc.x() * iz + K.cx - obs.pixel.u,
                      K.fy * xc.y() * iz + K.cy - obs.pixel.v);
  Mat23 de_dxc;
  de_dxc << K.fx * iz, 0.0, -K.fx * xc.x() * iz * iz,
            0.0, K.fy * iz, -K.fy * xc.y() * iz * iz;
  out.J_point = de_dxc * pose.rotation;
  out.J_pose.leftCols<3>() = -de_dxc * skew(xc);
  out.J_pose.rightCols<3>() = de_dxc;
  return out;
}

LineJacobians line_jacobians(const BAProblem& problem, const BALineObs& obs) {
  const PoseSE3& pose = problem.poses[obs.pose].pose;
  const BALine& line = problem.lines[obs.line];
  const PlueckerLine line_c = transform_line(pose, line.pluecker);
  const Vec3 l = project_line(problem.intrinsics, line_c);
  const double n2 = l[0] * l[0] + l[1] * l[1];
  if (n2 <= 1e-18) {
    throw DegenerateProjection("line_jacobians");
  }

  LineJacobians out;
  out.residual = line_reprojection_error(l, obs.segment);
  const Mat23 de_dl = error_wrt_image_line(l, obs.segment);
  const Mat3 KL = line_intrinsics(problem.intrinsics);
  const Mat23 de_dm = de_dl * KL;  // through l = K_L m_c

  const Vec3 Rd = pose.rotation * line.pluecker.d;
  out.J_pose.leftCols<3>() = -de_dm * skew(line_c.m);
  out.J_pose.rightCols<3>() = -de_dm * skew(Rd);

  Mat36 m_wrt_Lw;
  m_wrt_Lw.leftCols<3>() = pose.rotation;
  m_wrt_Lw.rightCols<3>() = skew(pose.translation) * pose.rotation;
  out.J_line = de_dm * m_wrt_Lw * line_wrt_orthonormal(line.state);
  return out;
}

namespace {

struct Columns {
  std::vector<int> pose_col;
  std::vector<int> point_col;
  std::vector<int> line_col;
  int pose_dim = 0;
  int lm_dim = 0;
};

Columns build_columns(const BAProblem& p) {
  Columns c;
  c.pose_col.assign(p.poses.size(), -1);
  c.point_col.assign(p.points.size(), -1);
  c.line_col.assign(p.lines.size(), -1);
  for (size_t i = 0; i < p.poses.size(); ++i) {
    if (!p.poses[i].fixed) {
      c.pose_col[i] = c.pose_dim;
      c.pose_dim += 6;
    }
  }
  if (p.optimize_landmarks) {
    for (size_t i = 0; i < p.points.size(); ++i) {
      c.point_col[i] = c.lm_dim;
      c.lm_dim += 3;
    }
    for (size_t i = 0; i < p.lines.size(); ++i) {
      c.line_col[i] = c.lm_dim;
      c.lm_dim += 4;
    }
  }
  return c;
}

struct Normal {
  MatX Hpp;
  VecX gp;
  MatX Hpl;
  std::vector<Mat3> Hpt;
  std::vector<Vec3> gpt;
  std::vector<Mat4> Hln;
  std::vector<Vec4> gln;
  double max_diag = 0.0;
  double grad_inf = 0.0;
};

Normal assemble(const BAProblem& p, const Columns& cols,
                const RobustKernel& kernel) {
  Normal n;
  n.Hpp = MatX::Zero(cols.pose_dim, cols.pose_dim);
  n.gp = VecX::Zero(cols.pose_dim);
  n.Hpl = MatX::Zero(cols.pose_dim, cols.lm_dim);
  n.Hpt.assign(p.points.size(), Mat3::Zero());
  n.gpt.assign(p.points.size(), Vec3::Zero());
  n.Hln.assign(p.lines.size(), Mat4::Zero());
  n.gln.assign(p.lines.size(), Vec4::Zero());

  for (const BAPointObs& o : p.point_obs) {
    if (!o.valid) {
      continue;
    }
    const PointJacobians jac = point_jacobians(p, o);
    const double chi2 = jac.residual.dot(o.info * jac.residual);
    const Mat2 W = kernel.weight(chi2) * o.info;
    const int pc = cols.pose_col[o.pose];
    const int lc = cols.point_col[o.point];
    if (pc >= 0) {
      n.Hpp.block<6, 6>(pc, pc) += jac.J_pose.transpose() * W * jac.J_pose;
      n.gp.segment<6>(pc) += jac.J_pose.transpose() * W * jac.residual;
    }
    if (lc >= 0) {
      n.Hpt[o.point] += jac.J_point.transpose() * W * jac.J_point;
      n.gpt[o.point] += jac.J_point.transpose() * W * jac.residual;
      if (pc >= 0) {
        n.Hpl.block<6, 3>(pc, lc) += jac.J_pose.transpose() * W * jac.J_point;
      }
    }
  }
  for (const BALineObs& o : p.line_obs) {
    if (!o.valid) {
      continue;
    }
    const LineJacobians jac = line_jacobians(p, o);
    const double chi2 = jac.residual.dot(o.info * jac.residual);
    const Mat2 W = kernel.weight(chi2) * o.info;
    const int pc = cols.pose_col[o.pose];
    const int lc = cols.line_col[o.line];
    if (pc >= 0) {
      n.Hpp.block<6, 6>(pc, pc) += jac.J_pose.transpose() * W * jac.J_pose;
      n.gp.segment<6>(pc) += jac.J_pose.transpose() * W * jac.residual;
    }
    if (lc >= 0) {
      n.Hln[o.line] += jac.J_line.transpose() * W * jac.J_line;
      n.gln[o.line] += jac.J_line.transpose() * W * jac.residual;
      if (pc >= 0) {
        n.Hpl.block<6, 4>(pc, lc) += jac.J_pose.transpose() * W * jac.J_line;
      }
    }
  }

  if (cols.pose_dim > 0) {
    n.max_diag = n.Hpp.diagonal().maxCoeff();
    n.grad_inf = n.gp.lpNorm<Eigen::Infinity>();
  }
  if (cols.lm_dim > 0) {
    for (size_t i = 0; i < p.points.size(); ++i) {
      n.max_diag = std::max(n.max_diag, n.Hpt[i].diagonal().maxCoeff());
      n.grad_inf = std::max(n.grad_inf, n.gpt[i].lpNorm<Eigen::Infinity>());
    }
    for (size_t i = 0; i < p.lines.size(); ++i) {
      n.max_diag = std::max(n.max_diag, n.Hln[i].diagonal().maxCoeff());
      n.grad_inf = std::max(n.grad_inf, n.gln[i].lpNorm<Eigen::Infinity>());
    }
  }
  return n;
}

struct StateBackup {
  std::vector<BAPose> poses;
  std::vector<BAPoint> points;
  std::vector<BALine> lines;
};

StateBackup save_state(const BAProblem& p) {
  return {p.poses, p.points, p.lines};
}

void restore_state(BAProblem& p, const StateBackup& s) {
  p.poses = s.poses;
  p.points = s.points;
  p.lines = s.lines;
}

// Returns false when the reduced system is not solvable at this damping.
bool solve_step(const BAProblem& p, const Columns& cols, const Normal& n,
                double lambda, VecX& dp, VecX& dl) {
  MatX S = n.Hpp;
  S.diagonal().array() += lambda;
  VecX rhs = -n.gp;
  dl = VecX::Zero(cols.lm_dim);

  std::vector<Mat3> point_inv(p.points.size());
  std::vector<Mat4> line_inv(p.lines.size());
  if (cols.lm_dim > 0) {
    for (size_t i = 0; i < p.points.size(); ++i) {
      Mat3 A = n.Hpt[i];
      A.diagonal().array() += lambda;
      point_inv[i] = A.inverse();
      const int lc = cols.point_col[i];
      if (cols.pose_dim > 0) {
        const auto B = n.Hpl.middleCols<3>(lc);
        S -= B * point_inv[i] * B.transpose();
        rhs += B * point_inv[i] * n.gpt[i];
      }
    }
    for (size_t i = 0; i < p.lines.size(); ++i) {
      Mat4 A = n.Hln[i];
      A.diagonal().array() += lambda;
      line_inv[i] = A.inverse();
      const int lc = cols.line_col[i];
      if (cols.pose_dim > 0) {
        const auto B = n.Hpl.middleCols<4>(lc);
        S -= B * line_inv[i] * B.transpose();
        rhs += B * line_inv[i] * n.gln[i];
      }
    }
  }

  dp = VecX::Zero(cols.pose_dim);
  if (cols.pose_dim > 0) {
    Eigen::LDLT<MatX> ldlt(S);
    if (ldlt.info() != Eigen::Success) {
      return false;
    }
    dp = ldlt.solve(rhs);
    if (!dp.allFinite()) {
      return false;
    }
  }

  if (cols.lm_dim > 0) {
    for (size_t i = 0; i < p.points.size(); ++i) {
      const int lc = cols.point_col[i];
      Vec3 b = -n.gpt[i];
      if (cols.pose_dim > 0) {
        b -= n.Hpl.middleCols<3>(lc).transpose() * dp;
      }
      dl.segment<3>(lc) = point_inv[i] * b;
    }
    for (size_t i = 0; i < p.lines.size(); ++i) {
      const int lc = cols.line_col[i];
      Vec4 b = -n.gln[i];
      if (cols.pose_dim > 0) {
        b -= n.Hpl.middleCols<4>(lc).transpose() * dp;
      }
      dl.segment<4>(lc) = line_inv[i] * b;
    }
    if (!dl.allFinite()) {
      return false;
    }
  }
  return true;
}

void apply_step(BAProblem& p, const Columns& cols, const VecX& dp,
                const VecX& dl) {
  for (size_t i = 0; i < p.poses.size(); ++i) {
    const int pc = cols.pose_col[i];
    if (pc >= 0) {
      p.poses[i].pose = se3_retract(p.poses[i].pose, dp.segment<6>(pc));
    }
  }
  if (p.optimize_landmarks) {
    for (size_t i = 0; i < p.points.size(); ++i) {
      p.points[i].position += dl.segment<3>(cols.point_col[i]);
    }
    for (size_t i = 0; i < p.lines.size(); ++i) {
      p.lines[i].state =
          update_orthonormal(p.lines[i].state, dl.segment<4>(cols.line_col[i]));
      p.lines[i].refresh();
    }
  }
}

// One LM run over the currently valid observations. Appends accepted costs to
// the trace; throws DivergedSolve when damping blows up away from a minimum.
void lm_run(BAProblem& problem, const RobustKernel& kernel,
            const SolverConfig& config, int max_iters, SolverReport& report) {
  const Columns cols = build_columns(problem);
  double cost = robust_cost(problem, kernel);
  report.cost_trace.push_back(cost);
  if (cost <= config.cost_floor || (cols.pose_dim == 0 && cols.lm_dim == 0)) {
    report.converged = true;
    return;
  }

  double lambda = -1.0;
  for (int iter = 0; iter < max_iters; ++iter) {
    const Normal normal = assemble(problem, cols, kernel);
    if (normal.grad_inf <= 1e-14 * std::max(1.0, cost)) {
      report.converged = true;
      return;
    }
    if (lambda < 0.0) {
      lambda = config.init_lambda_scale * std::max(normal.max_diag, 1e-12);
    }

    bool accepted = false;
    while (lambda <= config.max_lambda) {
      VecX dp, dl;
      if (!solve_step(problem, cols, normal, lambda, dp, dl)) {
        lambda *= 10.0;
        continue;
      }
      const double step_inf =
          std::max(cols.pose_dim > 0 ? dp.lpNorm<Eigen::Infinity>() : 0.0,
                   cols.lm_dim > 0 ? dl.lpNorm<Eigen::Infinity>() : 0.0);
      if (step_inf <= 1e-14) {
        report.converged = true;
        return;
      }
      const StateBackup backup = save_state(problem);
      apply_step(problem, cols, dp, dl);
      const double trial = robust_cost(problem, kernel);
      if (trial < cost) {
        const double rel_change = (cost - trial) / std::max(cost, 1e-300);
        cost = trial;
        report.cost_trace.push_back(cost);
        ++report.iterations;
        lambda = std::max(lambda * 0.1, 1e-18);
        accepted = true;
        if (rel_change < config.relative_tol || cost <= config.cost_floor) {
          report.converged = true;
          return;
        }
        break;
      }
      restore_state(problem, backup);
      lambda *= 10.0;
    }
    if (!accepted) {
      throw DivergedSolve("lm_run: damping exceeded limit");
    }
  }
}

void validate_observations(BAProblem& problem, SolverReport& report) {
  residuals(problem, &report.invalid_observations);
}

double median_depth_in(const BAProblem& p, int pose_slot) {
  std::vector<double> depths;
  const PoseSE3& pose = p.poses[pose_slot].pose;
  for (const BAPoint& pt : p.points) {
    const double z = pose.transform(pt.position).z();
    if (z > 0.0) {
      depths.push_back(z);
    }
  }
  if (depths.empty()) {
    return kInf;
  }
  const size_t mid = depths.size() / 2;
  std::nth_element(depths.begin(), depths.begin() + mid, depths.end());
  return depths[mid];
}

// First valid observation (lowest id) of each line, or -1.
std::vector<int> line_reference_obs(const BAProblem& p) {
  std::vector<int> ref(p.lines.size(), -1);
  std::vector<int> best_id(p.lines.size(), std::numeric_limits<int>::max());
  for (size_t i = 0; i < p.line_obs.size(); ++i) {
    const BALineObs& o = p.line_obs[i];
    if (!o.valid) {
      continue;
    }
    if (o.id < best_id[o.line]) {
      best_id[o.line] = o.id;
      ref[o.line] = static_cast<int>(i);
    }
  }
  return ref;
}

}  // namespace

SolverReport solve_motion_only(BAProblem& problem, const RobustKernel& kernel,
                               int max_iters) {
  problem.optimize_landmarks = false;
  for (size_t i = 0; i < problem.poses.size(); ++i) {
    if (problem.poses[i].fixed) {
      continue;
    }
    int count = 0;
    for (const BAPointObs& o : problem.point_obs) {
      count += (o.valid && o.pose == static_cast<int>(i)) ? 1 : 0;
    }
    for (const BALineObs& o : problem.line_obs) {
      count += (o.valid && o.pose == static_cast<int>(i)) ? 1 : 0;
    }
    if (count < 4) {
      throw InsufficientObservations("solve_motion_only: pose needs >= 4 observations");
    }
  }

  SolverReport report;
  validate_observations(problem, report);
  report.initial_cost = robust_cost(problem, kernel);
  lm_run(problem, kernel, SolverConfig{}, max_iters, report);
  report.final_cost = robust_cost(problem, kernel);
  report.inlier_count = problem.count_valid_observations();
  return report;
}

SolverReport solve_local_ba(
    BAProblem& problem, const RobustKernel& kernel, const SolverConfig& config,
    const std::function<void(BAProblem&)>& between_rounds) {
  if (problem.optimize_landmarks) {
    const bool any_fixed =
        std::any_of(problem.poses.begin(), problem.poses.end(),
                    [](const BAPose& p) { return p.fixed; });
    if (!any_fixed) {
      throw GaugeUnderconstrained("solve_local_ba: no fixed pose");
    }
  }

  SolverReport report;
  validate_observations(problem, report);
  report.initial_cost = robust_cost(problem, kernel);

  // Pre-optimization endpoint snapshot for the trimming ratio test.
  std::vector<int> ref_obs = line_reference_obs(problem);
  std::vector<std::optional<LineSegment3>> snapshot(problem.lines.size());
  for (size_t li = 0; li < problem.lines.size(); ++li) {
    if (ref_obs[li] < 0) {
      continue;
    }
    const BALineObs& o = problem.line_obs[ref_obs[li]];
    try {
      snapshot[li] = trim_endpoints(problem.lines[li].pluecker, o.segment,
                                    problem.poses[o.pose].pose,
                                    problem.intrinsics);
    } catch (const Error&) {
      snapshot[li] = std::nullopt;
    }
  }

  for (int round = 0; round < config.rounds; ++round) {
    validate_observations(problem, report);
    lm_run(problem, kernel, config, config.max_iterations, report);

    if (round + 1 >= config.rounds) {
      break;
    }

    // Chi-square gate on the whitened squared residual.
    for (BAPointObs& o : problem.point_obs) {
      if (!o.valid) {
        continue;
      }
      const Vec2 e = point_residual(problem, o);
      if (e.dot(o.info * e) > config.chi2_threshold) {
        o.valid = false;
        report.rejected_observations.push_back(o.id);
      }
    }
    for (BALineObs& o : problem.line_obs) {
      if (!o.valid) {
        continue;
      }
      const Vec2 e = line_residual(problem, o);
      if (e.dot(o.info * e) > config.chi2_threshold) {
        o.valid = false;
        report.rejected_observations.push_back(o.id);
      }
    }

    // Positive depth and endpoint displacement culling per line landmark.
    ref_obs = line_reference_obs(problem);
    for (size_t li = 0; li < problem.lines.size(); ++li) {
      if (ref_obs[li] < 0) {
        continue;
      }
      const BALineObs& o = problem.line_obs[ref_obs[li]];
      bool cull = false;
      try {
        const LineSegment3 trimmed =
            trim_endpoints(problem.lines[li].pluecker, o.segment,
                           problem.poses[o.pose].pose, problem.intrinsics);
        if (snapshot[li].has_value()) {
          const double dx =
              std::max((trimmed.start - snapshot[li]->start).norm(),
                       (trimmed.end - snapshot[li]->end).norm());
          const double med = median_depth_in(problem, o.pose);
          if (std::isfinite(med) && dx / med >= config.trim_ratio) {
            cull = true;
          }
        }
      } catch (const Error&) {
        cull = true;  // behind camera or degenerate after optimization
      }
      if (cull) {
        report.rejected_line_landmarks.push_back(problem.lines[li].id);
        for (BALineObs& obs : problem.line_obs) {
          if (obs.line == static_cast<int>(li)) {
            obs.valid = false;
          }
        }
      }
    }

    if (between_rounds) {
      between_rounds(problem);
    }
  }

  report.final_cost = robust_cost(problem, kernel);
  report.inlier_count = problem.count_valid_observations();
  return report;
}

void apply_point_plane_step(MapStore& map) {
  std::vector<Vec3> positions(map.points.size());
  for (size_t i = 0; i < map.points.size(); ++i) {
    positions[i] = map.points[i].position;
  }
  for (const PlaneLandmark& plane : map.planes) {
    if (!plane.alive) {
      continue;
    }
    refine_members(plane.plane, positions);
  }
  for (const PlaneLandmark& plane : map.planes) {
    if (!plane.alive) {
      continue;
    }
    for (int id : plane.plane.member_ids) {
      map.points.at(id).position = positions.at(id);
    }
  }
}

std::pair<PoseSE3, SolverReport> relocalize(
    const std::vector<PointMatch>& point_matches,
    const std::vector<LineMatch>& line_matches, const PoseSE3& init,
    const CameraIntrinsics& K, const RobustKernel& kernel,
    const SolverConfig& config) {
  if (point_matches.size() + line_matches.size() < 6) {
    throw InsufficientObservations("relocalize: need >= 6 matches");
  }
  BAProblem problem;
  problem.intrinsics = K;
  problem.optimize_landmarks = false;
  problem.poses.push_back({0, init, false});
  int obs_id = 0;
  for (const PointMatch& m : point_matches) {
    const int slot = static_cast<int>(problem.points.size());
    problem.points.push_back({slot, m.position});
    problem.point_obs.push_back({obs_id++, 0, slot, m.pixel, Mat2::Identity(), true});
  }
  for (const LineMatch& m : line_matches) {
    const int slot = static_cast<int>(problem.lines.size());
    BALine line;
    line.id = slot;
    line.state = to_orthonormal(m.line);
    line.refresh();
    problem.lines.push_back(line);
    problem.line_obs.push_back({obs_id++, 0, slot, m.segment, Mat2::Identity(), true});
  }

  SolverReport report;
  validate_observations(problem, report);
  report.initial_cost = robust_cost(problem, kernel);
  lm_run(problem, kernel, config, config.max_iterations, report);
  for (BAPointObs& o : problem.point_obs) {
    if (o.valid) {
      const Vec2 e = point_residual(problem, o);
      if (e.dot(o.info * e) > config.chi2_threshold) {
        o.valid = false;
        report.rejected_observations.push_back(o.id);
      }
    }
  }
  for (BALineObs& o : problem.line_obs) {
    if (o.valid) {
      const Vec2 e = line_residual(problem, o);
      if (e.dot(o.info * e) > config.chi2_threshold) {
        o.valid = false;
        report.rejected_observations.push_back(o.id);
      }
    }
  }
  lm_run(problem, kernel, config, config.max_iterations, report);
  report.final_cost = robust_cost(problem, kernel);
  report.inlier_count = problem.count_valid_observations();
  return {problem.poses[0].pose, report};
}

BAProblem build_problem(const MapStore& map, const std::vector<int>& window) {
  BAProblem problem;
  problem.intrinsics = map.intrinsics;

  std::unordered_map<int, int> pose_slot;
  for (const Keyframe& kf : map.keyframes) {
    if (!window.empty() &&
        std::find(window.begin(), window.end(), kf.id) == window.end()) {
      continue;
    }
    pose_slot[kf.id] = static_cast<int>(problem.poses.size());
    problem.poses.push_back({kf.id, kf.pose, kf.fixed});
  }

  // Landmarks need two valid in-window observations to be optimizable.
  std::unordered_map<int, int> point_count, line_count;
  for (const PointObservation& o : map.point_obs) {
    if (o.valid && pose_slot.count(o.keyframe) &&
        map.points.at(o.landmark).alive) {
      ++point_count[o.landmark];
    }
  }
  for (const LineObservation& o : map.line_obs) {
    if (o.valid && pose_slot.count(o.keyframe) &&
        map.lines.at(o.landmark).alive) {
      ++line_count[o.landmark];
    }
  }

  std::unordered_map<int, int> point_slot, line_slot;
  for (const PointLandmark& lm : map.points) {
    if (lm.alive && point_count[lm.id] >= 2) {
      point_slot[lm.id] = static_cast<int>(problem.points.size());
      problem.points.push_back({lm.id, lm.position});
    }
  }
  for (const LineLandmark& lm : map.lines) {
    if (lm.alive && line_count[lm.id] >= 2) {
      BALine line;
      line.id = lm.id;
      line.state = lm.state;
      line.pluecker = lm.pluecker;
      line_slot[lm.id] = static_cast<int>(problem.lines.size());
      problem.lines.push_back(line);
    }
  }

  for (const PointObservation& o : map.point_obs) {
    if (!o.valid || !pose_slot.count(o.keyframe) || !point_slot.count(o.landmark)) {
      continue;
    }
    problem.point_obs.push_back(
        {o.id, pose_slot[o.keyframe], point_slot[o.landmark], o.pixel, o.info, true});
  }
  for (const LineObservation& o : map.line_obs) {
    if (!o.valid || !pose_slot.count(o.keyframe) || !line_slot.count(o.landmark)) {
      continue;
    }
    problem.line_obs.push_back(
        {o.id, pose_slot[o.keyframe], line_slot[o.landmark], o.segment, o.info, true});
  }
  return problem;
}

void write_back(const BAProblem& problem, const SolverReport& report,
                MapStore& map) {
  for (const BAPose& p : problem.poses) {
    for (Keyframe& kf : map.keyframes) {
      if (kf.id == p.id) {
        kf.pose = p.pose;
        break;
      }
    }
  }
  for (const BAPoint& p : problem.points) {
    map.points.at(p.id).position = p.position;
  }
  for (const BALine& l : problem.lines) {
    LineLandmark& lm = map.lines.at(l.id);
    lm.state = l.state;
    lm.pluecker = l.pluecker;
  }

  for (int id : report.rejected_observations) {
    for (PointObservation& o : map.point_obs) {
      if (o.id == id) {
        o.valid = false;
      }
    }
    for (LineObservation& o : map.line_obs) {
      if (o.id == id) {
        o.valid = false;
      }
    }
  }
  for (int id : report.invalid_observations) {
    for (PointObservation& o : map.point_obs) {
      if (o.id == id) {
        o.valid = false;
      }
    }
    for (LineObservation& o : map.line_obs) {
      if (o.id == id) {
        o.valid = false;
      }
    }
  }
  for (int id : report.rejected_line_landmarks) {
    map.lines.at(id).alive = false;
    for (LineObservation& o : map.line_obs) {
      if (o.landmark == id) {
        o.valid = false;
      }
    }
  }

  // Refresh stored line endpoints from the reference view when possible.
  for (const BALine& l : problem.lines) {
    LineLandmark& lm = map.lines.at(l.id);
    if (!lm.alive) {
      continue;
    }
    for (const LineObservation& o : map.line_obs) {
      if (o.landmark != l.id || !o.valid) {
        continue;
      }
      const Keyframe* kf = nullptr;
      for (const Keyframe& k : map.keyframes) {
        if (k.id == o.keyframe) {
          kf = &k;
          break;
        }
      }
      if (kf == nullptr) {
        continue;
      }
      try {
        lm.endpoints =
            trim_endpoints(lm.pluecker, o.segment, kf->pose, map.intrinsics);
      } catch (const Error&) {
      }
      break;
    }
  }
}

}  // namespace plp
