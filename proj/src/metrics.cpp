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
#include "plp/metrics.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "plp/errors.hpp"

namespace plp {

double TrajectoryMetrics::mean_ape() const {
  if (ape.empty()) {
    return 0.0;
  }
  double sum = 0.0;
  for (double a : ape) {
    sum += a;
  }
  return sum / static_cast<double>(ape.size());
}

Sim3Transform umeyama_alignment(const std::vector<Vec3>& src,
                                const std::vector<Vec3>& dst, bool with_scale) {
  if (src.size() != dst.size()) {
    throw LengthMismatch("umeyama_alignment: size mismatch");
  }
  const size_t n = src.size();
  if (n < 3) {
    throw DegenerateTrajectory("umeyama_alignment: fewer than 3 points");
  }

  Vec3 mean_src = Vec3::Zero();
  Vec3 mean_dst = Vec3::Zero();
  for (size_t i = 0; i < n; ++i) {
    mean_src += src[i];
    mean_dst += dst[i];
  }
  mean_src /= static_cast<double>(n);
  mean_dst /= static_cast<double>(n);

  Mat3 cov = Mat3::Zero();
  double var_src = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const Vec3 ds = src[i] - mean_src;
    const Vec3 dd = dst[i] - mean_dst;
    cov += dd * ds.transpose();
    var_src += ds.squaredNorm();
  }
  cov /= static_cast<double>(n);
  var_src /= static_cast<double>(n);

  Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sv = svd.singularValues();
  // Collinear source points leave the rotation about the axis unobservable.
  if (sv[1] <= 1e-12 * std::max(sv[0], 1e-300)) {
    throw DegenerateTrajectory("umeyama_alignment: collinear points");
  }

  Vec3 flip = Vec3::Ones();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) {
    flip[2] = -1.0;
  }
  Sim3Transform out;
  out.R = svd.matrixU() * flip.asDiagonal() * svd.matrixV().transpose();
  out.s = with_scale ? (sv.dot(flip)) / var_src : 1.0;
  out.t = mean_dst - out.s * (out.R * mean_src);
  return out;
}

TrajectoryMetrics compute_ate_positions(const std::vector<Vec3>& est,
                                        const std::vector<Vec3>& gt,
                                        AlignMode mode) {
  if (est.size() != gt.size()) {
    throw LengthMismatch("compute_ate: trajectory length mismatch");
  }
  TrajectoryMetrics metrics;
  metrics.alignment = umeyama_alignment(est, gt, mode == AlignMode::kSim3);
  double sum_sq = 0.0;
  metrics.ape.reserve(est.size());
  for (size_t i = 0; i < est.size(); ++i) {
    const double err = (gt[i] - metrics.alignment.apply(est[i])).norm();
    metrics.ape.push_back(err);
    sum_sq += err * err;
  }
  metrics.ate_rmse = std::sqrt(sum_sq / static_cast<double>(est.size()));
  return metrics;
}

TrajectoryMetrics compute_ate(const std::vector<PoseSE3>& est,
                              const std::vector<PoseSE3>& gt, AlignMode mode) {
  std::vector<Vec3> est_pos, gt_pos;
  est_pos.reserve(est.size());
  gt_pos.reserve(gt.size());
  for (const PoseSE3& p : est) {
    est_pos.push_back(p.center());
  }
  for (const PoseSE3& p : gt) {
    gt_pos.push_back(p.center());
  }
  return compute_ate_positions(est_pos, gt_pos, mode);
}

}  // namespace plp
