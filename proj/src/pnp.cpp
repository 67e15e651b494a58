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
#include "plp/pnp.hpp"

#include <Eigen/SVD>

#include "plp/errors.hpp"

namespace plp {

Vec3 triangulate_point_dlt(const std::vector<Mat34>& projections,
                           const std::vector<Vec2>& pixels) {
  if (projections.size() < 2 || projections.size() != pixels.size()) {
    throw DegenerateConfiguration("triangulate_point_dlt: need >= 2 views");
  }
  MatX A(2 * projections.size(), 4);
  for (size_t i = 0; i < projections.size(); ++i) {
    const Mat34& P = projections[i];
    A.row(2 * i) = pixels[i].x() * P.row(2) - P.row(0);
    A.row(2 * i + 1) = pixels[i].y() * P.row(2) - P.row(1);
  }
  Eigen::JacobiSVD<MatX> svd(A, Eigen::ComputeThinV);
  const Vec4 X = svd.matrixV().col(3);
  if (std::abs(X[3]) < 1e-12 * X.head<3>().norm()) {
    throw DegenerateConfiguration("triangulate_point_dlt: point at infinity");
  }
  return X.head<3>() / X[3];
}

PoseSE3 dlt_pnp(const std::vector<Vec3>& world, const std::vector<Vec2>& pixels,
                const CameraIntrinsics& K) {
  if (world.size() < 6 || world.size() != pixels.size()) {
    throw InsufficientObservations("dlt_pnp: need >= 6 matches");
  }
  // Work in normalized camera coordinates to keep the system well scaled.
  MatX A = MatX::Zero(2 * world.size(), 12);
  for (size_t i = 0; i < world.size(); ++i) {
    const double xn = (pixels[i].x() - K.cx) / K.fx;
    const double yn = (pixels[i].y() - K.cy) / K.fy;
    const Vec4 Xh(world[i].x(), world[i].y(), world[i].z(), 1.0);
    A.block<1, 4>(2 * i, 0) = Xh.transpose();
    A.block<1, 4>(2 * i, 8) = -xn * Xh.transpose();
    A.block<1, 4>(2 * i + 1, 4) = Xh.transpose();
    A.block<1, 4>(2 * i + 1, 8) = -yn * Xh.transpose();
  }
  Eigen::JacobiSVD<MatX> svd(A, Eigen::ComputeThinV);
  const VecX p = svd.matrixV().col(11);

  Mat34 P;
  P.row(0) = p.segment<4>(0).transpose();
  P.row(1) = p.segment<4>(4).transpose();
  P.row(2) = p.segment<4>(8).transpose();

  Mat3 M = P.leftCols<3>();
  // Fix the overall scale and sign so that det(M) > 0 and rows unit-ish.
  const double scale = std::cbrt(std::abs(M.determinant()));
  if (scale < 1e-12) {
    throw DegenerateConfiguration("dlt_pnp: singular projection");
  }
  double sign = M.determinant() > 0.0 ? 1.0 : -1.0;
  P /= sign * scale;
  M = P.leftCols<3>();

  const Mat3 R = orthonormalized(M);
  PoseSE3 pose(R, P.col(3));

  // Cheirality: the majority of the points must land in front.
  int in_front = 0;
  for (const Vec3& X : world) {
    if (pose.transform(X).z() > 0.0) {
      ++in_front;
    }
  }
  if (2 * in_front < static_cast<int>(world.size())) {
    pose = PoseSE3(orthonormalized(-M), -P.col(3));
  }
  return pose;
}

}  // namespace plp
