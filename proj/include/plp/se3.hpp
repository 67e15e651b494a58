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
#ifndef PLP_SE3_HPP
#define PLP_SE3_HPP

#include "plp/types.hpp"

namespace plp {

// Rigid world-to-camera transform. The rotation is kept orthonormal
// (re-orthonormalized via polar decomposition whenever drift exceeds 1e-12).
struct PoseSE3 {
  Mat3 rotation = Mat3::Identity();     // R_cw
  Vec3 translation = Vec3::Zero();      // t_cw

  PoseSE3() = default;
  PoseSE3(const Mat3& R, const Vec3& t);

  static PoseSE3 identity() { return PoseSE3(); }

  Vec3 transform(const Vec3& x_world) const { return rotation * x_world + translation; }
  Vec3 center() const { return -rotation.transpose() * translation; }

  PoseSE3 inverse() const;

  // Max-norm of R^T R - I.
  double orthonormality_drift() const;
};

Mat3 orthonormalized(const Mat3& R);

Mat3 so3_exp(const Vec3& omega);
Vec3 so3_log(const Mat3& R);

// Increment ordering is (rotation omega, translation rho).
PoseSE3 se3_exp(const Vec6& delta);
Vec6 se3_log(const PoseSE3& pose);

// Left-multiplicative update: exp(delta) * pose.
PoseSE3 se3_retract(const PoseSE3& pose, const Vec6& delta);

// Applies b first, then a.
PoseSE3 compose(const PoseSE3& a, const PoseSE3& b);

}  // namespace plp

#endif  // PLP_SE3_HPP
