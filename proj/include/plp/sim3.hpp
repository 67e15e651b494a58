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
#ifndef PLP_SIM3_HPP
#define PLP_SIM3_HPP

#include "plp/se3.hpp"
#include "plp/types.hpp"

namespace plp {

// 7-DOF similarity transform x -> s R x + t with s > 0.
struct Sim3Transform {
  double s = 1.0;
  Mat3 R = Mat3::Identity();
  Vec3 t = Vec3::Zero();

  static Sim3Transform identity() { return Sim3Transform(); }

  Vec3 apply(const Vec3& x) const { return s * (R * x) + t; }
  Sim3Transform inverse() const;
};

Vec3 sim3_apply_point(const Sim3Transform& S, const Vec3& x);

// Applies b first, then a.
Sim3Transform sim3_compose(const Sim3Transform& a, const Sim3Transform& b);

// 6x6 action on Pluecker coordinates: [[sR, [t]x R], [0, R]].
Mat6 sim3_line_matrix(const Sim3Transform& S);

// Tangent ordering: (rotation omega, translation nu, log-scale sigma).
Sim3Transform sim3_exp(const Vec7& delta);
Vec7 sim3_log(const Sim3Transform& S);

Sim3Transform sim3_from_se3(const PoseSE3& pose, double scale = 1.0);

// The SE(3) pose [R, t/s] that projects identically to S for pinhole cameras.
PoseSE3 se3_from_sim3(const Sim3Transform& S);

}  // namespace plp

#endif  // PLP_SIM3_HPP
