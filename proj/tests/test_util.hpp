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
#ifndef PLP_TESTS_TEST_UTIL_HPP
#define PLP_TESTS_TEST_UTIL_HPP

#include <random>

#include "plp/camera.hpp"
#include "plp/line.hpp"
#include "plp/se3.hpp"

namespace plp::testutil {

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec3 v(gauss(rng), gauss(rng), gauss(rng));
  while (v.norm() < 1e-9) {
    v = Vec3(gauss(rng), gauss(rng), gauss(rng));
  }
  return v.normalized();
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline PoseSE3 random_pose(std::mt19937_64& rng, double max_angle = 2.8,
                           double max_trans = 2.0) {
  const Mat3 R = so3_exp(random_unit(rng) * uniform(rng, 0.0, max_angle));
  const Vec3 t(uniform(rng, -max_trans, max_trans),
               uniform(rng, -max_trans, max_trans),
               uniform(rng, -max_trans, max_trans));
  return PoseSE3(R, t);
}

inline CameraIntrinsics random_intrinsics(std::mt19937_64& rng) {
  return {uniform(rng, 300.0, 800.0), uniform(rng, 300.0, 800.0),
          uniform(rng, 250.0, 400.0), uniform(rng, 200.0, 300.0)};
}

inline PlueckerLine random_line(std::mt19937_64& rng, double spread = 3.0) {
  Vec3 a, b;
  do {
    a = Vec3(uniform(rng, -spread, spread), uniform(rng, -spread, spread),
             uniform(rng, -spread, spread));
    b = Vec3(uniform(rng, -spread, spread), uniform(rng, -spread, spread),
             uniform(rng, -spread, spread));
  } while ((a - b).norm() < 0.2 || a.cross(b).norm() < 1e-3);
  return pluecker_from_endpoints(a, b);
}

// 6-vector direction cosine of two homogeneous line representations.
inline double line_cosine(const PlueckerLine& a, const PlueckerLine& b) {
  return a.vector6().normalized().dot(b.vector6().normalized());
}

}  // namespace plp::testutil

#endif  // PLP_TESTS_TEST_UTIL_HPP
