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
#ifndef PLP_CAMERA_HPP
#define PLP_CAMERA_HPP

#include "plp/se3.hpp"
#include "plp/types.hpp"

namespace plp {

// Undistorted pinhole model.
struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;

  Mat3 matrix() const {
    Mat3 K;
    K << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
    return K;
  }
};

struct PixelPoint {
  double u = 0.0;
  double v = 0.0;

  Vec2 vec() const { return Vec2(u, v); }
  Vec3 homogeneous() const { return Vec3(u, v, 1.0); }
};

constexpr double kMinDepth = 1e-9;

// Throws BehindCamera when the camera-frame depth is <= kMinDepth.
PixelPoint project_point(const PoseSE3& pose, const CameraIntrinsics& K,
                         const Vec3& x_world);

// Intrinsic matrix that maps a camera-frame line moment to the image line.
Mat3 line_intrinsics(const CameraIntrinsics& K);

// K [R | t], the 3x4 projection matrix of the pose.
Mat34 projection_matrix(const CameraIntrinsics& K, const PoseSE3& pose);

}  // namespace plp

#endif  // PLP_CAMERA_HPP
