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
#include "plp/camera.hpp"

#include "plp/errors.hpp"

namespace plp {

PixelPoint project_point(const PoseSE3& pose, const CameraIntrinsics& K,
                         const Vec3& x_world) {
  const Vec3 x_cam = pose.transform(x_world);
  if (x_cam.z() <= kMinDepth) {
    throw BehindCamera();
  }
  PixelPoint px;
  px.u = K.fx * x_cam.x() / x_cam.z() + K.cx;
  px.v = K.fy * x_cam.y() / x_cam.z() + K.cy;
  return px;
}

Mat3 line_intrinsics(const CameraIntrinsics& K) {
  Mat3 KL;
  KL << K.fy, 0.0, 0.0,
        0.0, K.fx, 0.0,
        -K.fy * K.cx, -K.fx * K.cy, K.fx * K.fy;
  return KL;
}

Mat34 projection_matrix(const CameraIntrinsics& K, const PoseSE3& pose) {
  Mat34 Rt;
  Rt.leftCols<3>() = pose.rotation;
  Rt.col(3) = pose.translation;
  return K.matrix() * Rt;
}

}  // namespace plp
