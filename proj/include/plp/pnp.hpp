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
#ifndef PLP_PNP_HPP
#define PLP_PNP_HPP

#include <vector>

#include "plp/camera.hpp"
#include "plp/se3.hpp"
#include "plp/types.hpp"

namespace plp {

// Mid-point-free linear two-view triangulation (DLT + SVD).
// Throws DegenerateConfiguration when the system is rank deficient.
Vec3 triangulate_point_dlt(const std::vector<Mat34>& projections,
                           const std::vector<Vec2>& pixels);

// Linear PnP: DLT estimate of [R|t] from >= 6 world-pixel matches, with the
// rotation projected back onto SO(3). Initialization-quality only.
PoseSE3 dlt_pnp(const std::vector<Vec3>& world,
                const std::vector<Vec2>& pixels, const CameraIntrinsics& K);

}  // namespace plp

#endif  // PLP_PNP_HPP
