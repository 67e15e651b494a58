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
#include "plp/map_store.hpp"

#include <algorithm>

#include "plp/errors.hpp"

namespace plp {

double MapStore::median_depth(int keyframe_id) const {
  const Keyframe* kf = nullptr;
  for (const Keyframe& k : keyframes) {
    if (k.id == keyframe_id) {
      kf = &k;
      break;
    }
  }
  if (kf == nullptr) {
    throw MissingReference("median_depth: unknown keyframe");
  }

  std::vector<double> depths;
  for (const PointObservation& obs : point_obs) {
    if (obs.keyframe != keyframe_id || !obs.valid) {
      continue;
    }
    const PointLandmark& lm = points.at(obs.landmark);
    if (!lm.alive) {
      continue;
    }
    const double z = kf->pose.transform(lm.position).z();
    if (z > 0.0) {
      depths.push_back(z);
    }
  }
  if (depths.empty()) {
    for (const PointLandmark& lm : points) {
      if (!lm.alive) {
        continue;
      }
      const double z = kf->pose.transform(lm.position).z();
      if (z > 0.0) {
        depths.push_back(z);
      }
    }
  }
  if (depths.empty()) {
    throw InsufficientObservations("median_depth: no point landmarks in view");
  }
  const size_t mid = depths.size() / 2;
  std::nth_element(depths.begin(), depths.begin() + mid, depths.end());
  return depths[mid];
}

}  // namespace plp
