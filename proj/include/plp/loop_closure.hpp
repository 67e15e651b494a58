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
#ifndef PLP_LOOP_CLOSURE_HPP
#define PLP_LOOP_CLOSURE_HPP

#include <vector>

#include "plp/map_store.hpp"
#include "plp/pose_graph.hpp"
#include "plp/sim3.hpp"

namespace plp {

struct KeyframeCorrection {
  int keyframe_id = 0;
  Sim3Transform old_state;
  Sim3Transform new_state;
};

// Moves keyframes and landmarks to the corrected similarity states. Each
// landmark follows its reference keyframe: points via S_new^-1 * S_old,
// lines via the corresponding 6x6 Pluecker actions. Keyframe poses become
// [R_new, t_new / s_new]; line endpoints are re-estimated by trimming in the
// reference view and planes are refit from their corrected members.
// Throws MissingReference when a referenced keyframe has no correction.
void correct_map(MapStore& map, const std::vector<KeyframeCorrection>& corrections);

// Merges point landmarks whose positions coincide within eps_fuse, keeping
// the lower id. Returns the number of fused landmarks.
int fuse_duplicate_points(MapStore& map, double eps_fuse);

// Sim(3) from matched 3D point pairs (least-squares, scale included).
Sim3Transform estimate_sim3_from_matches(const std::vector<Vec3>& src,
                                         const std::vector<Vec3>& dst);

// Loop constraint between two keyframes: measurement maps kf_to into kf_from.
struct LoopConstraint {
  int kf_from = 0;
  int kf_to = 0;
  Sim3Transform relative;
  double weight = 10.0;
};

// Builds the similarity pose graph of a keyframe chain: consecutive edges
// from the current (possibly drifted) states plus the given loop constraints.
// The first keyframe is fixed.
PoseGraph build_pose_graph(const MapStore& map,
                           const std::vector<LoopConstraint>& loops);

}  // namespace plp

#endif  // PLP_LOOP_CLOSURE_HPP
