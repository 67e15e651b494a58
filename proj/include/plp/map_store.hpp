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
#ifndef PLP_MAP_STORE_HPP
#define PLP_MAP_STORE_HPP

#include <vector>

#include "plp/camera.hpp"
#include "plp/line.hpp"
#include "plp/plane.hpp"
#include "plp/se3.hpp"

namespace plp {

struct Keyframe {
  int id = 0;
  double timestamp = 0.0;
  PoseSE3 pose;  // world -> camera
  bool fixed = false;
};

struct PointLandmark {
  int id = 0;
  Vec3 position = Vec3::Zero();
  int ref_keyframe = -1;
  int plane_id = -1;   // owning plane, -1 when unassigned
  bool alive = true;
};

struct LineLandmark {
  int id = 0;
  OrthonormalLine state;
  PlueckerLine pluecker;        // cache of state, unit 6-norm
  LineSegment3 endpoints;       // for visualization / trimming tests
  int ref_keyframe = -1;
  bool alive = true;
};

struct PlaneLandmark {
  int id = 0;
  Plane3 plane;
  bool alive = true;
};

struct PointObservation {
  int id = 0;          // globally unique over point + line observations
  int keyframe = 0;
  int landmark = 0;
  PixelPoint pixel;
  Mat2 info = Mat2::Identity();
  bool valid = true;
};

struct LineObservation {
  int id = 0;
  int keyframe = 0;
  int landmark = 0;
  ImageLineSegment segment;
  Mat2 info = Mat2::Identity();
  bool valid = true;
};

// Keyframes, landmarks, observations and their association edges. Single
// writer; concurrent readers only between mutations.
struct MapStore {
  CameraIntrinsics intrinsics;
  std::vector<Keyframe> keyframes;
  std::vector<PointLandmark> points;
  std::vector<LineLandmark> lines;
  std::vector<PlaneLandmark> planes;
  std::vector<PointObservation> point_obs;
  std::vector<LineObservation> line_obs;

  int next_observation_id = 0;

  // Median camera-frame depth of alive point landmarks seen in this keyframe;
  // falls back to all alive points when the keyframe has no observations.
  double median_depth(int keyframe_id) const;
};

}  // namespace plp

#endif  // PLP_MAP_STORE_HPP
