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
#ifndef PLP_SCENE_HPP
#define PLP_SCENE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "plp/camera.hpp"
#include "plp/line.hpp"
#include "plp/plane.hpp"
#include "plp/se3.hpp"

namespace plp {

struct SceneConfig {
  std::string trajectory = "orbit";  // "orbit" | "corridor_loop"
  int keyframes = 10;
  int num_planes = 0;
  int points_per_plane = 0;
  int free_points = 60;
  int num_lines = 30;
  double line_on_plane_fraction = 0.5;
  Vec3 room = Vec3(8.0, 8.0, 4.0);
  CameraIntrinsics intrinsics{500.0, 500.0, 320.0, 240.0};
  int image_width = 640;
  int image_height = 480;
  double min_line_length = 0.5;
  double max_line_length = 2.0;
};

// Finite rectangular patch of an infinite plane.
struct ScenePlane {
  int id = 0;
  Vec3 center = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  Vec3 u_axis = Vec3::UnitX();
  Vec3 v_axis = Vec3::UnitY();
  double half_u = 1.0;
  double half_v = 1.0;

  Plane3 plane() const;
  Vec3 sample(double u, double v) const {
    return center + u * u_axis + v * v_axis;
  }
};

struct SyntheticScene {
  SceneConfig config;
  uint64_t seed = 0;
  std::vector<ScenePlane> planes;
  std::vector<Vec3> points;
  std::vector<int> point_plane;  // -1 for free points
  std::vector<LineSegment3> lines;
  std::vector<int> line_plane;
  std::vector<PoseSE3> trajectory;
  std::vector<double> timestamps;

  const CameraIntrinsics& K() const { return config.intrinsics; }
  bool in_image(const PixelPoint& px, double margin = 0.0) const;
};

struct PointMeas {
  int frame = 0;
  int landmark = 0;       // claimed correspondence (wrong for outliers)
  int true_landmark = 0;
  Vec2 pixel = Vec2::Zero();
  int label = -1;         // segmentation label, -1 = non-planar
  bool outlier = false;
};

struct LineMeas {
  int frame = 0;
  int landmark = 0;
  int true_landmark = 0;
  ImageLineSegment segment;
  bool outlier = false;
};

struct ObservationSet {
  std::vector<PointMeas> points;
  std::vector<LineMeas> lines;
  std::vector<uint8_t> frame_mask_corrupted;  // per frame
  double noise_px = 0.0;
  double outlier_rate = 0.0;
  double mask_corruption_rate = 0.0;
  uint64_t seed = 0;
};

// Deterministic in (config, seed). Every landmark is visible from at least
// two trajectory poses; throws InfeasibleConfig when that cannot be met.
SyntheticScene generate_scene(const SceneConfig& config, uint64_t seed);

struct RenderOptions {
  double noise_px = 0.0;
  double point_outlier_rate = 0.0;
  double line_outlier_rate = 0.0;
  double mask_corruption_rate = 0.0;
};

// Gaussian pixel noise on points and line endpoints, correspondence swaps at
// the outlier rates, and per-frame segmentation label corruption (merge or
// split) at mask_corruption_rate.
ObservationSet render_observations(const SyntheticScene& scene,
                                   const RenderOptions& options, uint64_t seed);

ObservationSet render_observations(const SyntheticScene& scene, double noise_px,
                                   double outlier_rate,
                                   double mask_corruption_rate, uint64_t seed);

}  // namespace plp

#endif  // PLP_SCENE_HPP
