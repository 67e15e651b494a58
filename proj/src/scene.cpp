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
#include "plp/scene.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "plp/errors.hpp"

namespace plp {

namespace {

constexpr int kMaxSampleTries = 2000;
constexpr double kVisibilityMargin = 4.0;  // px

PoseSE3 look_at(const Vec3& eye, const Vec3& target) {
  const Vec3 up = Vec3::UnitZ();
  Vec3 zc = (target - eye).normalized();
  Vec3 xc = zc.cross(up);
  if (xc.norm() < 1e-6) {
    xc = zc.cross(Vec3::UnitY());
  }
  xc.normalize();
  const Vec3 yc = zc.cross(xc);
  Mat3 R_wc;
  R_wc.col(0) = xc;
  R_wc.col(1) = yc;
  R_wc.col(2) = zc;
  const Mat3 R_cw = R_wc.transpose();
  return PoseSE3(R_cw, -R_cw * eye);
}

bool visible_from(const SyntheticScene& scene, const PoseSE3& pose,
                  const Vec3& x) {
  const Vec3 xc = pose.transform(x);
  if (xc.z() <= 0.2) {
    return false;
  }
  PixelPoint px;
  px.u = scene.K().fx * xc.x() / xc.z() + scene.K().cx;
  px.v = scene.K().fy * xc.y() / xc.z() + scene.K().cy;
  return scene.in_image(px, kVisibilityMargin);
}

int count_visible(const SyntheticScene& scene, const Vec3& x) {
  int n = 0;
  for (const PoseSE3& pose : scene.trajectory) {
    n += visible_from(scene, pose, x) ? 1 : 0;
  }
  return n;
}

int count_covisible(const SyntheticScene& scene, const Vec3& a, const Vec3& b) {
  int n = 0;
  for (const PoseSE3& pose : scene.trajectory) {
    n += (visible_from(scene, pose, a) && visible_from(scene, pose, b)) ? 1 : 0;
  }
  return n;
}

// Point inside the frustum of a random keyframe; nearly always visible from
// the neighboring keyframes as well.
Vec3 sample_in_frustum(const SyntheticScene& scene, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick_frame(
      0, static_cast<int>(scene.trajectory.size()) - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const PoseSE3& pose = scene.trajectory[pick_frame(rng)];
  const double u = scene.K().cx +
                   (unit(rng) - 0.5) * 0.7 * scene.config.image_width;
  const double v = scene.K().cy +
                   (unit(rng) - 0.5) * 0.7 * scene.config.image_height;
  const double depth = 1.2 + 2.5 * unit(rng);
  const Vec3 ray((u - scene.K().cx) / scene.K().fx,
                 (v - scene.K().cy) / scene.K().fy, 1.0);
  return pose.inverse().transform(ray * depth);
}

std::vector<ScenePlane> make_plane_patches(const SceneConfig& cfg) {
  const double hx = cfg.room.x() * 0.5;
  const double hy = cfg.room.y() * 0.5;
  const double hz = cfg.room.z() * 0.5;
  std::vector<ScenePlane> all;
  // Floor.
  all.push_back({0, Vec3(0, 0, 0), Vec3::UnitZ(), Vec3::UnitX(), Vec3::UnitY(),
                 hx * 0.55, hy * 0.55});
  // Back wall (+y), facing the room center.
  all.push_back({1, Vec3(0, hy, hz), -Vec3::UnitY(), Vec3::UnitX(),
                 Vec3::UnitZ(), hx * 0.55, hz * 0.8});
  // Side wall (-x).
  all.push_back({2, Vec3(-hx, 0, hz), Vec3::UnitX(), Vec3::UnitY(),
                 Vec3::UnitZ(), hy * 0.55, hz * 0.8});
  // Front wall (-y).
  all.push_back({3, Vec3(0, -hy, hz), Vec3::UnitY(), Vec3::UnitX(),
                 Vec3::UnitZ(), hx * 0.55, hz * 0.8});
  // Side wall (+x).
  all.push_back({4, Vec3(hx, 0, hz), -Vec3::UnitX(), Vec3::UnitY(),
                 Vec3::UnitZ(), hy * 0.55, hz * 0.8});
  all.resize(std::min<size_t>(all.size(), static_cast<size_t>(cfg.num_planes)));
  return all;
}

}  // namespace

Plane3 ScenePlane::plane() const {
  Plane3 pi;
  pi.n = normal.normalized();
  pi.d = -pi.n.dot(center);
  return pi;
}

bool SyntheticScene::in_image(const PixelPoint& px, double margin) const {
  return px.u >= margin && px.u <= config.image_width - 1 - margin &&
         px.v >= margin && px.v <= config.image_height - 1 - margin;
}

SyntheticScene generate_scene(const SceneConfig& config, uint64_t seed) {
  if (config.keyframes < 2) {
    throw InfeasibleConfig("generate_scene: need at least 2 keyframes");
  }
  if (config.num_planes > 5) {
    throw InfeasibleConfig("generate_scene: at most 5 plane patches");
  }
  SyntheticScene scene;
  scene.config = config;
  scene.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Trajectory.
  const Vec3 center(0.0, 0.0, config.room.z() * 0.5);
  if (config.trajectory == "orbit") {
    const double radius = 0.33 * std::min(config.room.x(), config.room.y());
    for (int i = 0; i < config.keyframes; ++i) {
      const double angle = 2.0 * M_PI * i / config.keyframes;
      const Vec3 eye = center + Vec3(radius * std::cos(angle),
                                     radius * std::sin(angle), 0.12 * std::sin(2.0 * angle));
      scene.trajectory.push_back(look_at(eye, center));
      scene.timestamps.push_back(static_cast<double>(i));
    }
  } else if (config.trajectory == "corridor_loop") {
    // Closed circuit; the last pose coincides with the first.
    const double rx = 0.3 * config.room.x();
    const double ry = 0.3 * config.room.y();
    for (int i = 0; i < config.keyframes; ++i) {
      const double t =
          static_cast<double>(i) / static_cast<double>(config.keyframes - 1);
      const double angle = 2.0 * M_PI * t;
      const Vec3 eye =
          center + Vec3(rx * std::cos(angle), ry * std::sin(angle), 0.0);
      // Look along the path tangent.
      const Vec3 tangent(-rx * std::sin(angle), ry * std::cos(angle), 0.0);
      scene.trajectory.push_back(look_at(eye, eye + tangent.normalized()));
      scene.timestamps.push_back(static_cast<double>(i));
    }
  } else {
    throw InfeasibleConfig("generate_scene: unknown trajectory type");
  }

  scene.planes = make_plane_patches(config);

  // Plane-attached points.
  for (const ScenePlane& patch : scene.planes) {
    for (int k = 0; k < config.points_per_plane; ++k) {
      bool placed = false;
      for (int attempt = 0; attempt < kMaxSampleTries; ++attempt) {
        const double u = (unit(rng) * 2.0 - 1.0) * patch.half_u;
        const double v = (unit(rng) * 2.0 - 1.0) * patch.half_v;
        const Vec3 x = patch.sample(u, v);
        if (count_visible(scene, x) >= 2) {
          scene.points.push_back(x);
          scene.point_plane.push_back(patch.id);
          placed = true;
          break;
        }
      }
      if (!placed) {
        throw InfeasibleConfig("generate_scene: plane patch not observable");
      }
    }
  }

  // Free points.
  for (int k = 0; k < config.free_points; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxSampleTries; ++attempt) {
      const Vec3 x = sample_in_frustum(scene, rng);
      if (count_visible(scene, x) >= 2) {
        scene.points.push_back(x);
        scene.point_plane.push_back(-1);
        placed = true;
        break;
      }
    }
    if (!placed) {
      throw InfeasibleConfig("generate_scene: free point not observable");
    }
  }

  // Line segments.
  const int on_plane_lines =
      scene.planes.empty()
          ? 0
          : static_cast<int>(std::lround(config.num_lines *
                                         config.line_on_plane_fraction));
  for (int k = 0; k < config.num_lines; ++k) {
    const bool on_plane = k < on_plane_lines;
    bool placed = false;
    for (int attempt = 0; attempt < kMaxSampleTries; ++attempt) {
      Vec3 a, b;
      int plane_id = -1;
      if (on_plane) {
        const ScenePlane& patch =
            scene.planes[static_cast<size_t>(k) % scene.planes.size()];
        const double u0 = (unit(rng) * 2.0 - 1.0) * patch.half_u;
        const double v0 = (unit(rng) * 2.0 - 1.0) * patch.half_v;
        const double u1 = (unit(rng) * 2.0 - 1.0) * patch.half_u;
        const double v1 = (unit(rng) * 2.0 - 1.0) * patch.half_v;
        a = patch.sample(u0, v0);
        b = patch.sample(u1, v1);
        plane_id = patch.id;
      } else {
        a = sample_in_frustum(scene, rng);
        Vec3 dir(unit(rng) * 2.0 - 1.0, unit(rng) * 2.0 - 1.0,
                 unit(rng) * 2.0 - 1.0);
        if (dir.norm() < 1e-6) {
          continue;
        }
        dir.normalize();
        const double len = config.min_line_length +
                           unit(rng) * (config.max_line_length -
                                        config.min_line_length);
        b = a + len * dir;
      }
      const double len = (a - b).norm();
      if (len < config.min_line_length || len > config.max_line_length) {
        continue;
      }
      if (count_covisible(scene, a, b) >= 2) {
        scene.lines.push_back({a, b});
        scene.line_plane.push_back(plane_id);
        placed = true;
        break;
      }
    }
    if (!placed) {
      throw InfeasibleConfig("generate_scene: line not observable");
    }
  }

  return scene;
}

ObservationSet render_observations(const SyntheticScene& scene,
                                   const RenderOptions& options, uint64_t seed) {
  const double noise_px = options.noise_px;
  const double mask_corruption_rate = options.mask_corruption_rate;
  if (noise_px < 0.0 || options.point_outlier_rate < 0.0 ||
      options.point_outlier_rate > 1.0 || options.line_outlier_rate < 0.0 ||
      options.line_outlier_rate > 1.0 || mask_corruption_rate < 0.0 ||
      mask_corruption_rate > 1.0) {
    throw InfeasibleConfig("render_observations: rates out of range");
  }
  ObservationSet obs;
  obs.noise_px = noise_px;
  obs.outlier_rate = std::max(options.point_outlier_rate, options.line_outlier_rate);
  obs.mask_corruption_rate = mask_corruption_rate;
  obs.seed = seed;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const int num_frames = static_cast<int>(scene.trajectory.size());
  obs.frame_mask_corrupted.assign(num_frames, 0);

  for (int f = 0; f < num_frames; ++f) {
    const PoseSE3& pose = scene.trajectory[f];

    // Per-frame segmentation corruption: merge two plane labels or split one.
    int merge_src = -1, merge_dst = -1, split_plane = -1;
    if (scene.planes.size() >= 1 && unit(rng) < mask_corruption_rate) {
      obs.frame_mask_corrupted[f] = 1;
      if (scene.planes.size() >= 2 && unit(rng) < 0.5) {
        std::uniform_int_distribution<int> pick(
            0, static_cast<int>(scene.planes.size()) - 1);
        merge_dst = pick(rng);
        do {
          merge_src = pick(rng);
        } while (merge_src == merge_dst);
      } else {
        std::uniform_int_distribution<int> pick(
            0, static_cast<int>(scene.planes.size()) - 1);
        split_plane = pick(rng);
      }
    }

    for (size_t i = 0; i < scene.points.size(); ++i) {
      if (!visible_from(scene, pose, scene.points[i])) {
        continue;
      }
      const Vec3 xc = pose.transform(scene.points[i]);
      PointMeas m;
      m.frame = f;
      m.true_landmark = static_cast<int>(i);
      m.landmark = m.true_landmark;
      m.pixel =
          Vec2(scene.K().fx * xc.x() / xc.z() + scene.K().cx +
                   noise_px * gauss(rng),
               scene.K().fy * xc.y() / xc.z() + scene.K().cy +
                   noise_px * gauss(rng));
      m.label = scene.point_plane[i];
      if (m.label >= 0) {
        if (m.label == merge_src) {
          m.label = merge_dst;
        } else if (m.label == split_plane &&
                   m.pixel.x() < scene.K().cx) {
          m.label = static_cast<int>(scene.planes.size()) + m.label;
        }
      }
      if (options.point_outlier_rate > 0.0 && scene.points.size() > 1 &&
          unit(rng) < options.point_outlier_rate) {
        std::uniform_int_distribution<int> pick(
            0, static_cast<int>(scene.points.size()) - 1);
        int other = m.true_landmark;
        while (other == m.true_landmark) {
          other = pick(rng);
        }
        m.landmark = other;
        m.outlier = true;
      }
      obs.points.push_back(m);
    }

    for (size_t i = 0; i < scene.lines.size(); ++i) {
      const LineSegment3& seg = scene.lines[i];
      if (!visible_from(scene, pose, seg.start) ||
          !visible_from(scene, pose, seg.end)) {
        continue;
      }
      const Vec3 sc = pose.transform(seg.start);
      const Vec3 ec = pose.transform(seg.end);
      LineMeas m;
      m.frame = f;
      m.true_landmark = static_cast<int>(i);
      m.landmark = m.true_landmark;
      m.segment.s.u = scene.K().fx * sc.x() / sc.z() + scene.K().cx +
                      noise_px * gauss(rng);
      m.segment.s.v = scene.K().fy * sc.y() / sc.z() + scene.K().cy +
                      noise_px * gauss(rng);
      m.segment.e.u = scene.K().fx * ec.x() / ec.z() + scene.K().cx +
                      noise_px * gauss(rng);
      m.segment.e.v = scene.K().fy * ec.y() / ec.z() + scene.K().cy +
                      noise_px * gauss(rng);
      if (options.line_outlier_rate > 0.0 && scene.lines.size() > 1 &&
          unit(rng) < options.line_outlier_rate) {
        std::uniform_int_distribution<int> pick(
            0, static_cast<int>(scene.lines.size()) - 1);
        int other = m.true_landmark;
        while (other == m.true_landmark) {
          other = pick(rng);
        }
        m.landmark = other;
        m.outlier = true;
      }
      obs.lines.push_back(m);
    }
  }

  return obs;
}

ObservationSet render_observations(const SyntheticScene& scene, double noise_px,
                                   double outlier_rate,
                                   double mask_corruption_rate, uint64_t seed) {
  RenderOptions options;
  options.noise_px = noise_px;
  options.point_outlier_rate = outlier_rate;
  options.line_outlier_rate = outlier_rate;
  options.mask_corruption_rate = mask_corruption_rate;
  return render_observations(scene, options, seed);
}

}  // namespace plp
