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
#ifndef PLP_PLANE_HPP
#define PLP_PLANE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "plp/types.hpp"

namespace plp {

// Infinite plane n.x + d = 0 with the point landmarks assigned to it.
// The normal is unit length after every fit or update.
struct Plane3 {
  Vec3 n = Vec3::UnitZ();
  double d = 0.0;
  std::vector<int> member_ids;

  void normalize();
  double signed_distance(const Vec3& v) const { return n.dot(v) + d; }
};

double point_plane_distance(const Vec3& v, const Plane3& pi);

// Undirected radius graph over 3D points. Edges are stored once with
// first < second.
struct NeighborhoodGraph {
  std::vector<Vec3> vertices;
  std::vector<std::pair<int, int>> edges;
  double radius = 0.0;
};

struct GeometricThresholds {
  double eps_d = 0.02;     // inlier point-plane distance [m]
  double T_theta = 0.8;    // merge cosine threshold
  double T_d = 0.04;       // merge offset threshold [m]
  double eps_Pi = 0.01;    // model residual stop [m]
  double lambda = 0.6;     // pairwise labeling weight

  double neighbor_radius() const { return 2.0 * eps_d; }
};

// Scales the distance thresholds linearly with the median scene depth.
struct AdaptiveCoefficients {
  double c_d = 0.02;
  double c_T = 0.04;
  double c_P = 0.01;
};
GeometricThresholds adaptive_thresholds(double median_scene_depth,
                                        const GeometricThresholds& base,
                                        const AdaptiveCoefficients& coeff = {});

// Total least squares plane through >= 3 non-collinear points.
// Throws DegenerateConfiguration otherwise.
Plane3 fit_plane_svd(const std::vector<Vec3>& points);

// Unary 0-1 inlier miscount plus lambda-weighted label disagreements.
double labeling_energy(const std::vector<uint8_t>& labels, const Plane3& pi,
                       const NeighborhoodGraph& graph,
                       const GeometricThresholds& th);

// Exact minimizer of labeling_energy via s-t min-cut (binary Potts energy).
// Returns 1 for inliers of the plane model.
std::vector<uint8_t> graphcut_labels(const Plane3& pi,
                                     const NeighborhoodGraph& graph,
                                     const GeometricThresholds& th);

// Exact radius graph via a spatial grid index.
NeighborhoodGraph build_neighborhood_graph(const std::vector<Vec3>& points,
                                           double radius);

// One segmentation mask worth of plane candidates.
struct LabeledPoints {
  std::vector<int> ids;        // point-landmark identifiers
  std::vector<Vec3> positions; // same order as ids
};

struct RansacConfig {
  int max_hypotheses = 200;
  int min_inliers = 20;
  int refit_rounds = 3;
};

// Sequential RANSAC with graph-cut labeling per candidate set. A set may
// produce several planes: the cut inliers are split into connected components
// of the neighborhood graph and leftover points are re-searched. Throws
// NoModelFound when no set yields a plane.
std::vector<Plane3> sequential_ransac_planes(
    const std::vector<LabeledPoints>& candidate_sets,
    const GeometricThresholds& th, uint64_t seed,
    const RansacConfig& config = {});

// Merges the two planes when their normals are nearly parallel and offsets
// close; the merged set is refit, accepted under the eps_Pi residual, and its
// member points are projected onto the merged plane. Positions are indexed by
// landmark id.
std::optional<Plane3> try_merge(const Plane3& pi, const Plane3& pj,
                                std::vector<Vec3>& positions,
                                const GeometricThresholds& th);

// Projects every member point onto the plane (signed distance along the
// normal); afterwards all member distances are zero.
void refine_members(const Plane3& pi, std::vector<Vec3>& positions);

}  // namespace plp

#endif  // PLP_PLANE_HPP
