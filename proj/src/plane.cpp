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
#include "plp/plane.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "plp/errors.hpp"
#include "plp/maxflow.hpp"

namespace plp {

void Plane3::normalize() {
  const double n_norm = n.norm();
  if (n_norm > 0.0) {
    n /= n_norm;
    d /= n_norm;
  }
}

double point_plane_distance(const Vec3& v, const Plane3& pi) {
  return std::abs(pi.n.dot(v) + pi.d) / pi.n.norm();
}

GeometricThresholds adaptive_thresholds(double median_scene_depth,
                                        const GeometricThresholds& base,
                                        const AdaptiveCoefficients& coeff) {
  if (!(median_scene_depth > 0.0)) {
    throw std::invalid_argument("adaptive_thresholds: non-positive depth");
  }
  GeometricThresholds th = base;
  th.eps_d = coeff.c_d * median_scene_depth;
  th.T_d = coeff.c_T * median_scene_depth;
  th.eps_Pi = coeff.c_P * median_scene_depth;
  return th;
}

Plane3 fit_plane_svd(const std::vector<Vec3>& points) {
  if (points.size() < 3) {
    throw DegenerateConfiguration("fit_plane_svd: fewer than 3 points");
  }
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : points) {
    centroid += p;
  }
  centroid /= static_cast<double>(points.size());

  MatX centered(points.size(), 3);
  for (size_t i = 0; i < points.size(); ++i) {
    centered.row(i) = (points[i] - centroid).transpose();
  }
  Eigen::JacobiSVD<MatX> svd(centered, Eigen::ComputeThinV);
  const VecX sv = svd.singularValues();
  if (sv[1] <= 1e-12 * std::max(sv[0], 1e-300)) {
    throw DegenerateConfiguration("fit_plane_svd: collinear points");
  }
  Plane3 plane;
  plane.n = svd.matrixV().col(2);
  plane.d = -plane.n.dot(centroid);
  plane.normalize();
  return plane;
}

double labeling_energy(const std::vector<uint8_t>& labels, const Plane3& pi,
                       const NeighborhoodGraph& graph,
                       const GeometricThresholds& th) {
  if (labels.size() != graph.vertices.size()) {
    throw std::invalid_argument("labeling_energy: label/vertex size mismatch");
  }
  double energy = 0.0;
  for (size_t v = 0; v < labels.size(); ++v) {
    const double dist = point_plane_distance(graph.vertices[v], pi);
    const bool consistent = (labels[v] == 1 && dist < th.eps_d) ||
                            (labels[v] == 0 && dist >= th.eps_d);
    if (!consistent) {
      energy += 1.0;
    }
  }
  for (const auto& [u, v] : graph.edges) {
    if (labels[u] != labels[v]) {
      energy += th.lambda;
    }
  }
  return energy;
}

std::vector<uint8_t> graphcut_labels(const Plane3& pi,
                                     const NeighborhoodGraph& graph,
                                     const GeometricThresholds& th) {
  const int n = static_cast<int>(graph.vertices.size());
  const int source = n;
  const int sink = n + 1;
  MaxFlow flow(n + 2);
  for (int v = 0; v < n; ++v) {
    const double dist = point_plane_distance(graph.vertices[v], pi);
    // Source side == label 1. Cutting v->sink pays the label-1 unary cost,
    // cutting source->v pays the label-0 cost.
    const double cost1 = dist < th.eps_d ? 0.0 : 1.0;
    const double cost0 = dist < th.eps_d ? 1.0 : 0.0;
    if (cost0 > 0.0) {
      flow.add_edge(source, v, cost0);
    }
    if (cost1 > 0.0) {
      flow.add_edge(v, sink, cost1);
    }
  }
  if (th.lambda > 0.0) {
    for (const auto& [u, v] : graph.edges) {
      flow.add_edge(u, v, th.lambda, th.lambda);
    }
  }
  flow.solve(source, sink);
  std::vector<uint8_t> labels(n, 0);
  for (int v = 0; v < n; ++v) {
    labels[v] = flow.source_side(v) ? 1 : 0;
  }
  return labels;
}

NeighborhoodGraph build_neighborhood_graph(const std::vector<Vec3>& points,
                                           double radius) {
  if (!(radius > 0.0)) {
    throw std::invalid_argument("build_neighborhood_graph: radius must be > 0");
  }
  NeighborhoodGraph graph;
  graph.vertices = points;
  graph.radius = radius;

  struct CellHash {
    size_t operator()(const std::array<int64_t, 3>& c) const {
      size_t h = 1469598103934665603ull;
      for (int64_t v : c) {
        h ^= static_cast<size_t>(v);
        h *= 1099511628211ull;
      }
      return h;
    }
  };
  auto cell_of = [radius](const Vec3& p) {
    return std::array<int64_t, 3>{
        static_cast<int64_t>(std::floor(p.x() / radius)),
        static_cast<int64_t>(std::floor(p.y() / radius)),
        static_cast<int64_t>(std::floor(p.z() / radius))};
  };

  std::unordered_map<std::array<int64_t, 3>, std::vector<int>, CellHash> grid;
  for (size_t i = 0; i < points.size(); ++i) {
    grid[cell_of(points[i])].push_back(static_cast<int>(i));
  }
  const double r2 = radius * radius;
  for (size_t i = 0; i < points.size(); ++i) {
    const auto base = cell_of(points[i]);
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dz = -1; dz <= 1; ++dz) {
          const auto it =
              grid.find({base[0] + dx, base[1] + dy, base[2] + dz});
          if (it == grid.end()) {
            continue;
          }
          for (int j : it->second) {
            if (j <= static_cast<int>(i)) {
              continue;
            }
            if ((points[i] - points[j]).squaredNorm() <= r2) {
              graph.edges.emplace_back(static_cast<int>(i), j);
            }
          }
        }
      }
    }
  }
  std::sort(graph.edges.begin(), graph.edges.end());
  return graph;
}

namespace {

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void merge(int a, int b) { parent[find(a)] = find(b); }
};

double mean_abs_distance(const Plane3& plane, const std::vector<Vec3>& pts,
                         const std::vector<int>& subset) {
  if (subset.empty()) {
    return std::numeric_limits<double>::infinity();
  }
  double sum = 0.0;
  for (int i : subset) {
    sum += point_plane_distance(pts[i], plane);
  }
  return sum / static_cast<double>(subset.size());
}

}  // namespace

std::vector<Plane3> sequential_ransac_planes(
    const std::vector<LabeledPoints>& candidate_sets,
    const GeometricThresholds& th, uint64_t seed, const RansacConfig& config) {
  std::mt19937_64 rng(seed);
  std::vector<Plane3> planes;

  for (const LabeledPoints& set : candidate_sets) {
    std::vector<int> remaining(set.positions.size());
    std::iota(remaining.begin(), remaining.end(), 0);

    while (static_cast<int>(remaining.size()) >= config.min_inliers) {
      std::vector<Vec3> pts(remaining.size());
      for (size_t i = 0; i < remaining.size(); ++i) {
        pts[i] = set.positions[remaining[i]];
      }
      const NeighborhoodGraph graph =
          build_neighborhood_graph(pts, th.neighbor_radius());

      std::uniform_int_distribution<int> pick(0,
                                              static_cast<int>(pts.size()) - 1);
      bool have_best = false;
      std::vector<uint8_t> best_labels;
      Plane3 best_plane;
      int best_count = 0;
      double best_residual = std::numeric_limits<double>::infinity();

      for (int hyp = 0; hyp < config.max_hypotheses; ++hyp) {
        int a = pick(rng), b = pick(rng), c = pick(rng);
        if (a == b || b == c || a == c) {
          continue;
        }
        const Vec3 normal = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
        if (normal.norm() < 1e-12) {
          continue;
        }
        Plane3 hypothesis;
        hypothesis.n = normal;
        hypothesis.d = -normal.dot(pts[a]);
        hypothesis.normalize();

        std::vector<uint8_t> labels = graphcut_labels(hypothesis, graph, th);
        Plane3 model = hypothesis;
        for (int round = 0; round < config.refit_rounds; ++round) {
          std::vector<Vec3> inlier_pts;
          for (size_t i = 0; i < labels.size(); ++i) {
            if (labels[i]) {
              inlier_pts.push_back(pts[i]);
            }
          }
          if (static_cast<int>(inlier_pts.size()) < 3) {
            break;
          }
          Plane3 refit;
          try {
            refit = fit_plane_svd(inlier_pts);
          } catch (const DegenerateConfiguration&) {
            break;
          }
          std::vector<uint8_t> new_labels = graphcut_labels(refit, graph, th);
          const bool stable = new_labels == labels;
          model = refit;
          labels = std::move(new_labels);
          if (stable) {
            break;
          }
        }

        std::vector<int> inliers;
        for (size_t i = 0; i < labels.size(); ++i) {
          if (labels[i]) {
            inliers.push_back(static_cast<int>(i));
          }
        }
        if (static_cast<int>(inliers.size()) < config.min_inliers) {
          continue;
        }
        const double residual = mean_abs_distance(model, pts, inliers);
        if (!have_best || inliers.size() > static_cast<size_t>(best_count) ||
            (inliers.size() == static_cast<size_t>(best_count) &&
             residual < best_residual)) {
          have_best = true;
          best_labels = labels;
          best_plane = model;
          best_count = static_cast<int>(inliers.size());
          best_residual = residual;
        }
        if (residual < th.eps_Pi) {
          break;
        }
      }

      if (!have_best) {
        break;
      }

      // Split the cut inliers into spatially connected components; each
      // large enough component becomes its own plane instance. The split
      // radius follows the sampling density so a sparsely sampled single
      // plane stays in one piece.
      std::vector<int> inlier_idx;
      for (size_t i = 0; i < pts.size(); ++i) {
        if (best_labels[i]) {
          inlier_idx.push_back(static_cast<int>(i));
        }
      }
      std::vector<double> nn(inlier_idx.size(),
                             std::numeric_limits<double>::infinity());
      for (size_t i = 0; i < inlier_idx.size(); ++i) {
        for (size_t j = i + 1; j < inlier_idx.size(); ++j) {
          const double dist =
              (pts[inlier_idx[i]] - pts[inlier_idx[j]]).norm();
          nn[i] = std::min(nn[i], dist);
          nn[j] = std::min(nn[j], dist);
        }
      }
      std::nth_element(nn.begin(), nn.begin() + nn.size() / 2, nn.end());
      const double split_radius =
          std::max(th.neighbor_radius(), 4.0 * nn[nn.size() / 2]);

      DisjointSet ds(static_cast<int>(pts.size()));
      for (size_t i = 0; i < inlier_idx.size(); ++i) {
        for (size_t j = i + 1; j < inlier_idx.size(); ++j) {
          if ((pts[inlier_idx[i]] - pts[inlier_idx[j]]).norm() <=
              split_radius) {
            ds.merge(inlier_idx[i], inlier_idx[j]);
          }
        }
      }
      std::unordered_map<int, std::vector<int>> components;
      for (size_t i = 0; i < pts.size(); ++i) {
        if (best_labels[i]) {
          components[ds.find(static_cast<int>(i))].push_back(
              static_cast<int>(i));
        }
      }
      std::vector<std::vector<int>> ordered;
      for (auto& [root, comp] : components) {
        ordered.push_back(std::move(comp));
      }
      std::sort(ordered.begin(), ordered.end(),
                [](const auto& a, const auto& b) { return a.front() < b.front(); });

      for (const std::vector<int>& comp : ordered) {
        if (static_cast<int>(comp.size()) < config.min_inliers) {
          continue;
        }
        std::vector<Vec3> comp_pts;
        comp_pts.reserve(comp.size());
        for (int i : comp) {
          comp_pts.push_back(pts[i]);
        }
        Plane3 plane;
        try {
          plane = fit_plane_svd(comp_pts);
        } catch (const DegenerateConfiguration&) {
          continue;
        }
        plane.member_ids.reserve(comp.size());
        for (int i : comp) {
          plane.member_ids.push_back(set.ids[remaining[i]]);
        }
        planes.push_back(std::move(plane));
      }

      // All explained points leave the pool, including small components.
      std::vector<int> next;
      next.reserve(remaining.size());
      for (size_t i = 0; i < remaining.size(); ++i) {
        if (!best_labels[i]) {
          next.push_back(remaining[i]);
        }
      }
      remaining = std::move(next);
    }
  }

  if (planes.empty()) {
    throw NoModelFound("sequential_ransac_planes: no plane reached min inliers");
  }
  return planes;
}

std::optional<Plane3> try_merge(const Plane3& pi, const Plane3& pj,
                                std::vector<Vec3>& positions,
                                const GeometricThresholds& th) {
  const double cos_theta = pi.n.dot(pj.n) / (pi.n.norm() * pj.n.norm());
  if (std::abs(cos_theta) <= th.T_theta) {
    return std::nullopt;
  }
  // Compare offsets with aligned unit normals; d flips with the normal sign.
  const double dj = cos_theta < 0.0 ? -pj.d : pj.d;
  if (std::abs(pi.d - dj) >= th.T_d) {
    return std::nullopt;
  }

  std::vector<int> members = pi.member_ids;
  members.insert(members.end(), pj.member_ids.begin(), pj.member_ids.end());
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());

  std::vector<Vec3> pts;
  pts.reserve(members.size());
  for (int id : members) {
    pts.push_back(positions.at(id));
  }
  Plane3 merged;
  try {
    merged = fit_plane_svd(pts);
  } catch (const DegenerateConfiguration&) {
    return std::nullopt;
  }
  double residual = 0.0;
  for (const Vec3& p : pts) {
    residual += point_plane_distance(p, merged);
  }
  residual /= static_cast<double>(pts.size());
  if (residual >= th.eps_Pi) {
    return std::nullopt;
  }
  merged.member_ids = std::move(members);
  refine_members(merged, positions);
  return merged;
}

void refine_members(const Plane3& pi, std::vector<Vec3>& positions) {
  const Vec3 n = pi.n / pi.n.norm();
  const double d = pi.d / pi.n.norm();
  for (int id : pi.member_ids) {
    Vec3& v = positions.at(id);
    v -= (n.dot(v) + d) * n;
  }
}

}  // namespace plp
