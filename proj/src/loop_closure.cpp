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
#include "plp/loop_closure.hpp"

#include <algorithm>
#include <unordered_map>

#include "plp/errors.hpp"
#include "plp/metrics.hpp"

namespace plp {

void correct_map(MapStore& map,
                 const std::vector<KeyframeCorrection>& corrections) {
  std::unordered_map<int, const KeyframeCorrection*> by_kf;
  for (const KeyframeCorrection& c : corrections) {
    by_kf[c.keyframe_id] = &c;
  }

  auto correction_for = [&](int kf_id) -> const KeyframeCorrection& {
    const auto it = by_kf.find(kf_id);
    if (it == by_kf.end()) {
      throw MissingReference("correct_map: keyframe without correction");
    }
    return *it->second;
  };

  for (Keyframe& kf : map.keyframes) {
    const KeyframeCorrection& c = correction_for(kf.id);
    kf.pose = se3_from_sim3(c.new_state);
  }

  for (PointLandmark& lm : map.points) {
    if (!lm.alive) {
      continue;
    }
    const KeyframeCorrection& c = correction_for(lm.ref_keyframe);
    const Sim3Transform move = sim3_compose(c.new_state.inverse(), c.old_state);
    lm.position = move.apply(lm.position);
  }

  for (LineLandmark& lm : map.lines) {
    if (!lm.alive) {
      continue;
    }
    const KeyframeCorrection& c = correction_for(lm.ref_keyframe);
    const Sim3Transform move = sim3_compose(c.new_state.inverse(), c.old_state);
    const Vec6 corrected = sim3_line_matrix(move) * lm.pluecker.vector6();
    lm.pluecker = PlueckerLine::from_vector6(corrected).normalized();
    lm.state = to_orthonormal(lm.pluecker);
    lm.pluecker = from_orthonormal(lm.state);

    // Re-estimate the stored endpoints from the reference view.
    bool trimmed = false;
    for (const LineObservation& o : map.line_obs) {
      if (o.landmark != lm.id || !o.valid || o.keyframe != lm.ref_keyframe) {
        continue;
      }
      const Keyframe* kf = nullptr;
      for (const Keyframe& k : map.keyframes) {
        if (k.id == o.keyframe) {
          kf = &k;
          break;
        }
      }
      if (kf == nullptr) {
        continue;
      }
      try {
        lm.endpoints =
            trim_endpoints(lm.pluecker, o.segment, kf->pose, map.intrinsics);
        trimmed = true;
      } catch (const Error&) {
      }
      break;
    }
    if (!trimmed) {
      lm.endpoints.start = move.apply(lm.endpoints.start);
      lm.endpoints.end = move.apply(lm.endpoints.end);
    }
  }

  // Planes are statistics of their member points; refit after the move.
  for (PlaneLandmark& plane : map.planes) {
    if (!plane.alive) {
      continue;
    }
    std::vector<Vec3> pts;
    pts.reserve(plane.plane.member_ids.size());
    for (int id : plane.plane.member_ids) {
      if (map.points.at(id).alive) {
        pts.push_back(map.points.at(id).position);
      }
    }
    if (pts.size() >= 3) {
      try {
        Plane3 refit = fit_plane_svd(pts);
        refit.member_ids = plane.plane.member_ids;
        plane.plane = refit;
      } catch (const Error&) {
      }
    }
  }
}

int fuse_duplicate_points(MapStore& map, double eps_fuse) {
  int fused = 0;
  const double eps2 = eps_fuse * eps_fuse;
  for (size_t j = 0; j < map.points.size(); ++j) {
    if (!map.points[j].alive) {
      continue;
    }
    for (size_t i = 0; i < j; ++i) {
      if (!map.points[i].alive) {
        continue;
      }
      if ((map.points[i].position - map.points[j].position).squaredNorm() >
          eps2) {
        continue;
      }
      // Merge j into i.
      for (PointObservation& o : map.point_obs) {
        if (o.landmark == map.points[j].id) {
          o.landmark = map.points[i].id;
        }
      }
      for (PlaneLandmark& plane : map.planes) {
        for (int& id : plane.plane.member_ids) {
          if (id == map.points[j].id) {
            id = map.points[i].id;
          }
        }
        std::sort(plane.plane.member_ids.begin(), plane.plane.member_ids.end());
        plane.plane.member_ids.erase(
            std::unique(plane.plane.member_ids.begin(),
                        plane.plane.member_ids.end()),
            plane.plane.member_ids.end());
      }
      map.points[j].alive = false;
      ++fused;
      break;
    }
  }
  return fused;
}

Sim3Transform estimate_sim3_from_matches(const std::vector<Vec3>& src,
                                         const std::vector<Vec3>& dst) {
  return umeyama_alignment(src, dst, true);
}

PoseGraph build_pose_graph(const MapStore& map,
                           const std::vector<LoopConstraint>& loops) {
  PoseGraph graph;
  std::unordered_map<int, int> slot;
  for (const Keyframe& kf : map.keyframes) {
    slot[kf.id] = static_cast<int>(graph.nodes.size());
    graph.nodes.push_back({kf.id, sim3_from_se3(kf.pose), false});
  }
  if (!graph.nodes.empty()) {
    graph.nodes.front().fixed = true;
  }
  for (size_t i = 0; i + 1 < graph.nodes.size(); ++i) {
    PoseGraphEdge e;
    e.from = static_cast<int>(i);
    e.to = static_cast<int>(i + 1);
    e.measurement =
        sim3_compose(graph.nodes[i].state, graph.nodes[i + 1].state.inverse());
    e.weight = 1.0;
    graph.edges.push_back(e);
  }
  for (const LoopConstraint& loop : loops) {
    PoseGraphEdge e;
    e.from = slot.at(loop.kf_from);
    e.to = slot.at(loop.kf_to);
    e.measurement = loop.relative;
    e.weight = loop.weight;
    e.is_loop = true;
    graph.edges.push_back(e);
  }
  return graph;
}

}  // namespace plp
