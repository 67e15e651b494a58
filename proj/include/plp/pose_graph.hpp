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
#ifndef PLP_POSE_GRAPH_HPP
#define PLP_POSE_GRAPH_HPP

#include <vector>

#include "plp/sim3.hpp"
#include "plp/types.hpp"

namespace plp {

struct PoseGraphNode {
  int id = 0;
  Sim3Transform state;  // world -> keyframe
  bool fixed = false;
};

// Relative constraint: measurement maps node `to` into node `from`,
// residual = log(S_meas * S_to * S_from^-1).
struct PoseGraphEdge {
  int from = 0;
  int to = 0;
  Sim3Transform measurement;
  double weight = 1.0;
  bool is_loop = false;
};

struct PoseGraph {
  std::vector<PoseGraphNode> nodes;
  std::vector<PoseGraphEdge> edges;
};

struct PoseGraphReport {
  int iterations = 0;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  std::vector<double> cost_trace;           // accepted, non-increasing
  std::vector<double> final_edge_residuals; // per edge, unweighted norm
  bool converged = false;
};

Vec7 pose_graph_edge_residual(const PoseGraph& graph, const PoseGraphEdge& e);
double pose_graph_cost(const PoseGraph& graph);

// Damped Gauss-Newton over the free node states (numeric edge Jacobians).
// Throws Underconstrained when no node is fixed or the graph is disconnected.
PoseGraphReport optimize_pose_graph(PoseGraph& graph, int max_iters = 50);

}  // namespace plp

#endif  // PLP_POSE_GRAPH_HPP
