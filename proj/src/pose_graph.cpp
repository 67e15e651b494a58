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
#include "plp/pose_graph.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "plp/errors.hpp"

namespace plp {

namespace {

Vec7 edge_residual(const Sim3Transform& meas, const Sim3Transform& s_from,
                   const Sim3Transform& s_to) {
  return sim3_log(sim3_compose(meas, sim3_compose(s_to, s_from.inverse())));
}

void check_constrained(const PoseGraph& graph) {
  std::vector<int> fixed_nodes;
  for (size_t i = 0; i < graph.nodes.size(); ++i) {
    if (graph.nodes[i].fixed) {
      fixed_nodes.push_back(static_cast<int>(i));
    }
  }
  if (fixed_nodes.empty()) {
    throw Underconstrained("optimize_pose_graph: no fixed node");
  }
  // Every node must be connected to a fixed node through the edge set.
  std::vector<std::vector<int>> adj(graph.nodes.size());
  for (const PoseGraphEdge& e : graph.edges) {
    adj[e.from].push_back(e.to);
    adj[e.to].push_back(e.from);
  }
  std::vector<bool> seen(graph.nodes.size(), false);
  std::queue<int> queue;
  for (int f : fixed_nodes) {
    seen[f] = true;
    queue.push(f);
  }
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = true;
        queue.push(v);
      }
    }
  }
  if (!std::all_of(seen.begin(), seen.end(), [](bool s) { return s; })) {
    throw Underconstrained("optimize_pose_graph: graph not connected to a fixed node");
  }
}

}  // namespace

Vec7 pose_graph_edge_residual(const PoseGraph& graph, const PoseGraphEdge& e) {
  return edge_residual(e.measurement, graph.nodes[e.from].state,
                       graph.nodes[e.to].state);
}

double pose_graph_cost(const PoseGraph& graph) {
  double cost = 0.0;
  for (const PoseGraphEdge& e : graph.edges) {
    cost += e.weight * pose_graph_edge_residual(graph, e).squaredNorm();
  }
  return cost;
}

PoseGraphReport optimize_pose_graph(PoseGraph& graph, int max_iters) {
  check_constrained(graph);

  std::vector<int> col(graph.nodes.size(), -1);
  int dim = 0;
  for (size_t i = 0; i < graph.nodes.size(); ++i) {
    if (!graph.nodes[i].fixed) {
      col[i] = dim;
      dim += 7;
    }
  }

  PoseGraphReport report;
  double cost = pose_graph_cost(graph);
  report.initial_cost = cost;
  report.cost_trace.push_back(cost);

  const double fd_step = 1e-7;
  for (int iter = 0; iter < max_iters && dim > 0; ++iter) {
    MatX H = MatX::Zero(dim, dim);
    VecX g = VecX::Zero(dim);

    for (const PoseGraphEdge& e : graph.edges) {
      const Vec7 r =
          edge_residual(e.measurement, graph.nodes[e.from].state,
                        graph.nodes[e.to].state);
      Eigen::Matrix<double, 7, 7> Jf = Eigen::Matrix<double, 7, 7>::Zero();
      Eigen::Matrix<double, 7, 7> Jt = Eigen::Matrix<double, 7, 7>::Zero();
      for (int k = 0; k < 7; ++k) {
        Vec7 delta = Vec7::Zero();
        delta[k] = fd_step;
        if (col[e.from] >= 0) {
          const Sim3Transform plus =
              sim3_compose(sim3_exp(delta), graph.nodes[e.from].state);
          const Sim3Transform minus =
              sim3_compose(sim3_exp(-delta), graph.nodes[e.from].state);
          Jf.col(k) = (edge_residual(e.measurement, plus, graph.nodes[e.to].state) -
                       edge_residual(e.measurement, minus, graph.nodes[e.to].state)) /
                      (2.0 * fd_step);
        }
        if (col[e.to] >= 0) {
          const Sim3Transform plus =
              sim3_compose(sim3_exp(delta), graph.nodes[e.to].state);
          const Sim3Transform minus =
              sim3_compose(sim3_exp(-delta), graph.nodes[e.to].state);
          Jt.col(k) = (edge_residual(e.measurement, graph.nodes[e.from].state, plus) -
                       edge_residual(e.measurement, graph.nodes[e.from].state, minus)) /
                      (2.0 * fd_step);
        }
      }
      if (col[e.from] >= 0) {
        H.block<7, 7>(col[e.from], col[e.from]) += e.weight * Jf.transpose() * Jf;
        g.segment<7>(col[e.from]) += e.weight * Jf.transpose() * r;
      }
      if (col[e.to] >= 0) {
        H.block<7, 7>(col[e.to], col[e.to]) += e.weight * Jt.transpose() * Jt;
        g.segment<7>(col[e.to]) += e.weight * Jt.transpose() * r;
      }
      if (col[e.from] >= 0 && col[e.to] >= 0) {
        H.block<7, 7>(col[e.from], col[e.to]) += e.weight * Jf.transpose() * Jt;
        H.block<7, 7>(col[e.to], col[e.from]) += e.weight * Jt.transpose() * Jf;
      }
    }

    if (g.lpNorm<Eigen::Infinity>() <= 1e-14 * std::max(1.0, cost)) {
      report.converged = true;
      break;
    }

    // Light damping plus backtracking keeps accepted costs non-increasing.
    H.diagonal().array() += 1e-10 * std::max(1.0, H.diagonal().maxCoeff());
    const VecX step = H.ldlt().solve(-g);
    if (!step.allFinite()) {
      throw DivergedSolve("optimize_pose_graph: singular system");
    }

    const std::vector<PoseGraphNode> backup = graph.nodes;
    double alpha = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 30; ++bt) {
      for (size_t i = 0; i < graph.nodes.size(); ++i) {
        if (col[i] >= 0) {
          graph.nodes[i].state = sim3_compose(
              sim3_exp(alpha * step.segment<7>(col[i])), backup[i].state);
        }
      }
      const double trial = pose_graph_cost(graph);
      if (trial < cost) {
        cost = trial;
        report.cost_trace.push_back(cost);
        ++report.iterations;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      graph.nodes = backup;
      report.converged = true;
      break;
    }
    const double prev = report.cost_trace[report.cost_trace.size() - 2];
    if ((prev - cost) / std::max(prev, 1e-300) < 1e-12 || cost < 1e-24) {
      report.converged = true;
      break;
    }
  }

  report.final_cost = pose_graph_cost(graph);
  report.final_edge_residuals.reserve(graph.edges.size());
  for (const PoseGraphEdge& e : graph.edges) {
    report.final_edge_residuals.push_back(
        pose_graph_edge_residual(graph, e).norm());
  }
  return report;
}

}  // namespace plp
