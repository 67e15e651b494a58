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
#ifndef PLP_MAXFLOW_HPP
#define PLP_MAXFLOW_HPP

#include <cstddef>
#include <vector>

namespace plp {

// Dinic max-flow on a small dense-ish graph with double capacities.
// Deterministic: augmentation order follows edge insertion order.
class MaxFlow {
 public:
  explicit MaxFlow(int num_nodes);

  // Adds a directed edge u -> v plus its reverse with the given capacities.
  void add_edge(int u, int v, double cap, double reverse_cap = 0.0);

  double solve(int source, int sink);

  // After solve(): true when the node lies on the source side of the min cut.
  bool source_side(int node) const;

 private:
  struct Edge {
    int to;
    double cap;
    int rev;
  };

  bool bfs(int source, int sink);
  double dfs(int node, int sink, double pushed);

  std::vector<std::vector<Edge>> adj_;
  std::vector<int> level_;
  std::vector<size_t> iter_;
};

}  // namespace plp

#endif  // PLP_MAXFLOW_HPP
