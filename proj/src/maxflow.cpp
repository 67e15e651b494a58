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
#include "plp/maxflow.hpp"

#include <limits>
#include <queue>

namespace plp {

namespace {
constexpr double kFlowEps = 1e-12;
}

MaxFlow::MaxFlow(int num_nodes)
    : adj_(num_nodes), level_(num_nodes), iter_(num_nodes) {}

void MaxFlow::add_edge(int u, int v, double cap, double reverse_cap) {
  Edge fwd{v, cap, static_cast<int>(adj_[v].size())};
  Edge bwd{u, reverse_cap, static_cast<int>(adj_[u].size())};
  adj_[u].push_back(fwd);
  adj_[v].push_back(bwd);
}

bool MaxFlow::bfs(int source, int sink) {
  std::fill(level_.begin(), level_.end(), -1);
  std::queue<int> queue;
  level_[source] = 0;
  queue.push(source);
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop();
    for (const Edge& e : adj_[u]) {
      if (e.cap > kFlowEps && level_[e.to] < 0) {
        level_[e.to] = level_[u] + 1;
        queue.push(e.to);
      }
    }
  }
  return level_[sink] >= 0;
}

double MaxFlow::dfs(int node, int sink, double pushed) {
  if (node == sink) {
    return pushed;
  }
  for (size_t& i = iter_[node]; i < adj_[node].size(); ++i) {
    Edge& e = adj_[node][i];
    if (e.cap > kFlowEps && level_[node] < level_[e.to]) {
      const double got = dfs(e.to, sink, std::min(pushed, e.cap));
      if (got > kFlowEps) {
        e.cap -= got;
        adj_[e.to][e.rev].cap += got;
        return got;
      }
    }
  }
  return 0.0;
}

double MaxFlow::solve(int source, int sink) {
  double flow = 0.0;
  while (bfs(source, sink)) {
    std::fill(iter_.begin(), iter_.end(), 0);
    while (true) {
      const double got =
          dfs(source, sink, std::numeric_limits<double>::infinity());
      if (got <= kFlowEps) {
        break;
      }
      flow += got;
    }
  }
  return flow;
}

bool MaxFlow::source_side(int node) const { return level_[node] >= 0; }

}  // namespace plp
