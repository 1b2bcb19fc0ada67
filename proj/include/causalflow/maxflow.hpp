#pragma once

#include "causalflow/types.hpp"

#include <queue>
#include <vector>

namespace causalflow {

// Dinic max-flow on explicit capacities, templated on the capacity scalar so
// the same solver runs in double and in exact rational arithmetic. Edges are
// saturated by exact subtraction, so the algorithm terminates for both
// scalar types without tolerance tricks.
template <class W>
class MaxFlow {
 public:
  struct EdgeRef {
    int node = -1;
    int index = -1;
  };

  explicit MaxFlow(int num_nodes) : graph_(num_nodes) {}

  EdgeRef add_edge(int from, int to, W capacity) {
    graph_[from].push_back(Edge{to, capacity, static_cast<int>(graph_[to].size()), capacity});
    graph_[to].push_back(Edge{from, WeightTraits<W>::zero(), static_cast<int>(graph_[from].size()) - 1,
                              WeightTraits<W>::zero()});
    return EdgeRef{from, static_cast<int>(graph_[from].size()) - 1};
  }

  W run(int source, int sink) {
    W total = WeightTraits<W>::zero();
    while (bfs(source, sink)) {
      iter_.assign(graph_.size(), 0);
      while (true) {
        W pushed = dfs(source, sink, W(-1));
        if (!(pushed > WeightTraits<W>::zero())) break;
        total += pushed;
      }
    }
    source_ = source;
    return total;
  }

  W edge_flow(const EdgeRef& e) const {
    const Edge& edge = graph_[e.node][static_cast<std::size_t>(e.index)];
    return edge.original_capacity - edge.capacity;
  }

  // Source side of the minimum cut: residual reachability after run().
  std::vector<char> min_cut_side() const {
    std::vector<char> seen(graph_.size(), 0);
    std::queue<int> q;
    q.push(source_);
    seen[static_cast<std::size_t>(source_)] = 1;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (const Edge& e : graph_[static_cast<std::size_t>(u)]) {
        if (e.capacity > WeightTraits<W>::zero() && !seen[static_cast<std::size_t>(e.to)]) {
          seen[static_cast<std::size_t>(e.to)] = 1;
          q.push(e.to);
        }
      }
    }
    return seen;
  }

 private:
  struct Edge {
    int to;
    W capacity;
    int reverse_index;
    W original_capacity;
  };

  bool bfs(int source, int sink) {
    level_.assign(graph_.size(), -1);
    std::queue<int> q;
    level_[static_cast<std::size_t>(source)] = 0;
    q.push(source);
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (const Edge& e : graph_[static_cast<std::size_t>(u)]) {
        if (e.capacity > WeightTraits<W>::zero() && level_[static_cast<std::size_t>(e.to)] < 0) {
          level_[static_cast<std::size_t>(e.to)] = level_[static_cast<std::size_t>(u)] + 1;
          q.push(e.to);
        }
      }
    }
    return level_[static_cast<std::size_t>(sink)] >= 0;
  }

  // limit < 0 encodes "unbounded" to avoid a scalar infinity.
  W dfs(int u, int sink, W limit) {
    if (u == sink) return limit;
    for (int& i = iter_[static_cast<std::size_t>(u)];
         i < static_cast<int>(graph_[static_cast<std::size_t>(u)].size()); ++i) {
      Edge& e = graph_[static_cast<std::size_t>(u)][static_cast<std::size_t>(i)];
      if (!(e.capacity > WeightTraits<W>::zero())) continue;
      if (level_[static_cast<std::size_t>(e.to)] != level_[static_cast<std::size_t>(u)] + 1) continue;
      W next_limit = e.capacity;
      if (!(limit < WeightTraits<W>::zero()) && limit < next_limit) next_limit = limit;
      W pushed = dfs(e.to, sink, next_limit);
      if (pushed > WeightTraits<W>::zero()) {
        e.capacity -= pushed;
        graph_[static_cast<std::size_t>(e.to)][static_cast<std::size_t>(e.reverse_index)].capacity +=
            pushed;
        return pushed;
      }
    }
    level_[static_cast<std::size_t>(u)] = -1;
    return WeightTraits<W>::zero();
  }

  std::vector<std::vector<Edge>> graph_;
  std::vector<int> level_;
  std::vector<int> iter_;
  int source_ = 0;
};

}  // namespace causalflow
