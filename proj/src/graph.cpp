#include "edgeflow/graph.hpp"

#include <algorithm>
#include <queue>
#include <string>

#include "edgeflow/error.hpp"

namespace edgeflow {

Graph::Graph(int agent_count, std::vector<Edge> edges)
    : agent_count_(agent_count), edges_(std::move(edges)) {
  if (agent_count_ < 1) {
    throw Error(ErrorCode::NodeIndexOutOfRange, "agent count must be positive");
  }
  neighbors_.resize(static_cast<std::size_t>(agent_count_));
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const auto [i, j] = edges_[k];
    const std::string where = "edge " + std::to_string(k + 1) + " (" + std::to_string(i + 1) + "," +
                              std::to_string(j + 1) + ")";
    if (i < 0 || j < 0 || i >= agent_count_ || j >= agent_count_) {
      throw Error(ErrorCode::NodeIndexOutOfRange, where);
    }
    if (i == j) throw Error(ErrorCode::SelfLoop, where);
    auto& ni = neighbors_[static_cast<std::size_t>(i)];
    if (std::find(ni.begin(), ni.end(), j) != ni.end()) throw Error(ErrorCode::DuplicateEdge, where);
    ni.push_back(j);
    neighbors_[static_cast<std::size_t>(j)].push_back(i);
  }
  for (auto& n : neighbors_) std::sort(n.begin(), n.end());
}

int Graph::find_edge(int i, int j) const {
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const auto& e = edges_[k];
    if ((e.tail == i && e.head == j) || (e.tail == j && e.head == i)) return static_cast<int>(k);
  }
  return -1;
}

Graph build_graph(int agent_count, const std::vector<std::pair<int, int>>& edges_one_based) {
  std::vector<Edge> edges;
  edges.reserve(edges_one_based.size());
  for (const auto& [i, j] : edges_one_based) edges.push_back({i - 1, j - 1});
  return Graph(agent_count, std::move(edges));
}

Eigen::MatrixXd incidence_matrix(const Graph& g) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(g.edge_count(), g.agent_count());
  for (int k = 0; k < g.edge_count(); ++k) {
    h(k, g.edge(k).tail) = 1.0;
    h(k, g.edge(k).head) = -1.0;
  }
  return h;
}

int component_count(const Graph& g) {
  std::vector<bool> seen(static_cast<std::size_t>(g.agent_count()), false);
  int components = 0;
  for (int start = 0; start < g.agent_count(); ++start) {
    if (seen[static_cast<std::size_t>(start)]) continue;
    ++components;
    std::queue<int> frontier;
    frontier.push(start);
    seen[static_cast<std::size_t>(start)] = true;
    while (!frontier.empty()) {
      const int u = frontier.front();
      frontier.pop();
      for (int v : g.neighbors(u)) {
        if (!seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = true;
          frontier.push(v);
        }
      }
    }
  }
  return components;
}

bool is_connected(const Graph& g) { return component_count(g) == 1; }

}  // namespace edgeflow
