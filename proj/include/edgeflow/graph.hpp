#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace edgeflow {

// An undirected edge stored with its listing orientation; `tail` is the
// first-listed node and receives +1 in the incidence matrix. 0-based.
struct Edge {
  int tail = 0;
  int head = 0;

  bool operator==(const Edge&) const = default;
};

// Undirected communication graph. Immutable after construction.
class Graph {
 public:
  Graph() = default;

  // Node indices are 0-based here; see build_graph for the 1-based entry point.
  Graph(int agent_count, std::vector<Edge> edges);

  int agent_count() const noexcept { return agent_count_; }
  int edge_count() const noexcept { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Edge& edge(int k) const { return edges_.at(static_cast<std::size_t>(k)); }

  // Neighbors of node i in ascending index order.
  const std::vector<int>& neighbors(int i) const { return neighbors_.at(static_cast<std::size_t>(i)); }

  // Index of the edge joining i and j (either orientation), or -1.
  int find_edge(int i, int j) const;

  bool operator==(const Graph& other) const {
    return agent_count_ == other.agent_count_ && edges_ == other.edges_;
  }

 private:
  int agent_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> neighbors_;
};

// Builds a graph from 1-based node pairs, preserving listing order.
// Throws SelfLoop, DuplicateEdge, NodeIndexOutOfRange.
Graph build_graph(int agent_count, const std::vector<std::pair<int, int>>& edges_one_based);

// Oriented incidence matrix H (edges x agents): +1 at the first-listed node,
// -1 at the second.
Eigen::MatrixXd incidence_matrix(const Graph& g);

int component_count(const Graph& g);
bool is_connected(const Graph& g);

}  // namespace edgeflow
