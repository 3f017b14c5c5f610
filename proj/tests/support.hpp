#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "edgeflow/constraints.hpp"
#include "edgeflow/graph.hpp"
#include "edgeflow/harness.hpp"
#include "edgeflow/objectives.hpp"
#include "edgeflow/scenario_io.hpp"

namespace edgeflow::testing {

inline std::string scenario_path(const std::string& name) { return std::string(EDGEFLOW_SCENARIO_DIR) + "/" + name; }

inline Scenario formation_edge_only() { return read_scenario(scenario_path("formation_edge_only.json")); }
inline Scenario formation_with_objectives() { return read_scenario(scenario_path("formation_with_objectives.json")); }

inline StackedSystem system_of(const Scenario& sc) { return stack(sc.graph, sc.constraints, sc.n); }

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index size, double lo = -5.0, double hi = 5.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd v(size);
  for (Eigen::Index k = 0; k < size; ++k) v(k) = u(rng);
  return v;
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd a(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) a(r, c) = g(rng);
  }
  return a;
}

// Gaussian d x n matrix, redrawn until comfortably full row rank.
inline Eigen::MatrixXd random_full_row_rank(std::mt19937_64& rng, int d, int n) {
  for (;;) {
    Eigen::MatrixXd a = random_matrix(rng, d, n);
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const auto& s = svd.singularValues();
    if (s(d - 1) > 1e-3 * s(0)) return a;
  }
}

// Random connected graph: a random spanning tree plus extra edges.
inline Graph random_connected_graph(std::mt19937_64& rng, int m, double extra_edge_probability = 0.3) {
  std::vector<Edge> edges;
  for (int v = 1; v < m; ++v) {
    std::uniform_int_distribution<int> parent(0, v - 1);
    const int p = parent(rng);
    if (rng() % 2) {
      edges.push_back({p, v});
    } else {
      edges.push_back({v, p});
    }
  }
  std::bernoulli_distribution extra(extra_edge_probability);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const bool present = std::any_of(edges.begin(), edges.end(), [&](const Edge& e) {
        return (e.tail == i && e.head == j) || (e.tail == j && e.head == i);
      });
      if (!present && extra(rng)) edges.push_back({i, j});
    }
  }
  std::shuffle(edges.begin(), edges.end(), rng);
  return Graph(m, std::move(edges));
}

// Random full-row-rank constraints, consistent with the point x_ref.
inline std::vector<EdgeConstraint> consistent_constraints(std::mt19937_64& rng, const Graph& g, int n,
                                                          const Eigen::VectorXd& x_ref) {
  std::vector<EdgeConstraint> out;
  std::uniform_int_distribution<int> rows(1, n);
  for (const auto& e : g.edges()) {
    EdgeConstraint c;
    c.i = e.tail;
    c.j = e.head;
    c.A = random_full_row_rank(rng, rows(rng), n);
    c.b = c.A * (x_ref.segment(c.i * n, n) - x_ref.segment(c.j * n, n));
    out.push_back(std::move(c));
  }
  return out;
}

// Strictly convex quadratic objectives (SquaredDistance or Quadratic with Q ≻ 0).
inline std::vector<ObjectiveSpec> random_strict_quadratics(std::mt19937_64& rng, int m, int n) {
  std::vector<ObjectiveSpec> out;
  std::uniform_real_distribution<double> w(0.5, 2.0);
  for (int i = 0; i < m; ++i) {
    if (rng() % 2) {
      out.push_back(objective::SquaredDistance{random_vector(rng, n), w(rng)});
    } else {
      const Eigen::MatrixXd b = random_matrix(rng, n, n);
      objective::Quadratic q;
      q.Q = b * b.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);
      q.c = random_vector(rng, n);
      q.r = w(rng);
      out.push_back(q);
    }
  }
  return out;
}

}  // namespace edgeflow::testing
