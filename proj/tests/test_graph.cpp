#include <doctest.h>

#include <random>

#include "edgeflow/error.hpp"
#include "edgeflow/graph.hpp"
#include "edgeflow/linalg.hpp"
#include "support.hpp"

using namespace edgeflow;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an edgeflow::Error");
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("build_graph derives neighbor sets") {
  const Graph g = build_graph(4, {{1, 2}, {2, 3}, {3, 1}, {3, 4}});
  CHECK(g.agent_count() == 4);
  CHECK(g.edge_count() == 4);
  CHECK(g.neighbors(2) == std::vector<int>{0, 1, 3});
  CHECK(g.neighbors(3) == std::vector<int>{2});

  const Graph pair = build_graph(2, {{1, 2}});
  CHECK(pair.neighbors(0) == std::vector<int>{1});
  CHECK(pair.neighbors(1) == std::vector<int>{0});
}

TEST_CASE("build_graph rejects malformed edge lists") {
  CHECK(code_of([] { build_graph(3, {{1, 1}}); }) == ErrorCode::SelfLoop);
  CHECK(code_of([] { build_graph(3, {{1, 2}, {2, 1}}); }) == ErrorCode::DuplicateEdge);
  CHECK(code_of([] { build_graph(3, {{1, 2}, {1, 2}}); }) == ErrorCode::DuplicateEdge);
  CHECK(code_of([] { build_graph(3, {{1, 4}}); }) == ErrorCode::NodeIndexOutOfRange);
  CHECK(code_of([] { build_graph(3, {{0, 2}}); }) == ErrorCode::NodeIndexOutOfRange);
}

TEST_CASE("incidence matrix uses first-listed-positive orientation") {
  const Graph g = build_graph(4, {{1, 2}, {2, 3}, {3, 1}, {3, 4}});
  Eigen::MatrixXd expected(4, 4);
  expected << 1, -1, 0, 0,  //
      0, 1, -1, 0,          //
      -1, 0, 1, 0,          //
      0, 0, 1, -1;
  CHECK(incidence_matrix(g) == expected);

  CHECK(incidence_matrix(build_graph(2, {{1, 2}})) == Eigen::RowVector2d(1, -1));
  CHECK(incidence_matrix(build_graph(2, {{2, 1}})) == Eigen::RowVector2d(-1, 1));
}

TEST_CASE("connectivity") {
  CHECK(is_connected(build_graph(4, {{1, 2}, {2, 3}, {3, 1}, {3, 4}})));
  CHECK_FALSE(is_connected(build_graph(3, {{1, 2}})));
  CHECK(is_connected(build_graph(1, {})));
  CHECK(component_count(build_graph(5, {{1, 2}, {4, 5}})) == 3);
}

TEST_CASE("incidence properties on random graphs") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const int m = 1 + static_cast<int>(rng() % 8);
    std::vector<Edge> edges;
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        if (rng() % 3 == 0) edges.push_back(rng() % 2 ? Edge{i, j} : Edge{j, i});
      }
    }
    const Graph g(m, edges);
    const Eigen::MatrixXd h = incidence_matrix(g);

    // H · 1 = 0
    CHECK((h * Eigen::VectorXd::Ones(m)).isZero(0.0));
    // rank(H) = m − components
    CHECK(linalg::numerical_rank(h) == m - component_count(g));

    // Reorienting one edge negates exactly its row.
    if (!edges.empty()) {
      const std::size_t k = rng() % edges.size();
      auto flipped = edges;
      std::swap(flipped[k].tail, flipped[k].head);
      Eigen::MatrixXd expected = h;
      expected.row(static_cast<Eigen::Index>(k)) *= -1.0;
      CHECK(incidence_matrix(Graph(m, flipped)) == expected);
    }
  }
}
