#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "edgeflow/graph.hpp"

namespace edgeflow {

// Linear agreement A (x_i - x_j) = b on one edge. Node indices are 0-based.
struct EdgeConstraint {
  int i = 0;
  int j = 0;
  Eigen::MatrixXd A;  // d x n, full row rank
  Eigen::VectorXd b;  // d

  int rows() const noexcept { return static_cast<int>(A.rows()); }
  int dim() const noexcept { return static_cast<int>(A.cols()); }
};

// Projected form P (x_i - x_j - b_bar) = 0 of an EdgeConstraint.
struct ProjectedConstraint {
  Eigen::MatrixXd P;      // n x n orthogonal projector onto row space of A
  Eigen::VectorXd b_bar;  // n, satisfies P b_bar = b_bar
};

// Throws RankDeficient when A A' is singular at the numerical rank tolerance.
ProjectedConstraint project_constraint(const EdgeConstraint& c);

// The (j, i) view of the same agreement: same A, negated b.
EdgeConstraint mirror(const EdgeConstraint& c);

// Block operators for all edges in edge order.
struct StackedSystem {
  Graph graph;
  int n = 0;
  std::vector<ProjectedConstraint> blocks;  // one per edge, edge order
  Eigen::MatrixXd P_bar;                    // blockdiag(P_l), (m̄n x m̄n)
  Eigen::VectorXd b_bar;                    // col(b_bar_l), m̄n
  Eigen::MatrixXd H_bar;                    // H ⊗ I_n, (m̄n x mn)

  int agent_count() const noexcept { return graph.agent_count(); }
  int edge_count() const noexcept { return graph.edge_count(); }
  int state_dim() const noexcept { return graph.agent_count() * n; }
  int constraint_dim() const noexcept { return graph.edge_count() * n; }

  // P̄H̄, the constraint Jacobian.
  Eigen::MatrixXd constraint_matrix() const { return P_bar * H_bar; }
};

// Requires one constraint per edge, in edge order and orientation.
// Throws MissingEdgeConstraint, OrientationMismatch, DimensionMismatch, RankDeficient.
StackedSystem stack(const Graph& g, std::span<const EdgeConstraint> constraints, int n);

// e = P̄(H̄x − b̄). Throws DimensionMismatch.
Eigen::VectorXd residual(const StackedSystem& s, const Eigen::VectorXd& x);

// V = ½ Σ ‖A_ij(x_i − x_j) − b_ij‖² over the listed edges.
double agreement_error(std::span<const EdgeConstraint> constraints, const Eigen::VectorXd& x, int n);

struct WellConfiguredReport {
  bool ok = false;
  int rank_PH = 0;
  int rank_HPH = 0;
};

// rank(H̄′P̄H̄) == rank(P̄H̄).
WellConfiguredReport well_configured(const StackedSystem& s);

struct FeasibilityResult {
  bool feasible = false;
  Eigen::VectorXd x;             // least-squares minimizer of ‖P̄(H̄x − b̄)‖
  double residual_norm = 0.0;    // attained ‖P̄(H̄x − b̄)‖
};

inline constexpr double kDefaultFeasibilityTolerance = 1e-8;

FeasibilityResult feasible_point(const StackedSystem& s,
                                 double tolerance = kDefaultFeasibilityTolerance);

}  // namespace edgeflow
