#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "edgeflow/constraints.hpp"
#include "edgeflow/objectives.hpp"

namespace edgeflow {

struct SystemState {
  Eigen::VectorXd x;       // col(x_1..x_m)
  Eigen::VectorXd lambda;  // col(λ_1..λ_m)
  double t = 0.0;
};

struct FlowRate {
  Eigen::VectorXd xdot;
  Eigen::VectorXd lambdadot;
};

// What agent i is handed about neighbor j at one evaluation. `lambda` is
// left empty for the edge-only flow.
struct NeighborSample {
  int j = 0;
  Eigen::VectorXd x;
  Eigen::VectorXd lambda;
};

// Edge (i, j) seen from agent i: P_ij and b̄_ij with b̄_ji = −b̄_ij.
struct LocalConstraint {
  int j = 0;
  Eigen::MatrixXd P;
  Eigen::VectorXd b_bar;
};

// The projected constraints agent i holds, one per neighbor, ascending j.
std::vector<LocalConstraint> local_constraints(const StackedSystem& s, int i);

// F(x, λ) = f(x) + λ′H̄′P̄(H̄x − b̄) + ½‖P̄(H̄x − b̄)‖².
double lagrangian_value(const StackedSystem& s, std::span<const ObjectiveSpec> f, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& lambda);

// ẋ = −∇f(x) − H̄′P̄H̄λ − H̄′P̄(H̄x − b̄),  λ̇ = H̄′P̄(H̄x − b̄).
FlowRate saddle_rhs_compact(const StackedSystem& s, std::span<const ObjectiveSpec> f, const SystemState& state);

// ẋ = −H̄′P̄(H̄x − b̄).
Eigen::VectorXd edge_only_rhs_compact(const StackedSystem& s, const Eigen::VectorXd& x);

// Agent i's saddle-point update from its own state and its neighbor snapshot.
// The neighbor set is the set of j in `local`; samples must cover it exactly.
// Throws MissingNeighbor, UnexpectedNeighbor, DimensionMismatch.
FlowRate saddle_rhs_local(int i, const ObjectiveSpec& f_i, const Eigen::VectorXd& x_i,
                          const Eigen::VectorXd& lambda_i, std::span<const NeighborSample> neighbors,
                          std::span<const LocalConstraint> local);

// ẋ_i = −Σ_j P_ij(x_i − x_j − b̄_ij).
Eigen::VectorXd edge_only_rhs_local(int i, const Eigen::VectorXd& x_i, std::span<const NeighborSample> neighbors,
                                    std::span<const LocalConstraint> local);

struct EquilibriumResidual {
  double primal = 0.0;        // ‖H̄′P̄(H̄x − b̄)‖
  double stationarity = 0.0;  // ‖∇f(x) + H̄′P̄H̄λ‖
};

EquilibriumResidual equilibrium_residual(const StackedSystem& s, std::span<const ObjectiveSpec> f,
                                         const Eigen::VectorXd& x, const Eigen::VectorXd& lambda);

// M = P̄H̄H̄′P̄, the generator of ė = −Me along the edge-only flow.
Eigen::MatrixXd error_matrix(const StackedSystem& s);

// Max-norm deviation between the three-point (non-uniform) time derivative of
// e(t) = P̄(H̄x(t) − b̄) and −M e(t) over the interior samples. Returns 0 when
// fewer than three samples are given.
double error_dynamics_check(const StackedSystem& s, std::span<const double> times,
                            std::span<const Eigen::VectorXd> states);

}  // namespace edgeflow
