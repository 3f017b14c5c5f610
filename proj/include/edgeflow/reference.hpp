#pragma once

#include <span>
#include <string>

#include <Eigen/Dense>

#include "edgeflow/constraints.hpp"
#include "edgeflow/objectives.hpp"

namespace edgeflow {

// Centralized optimum of min f(x) s.t. P̄(H̄x − b̄) = 0, with a multiplier μ
// on the projected constraint rows (μ ∈ R^{m̄n}).
struct ReferenceSolution {
  Eigen::VectorXd x_star;
  Eigen::VectorXd mu_star;
  double kkt_residual = 0.0;  // max(‖∇f + (P̄H̄)′μ‖, ‖P̄(H̄x − b̄)‖)
  double objective_value = 0.0;
  bool unique = true;         // ker ∇²f(x*) ∩ ker P̄H̄ = {0}
  int outer_iterations = 0;   // 0 for the direct KKT solve
  std::string method;
};

inline constexpr double kReferenceKktTolerance = 1e-9;

double kkt_residual(const StackedSystem& s, std::span<const ObjectiveSpec> f, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& mu);

// Direct least-norm solve of the linear KKT system for Zero/SquaredDistance/
// Quadratic objectives. Throws Unbounded when the objective is flat along a
// feasible direction, NoConvergence when the KKT system is inconsistent.
ReferenceSolution solve_quadratic_kkt(const StackedSystem& s, std::span<const ObjectiveSpec> f);

struct GeneralSolverOptions {
  double rho_initial = 10.0;
  double rho_growth = 10.0;
  double rho_max = 1e6;
  int max_outer = 50;
  int max_inner = 100;
  double inner_gradient_tolerance = 1e-10;
  double kkt_tolerance = kReferenceKktTolerance;
};

// Method of multipliers on the projected constraint: damped Newton on
// f(x) + μ′r + (ρ/2)‖r‖², r = P̄(H̄x − b̄), then μ ← μ + ρ r. ρ grows when
// ‖r‖ fails to shrink by 4x. Throws NoConvergence.
ReferenceSolution solve_general(const StackedSystem& s, std::span<const ObjectiveSpec> f,
                                const Eigen::VectorXd& init, const GeneralSolverOptions& options = {});

// solve_quadratic_kkt when every objective is quadratic, otherwise
// solve_general started from the least-squares feasible point.
ReferenceSolution solve_reference(const StackedSystem& s, std::span<const ObjectiveSpec> f);

// W = ½‖x − x*‖².
double distance_to_opt(const Eigen::VectorXd& x, const ReferenceSolution& ref);

// A node-space multiplier λ with H̄′P̄H̄λ = H̄′P̄μ*, i.e. one satisfying the
// saddle-point stationarity condition ∇f(x*) + H̄′P̄H̄λ = 0.
Eigen::VectorXd node_multiplier(const StackedSystem& s, const ReferenceSolution& ref);

}  // namespace edgeflow
