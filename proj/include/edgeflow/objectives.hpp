#pragma once

#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace edgeflow {

namespace objective {

// f(x) = 0.
struct Zero {
  bool operator==(const Zero&) const = default;
};

// f(x) = w ‖x − c‖².
struct SquaredDistance {
  Eigen::VectorXd target;
  double weight = 1.0;

  bool operator==(const SquaredDistance& o) const { return target == o.target && weight == o.weight; }
};

// f(x) = x′Qx + c′x + r with Q symmetric PSD.
struct Quadratic {
  Eigen::MatrixXd Q;
  Eigen::VectorXd c;
  double r = 0.0;

  bool operator==(const Quadratic& o) const { return Q == o.Q && c == o.c && r == o.r; }
};

// f(x) = Σ_k exp(x[k]).
struct ExpSum {
  bool operator==(const ExpSum&) const = default;
};

}  // namespace objective

// Closed set of convex, continuously differentiable local objectives.
using ObjectiveSpec =
    std::variant<objective::Zero, objective::SquaredDistance, objective::Quadratic, objective::ExpSum>;

std::string_view type_name(const ObjectiveSpec& spec);

// Checks parameters for dimension n: target/Q/c sizes, positive weight,
// Q symmetric with eigenvalues >= -1e-10. Throws InvalidObjective.
void validate(const ObjectiveSpec& spec, int n);

// Each throws DimensionMismatch when x does not match the spec's parameters.
double value(const ObjectiveSpec& spec, const Eigen::VectorXd& x);
Eigen::VectorXd gradient(const ObjectiveSpec& spec, const Eigen::VectorXd& x);
Eigen::MatrixXd hessian(const ObjectiveSpec& spec, const Eigen::VectorXd& x);

// Max over coordinates of |g_fd − g| / max(1, |g|), central differences with step h.
double fd_check(const ObjectiveSpec& spec, const Eigen::VectorXd& x, double h = 1e-6);

bool is_zero(const ObjectiveSpec& spec);
// Zero, SquaredDistance or Quadratic.
bool is_quadratic(const ObjectiveSpec& spec);

// f(x) = Σ_i f_i(x_i) and its stacked derivatives for x = col(x_1..x_m).
double total_value(std::span<const ObjectiveSpec> specs, const Eigen::VectorXd& x, int n);
Eigen::VectorXd stacked_gradient(std::span<const ObjectiveSpec> specs, const Eigen::VectorXd& x, int n);
Eigen::MatrixXd stacked_hessian(std::span<const ObjectiveSpec> specs, const Eigen::VectorXd& x, int n);

}  // namespace edgeflow
