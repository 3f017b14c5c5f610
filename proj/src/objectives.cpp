#include "edgeflow/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "edgeflow/error.hpp"

namespace edgeflow {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_dim(Eigen::Index expected, Eigen::Index actual, std::string_view what) {
  if (expected != actual) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": expected dimension " +
                                                  std::to_string(expected) + ", got " + std::to_string(actual));
  }
}

}  // namespace

std::string_view type_name(const ObjectiveSpec& spec) {
  return std::visit(overloaded{
                        [](const objective::Zero&) { return std::string_view("zero"); },
                        [](const objective::SquaredDistance&) { return std::string_view("squared_distance"); },
                        [](const objective::Quadratic&) { return std::string_view("quadratic"); },
                        [](const objective::ExpSum&) { return std::string_view("exp_sum"); },
                    },
                    spec);
}

void validate(const ObjectiveSpec& spec, int n) {
  std::visit(overloaded{
                 [](const objective::Zero&) {},
                 [n](const objective::SquaredDistance& f) {
                   if (f.target.size() != n) throw Error(ErrorCode::InvalidObjective, "target must have length n");
                   if (!(f.weight > 0.0) || !std::isfinite(f.weight)) {
                     throw Error(ErrorCode::InvalidObjective, "weight must be positive");
                   }
                 },
                 [n](const objective::Quadratic& f) {
                   if (f.Q.rows() != n || f.Q.cols() != n) throw Error(ErrorCode::InvalidObjective, "Q must be n x n");
                   if (f.c.size() != n) throw Error(ErrorCode::InvalidObjective, "c must have length n");
                   if ((f.Q - f.Q.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
                     throw Error(ErrorCode::InvalidObjective, "Q must be symmetric");
                   }
                   const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(f.Q, Eigen::EigenvaluesOnly);
                   if (eig.eigenvalues().minCoeff() < -1e-10) {
                     throw Error(ErrorCode::InvalidObjective, "Q must be positive semidefinite");
                   }
                 },
                 [](const objective::ExpSum&) {},
             },
             spec);
}

double value(const ObjectiveSpec& spec, const Eigen::VectorXd& x) {
  return std::visit(overloaded{
                        [](const objective::Zero&) { return 0.0; },
                        [&x](const objective::SquaredDistance& f) {
                          require_dim(f.target.size(), x.size(), "squared_distance");
                          return f.weight * (x - f.target).squaredNorm();
                        },
                        [&x](const objective::Quadratic& f) {
                          require_dim(f.c.size(), x.size(), "quadratic");
                          return x.dot(f.Q * x) + f.c.dot(x) + f.r;
                        },
                        [&x](const objective::ExpSum&) { return x.array().exp().sum(); },
                    },
                    spec);
}

Eigen::VectorXd gradient(const ObjectiveSpec& spec, const Eigen::VectorXd& x) {
  return std::visit(overloaded{
                        [&x](const objective::Zero&) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(x.size()); },
                        [&x](const objective::SquaredDistance& f) -> Eigen::VectorXd {
                          require_dim(f.target.size(), x.size(), "squared_distance");
                          return 2.0 * f.weight * (x - f.target);
                        },
                        [&x](const objective::Quadratic& f) -> Eigen::VectorXd {
                          require_dim(f.c.size(), x.size(), "quadratic");
                          return (f.Q + f.Q.transpose()) * x + f.c;
                        },
                        [&x](const objective::ExpSum&) -> Eigen::VectorXd { return x.array().exp().matrix(); },
                    },
                    spec);
}

Eigen::MatrixXd hessian(const ObjectiveSpec& spec, const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  return std::visit(overloaded{
                        [n](const objective::Zero&) -> Eigen::MatrixXd { return Eigen::MatrixXd::Zero(n, n); },
                        [n](const objective::SquaredDistance& f) -> Eigen::MatrixXd {
                          require_dim(f.target.size(), n, "squared_distance");
                          return 2.0 * f.weight * Eigen::MatrixXd::Identity(n, n);
                        },
                        [n](const objective::Quadratic& f) -> Eigen::MatrixXd {
                          require_dim(f.c.size(), n, "quadratic");
                          return f.Q + f.Q.transpose();
                        },
                        [&x](const objective::ExpSum&) -> Eigen::MatrixXd {
                          return x.array().exp().matrix().asDiagonal();
                        },
                    },
                    spec);
}

double fd_check(const ObjectiveSpec& spec, const Eigen::VectorXd& x, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidConfig, "finite-difference step must be positive");
  const Eigen::VectorXd g = gradient(spec, x);
  double worst = 0.0;
  Eigen::VectorXd probe = x;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    probe(k) = x(k) + h;
    const double up = value(spec, probe);
    probe(k) = x(k) - h;
    const double down = value(spec, probe);
    probe(k) = x(k);
    const double fd = (up - down) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - g(k)) / std::max(1.0, std::abs(g(k))));
  }
  return worst;
}

bool is_zero(const ObjectiveSpec& spec) { return std::holds_alternative<objective::Zero>(spec); }

bool is_quadratic(const ObjectiveSpec& spec) { return !std::holds_alternative<objective::ExpSum>(spec); }

double total_value(std::span<const ObjectiveSpec> specs, const Eigen::VectorXd& x, int n) {
  require_dim(static_cast<Eigen::Index>(specs.size()) * n, x.size(), "stacked state");
  double total = 0.0;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    total += value(specs[i], x.segment(static_cast<Eigen::Index>(i) * n, n));
  }
  return total;
}

Eigen::VectorXd stacked_gradient(std::span<const ObjectiveSpec> specs, const Eigen::VectorXd& x, int n) {
  require_dim(static_cast<Eigen::Index>(specs.size()) * n, x.size(), "stacked state");
  Eigen::VectorXd g(x.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i) * n;
    g.segment(k, n) = gradient(specs[i], x.segment(k, n));
  }
  return g;
}

Eigen::MatrixXd stacked_hessian(std::span<const ObjectiveSpec> specs, const Eigen::VectorXd& x, int n) {
  require_dim(static_cast<Eigen::Index>(specs.size()) * n, x.size(), "stacked state");
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(x.size(), x.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i) * n;
    h.block(k, k, n, n) = hessian(specs[i], x.segment(k, n));
  }
  return h;
}

}  // namespace edgeflow
