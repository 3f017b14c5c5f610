#include "edgeflow/dynamics.hpp"

#include <algorithm>
#include <string>

#include "edgeflow/error.hpp"

namespace edgeflow {

namespace {

void require_state(const StackedSystem& s, const Eigen::VectorXd& v, const char* what) {
  if (v.size() != s.state_dim()) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " has " + std::to_string(v.size()) +
                                                  " entries, expected " + std::to_string(s.state_dim()));
  }
}

// Pairs each local constraint with its neighbor sample; both sides must name
// the same neighbor set.
std::vector<const NeighborSample*> match_neighbors(int i, std::span<const NeighborSample> neighbors,
                                                   std::span<const LocalConstraint> local) {
  std::vector<const NeighborSample*> matched(local.size(), nullptr);
  for (const auto& sample : neighbors) {
    const auto it = std::find_if(local.begin(), local.end(), [&](const LocalConstraint& c) { return c.j == sample.j; });
    if (it == local.end()) {
      throw Error(ErrorCode::UnexpectedNeighbor,
                  "agent " + std::to_string(i + 1) + " received data from non-neighbor " + std::to_string(sample.j + 1));
    }
    auto& slot = matched[static_cast<std::size_t>(it - local.begin())];
    if (slot != nullptr) {
      throw Error(ErrorCode::UnexpectedNeighbor,
                  "agent " + std::to_string(i + 1) + " received neighbor " + std::to_string(sample.j + 1) + " twice");
    }
    slot = &sample;
  }
  for (std::size_t k = 0; k < local.size(); ++k) {
    if (matched[k] == nullptr) {
      throw Error(ErrorCode::MissingNeighbor,
                  "agent " + std::to_string(i + 1) + " has no data for neighbor " + std::to_string(local[k].j + 1));
    }
  }
  return matched;
}

}  // namespace

std::vector<LocalConstraint> local_constraints(const StackedSystem& s, int i) {
  std::vector<LocalConstraint> out;
  for (int j : s.graph.neighbors(i)) {
    const int k = s.graph.find_edge(i, j);
    const auto& block = s.blocks[static_cast<std::size_t>(k)];
    const bool forward = s.graph.edge(k).tail == i;
    out.push_back({j, block.P, forward ? block.b_bar : Eigen::VectorXd(-block.b_bar)});
  }
  return out;
}

double lagrangian_value(const StackedSystem& s, std::span<const ObjectiveSpec> f, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& lambda) {
  require_state(s, lambda, "lambda");
  const Eigen::VectorXd e = residual(s, x);
  return total_value(f, x, s.n) + lambda.dot(s.H_bar.transpose() * e) + 0.5 * e.squaredNorm();
}

FlowRate saddle_rhs_compact(const StackedSystem& s, std::span<const ObjectiveSpec> f, const SystemState& state) {
  require_state(s, state.lambda, "lambda");
  const Eigen::VectorXd coupling = s.H_bar.transpose() * residual(s, state.x);
  FlowRate rate;
  rate.xdot = -stacked_gradient(f, state.x, s.n) - s.H_bar.transpose() * (s.P_bar * (s.H_bar * state.lambda)) -
              coupling;
  rate.lambdadot = coupling;
  return rate;
}

Eigen::VectorXd edge_only_rhs_compact(const StackedSystem& s, const Eigen::VectorXd& x) {
  return -(s.H_bar.transpose() * residual(s, x));
}

FlowRate saddle_rhs_local(int i, const ObjectiveSpec& f_i, const Eigen::VectorXd& x_i,
                          const Eigen::VectorXd& lambda_i, std::span<const NeighborSample> neighbors,
                          std::span<const LocalConstraint> local) {
  if (lambda_i.size() != x_i.size()) throw Error(ErrorCode::DimensionMismatch, "lambda_i and x_i differ in size");
  const auto matched = match_neighbors(i, neighbors, local);

  Eigen::VectorXd multiplier_term = Eigen::VectorXd::Zero(x_i.size());
  Eigen::VectorXd agreement_term = Eigen::VectorXd::Zero(x_i.size());
  for (std::size_t k = 0; k < local.size(); ++k) {
    const auto& c = local[k];
    const auto& nb = *matched[k];
    if (nb.x.size() != x_i.size() || nb.lambda.size() != x_i.size()) {
      throw Error(ErrorCode::DimensionMismatch, "neighbor " + std::to_string(nb.j + 1) + " sample has wrong size");
    }
    multiplier_term += c.P * (lambda_i - nb.lambda);
    agreement_term += c.P * (x_i - nb.x - c.b_bar);
  }
  return FlowRate{-gradient(f_i, x_i) - multiplier_term - agreement_term, agreement_term};
}

Eigen::VectorXd edge_only_rhs_local(int i, const Eigen::VectorXd& x_i, std::span<const NeighborSample> neighbors,
                                    std::span<const LocalConstraint> local) {
  const auto matched = match_neighbors(i, neighbors, local);
  Eigen::VectorXd agreement_term = Eigen::VectorXd::Zero(x_i.size());
  for (std::size_t k = 0; k < local.size(); ++k) {
    const auto& nb = *matched[k];
    if (nb.x.size() != x_i.size()) {
      throw Error(ErrorCode::DimensionMismatch, "neighbor " + std::to_string(nb.j + 1) + " sample has wrong size");
    }
    agreement_term += local[k].P * (x_i - nb.x - local[k].b_bar);
  }
  return -agreement_term;
}

EquilibriumResidual equilibrium_residual(const StackedSystem& s, std::span<const ObjectiveSpec> f,
                                         const Eigen::VectorXd& x, const Eigen::VectorXd& lambda) {
  require_state(s, lambda, "lambda");
  EquilibriumResidual r;
  r.primal = (s.H_bar.transpose() * residual(s, x)).norm();
  r.stationarity =
      (stacked_gradient(f, x, s.n) + s.H_bar.transpose() * (s.P_bar * (s.H_bar * lambda))).norm();
  return r;
}

Eigen::MatrixXd error_matrix(const StackedSystem& s) {
  const Eigen::MatrixXd ph = s.constraint_matrix();
  return ph * ph.transpose();
}

double error_dynamics_check(const StackedSystem& s, std::span<const double> times,
                            std::span<const Eigen::VectorXd> states) {
  if (times.size() != states.size()) {
    throw Error(ErrorCode::DimensionMismatch, "times and states differ in length");
  }
  if (times.size() < 3) return 0.0;
  const Eigen::MatrixXd m = error_matrix(s);
  std::vector<Eigen::VectorXd> e;
  e.reserve(states.size());
  for (const auto& x : states) e.push_back(residual(s, x));

  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < times.size(); ++k) {
    const double h1 = times[k] - times[k - 1];
    const double h2 = times[k + 1] - times[k];
    const Eigen::VectorXd edot = (-h2 / (h1 * (h1 + h2))) * e[k - 1] + ((h2 - h1) / (h1 * h2)) * e[k] +
                                 (h1 / (h2 * (h1 + h2))) * e[k + 1];
    worst = std::max(worst, (edot + m * e[k]).lpNorm<Eigen::Infinity>());
  }
  return worst;
}

}  // namespace edgeflow
