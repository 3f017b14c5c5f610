#include "edgeflow/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "edgeflow/error.hpp"
#include "edgeflow/linalg.hpp"

namespace edgeflow {

namespace {

void require_objectives(const StackedSystem& s, std::span<const ObjectiveSpec> f) {
  if (static_cast<int>(f.size()) != s.agent_count()) {
    throw Error(ErrorCode::DimensionMismatch, "need one objective per agent");
  }
}

bool unique_minimizer(const Eigen::MatrixXd& hess, const Eigen::MatrixXd& jac) {
  Eigen::MatrixXd stacked(hess.rows() + jac.rows(), hess.cols());
  stacked << hess, jac;
  return linalg::numerical_rank(stacked) == hess.cols();
}

std::string format_residual(double r) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << r;
  return os.str();
}

}  // namespace

double kkt_residual(const StackedSystem& s, std::span<const ObjectiveSpec> f, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& mu) {
  const Eigen::VectorXd stationarity = stacked_gradient(f, x, s.n) + s.H_bar.transpose() * (s.P_bar * mu);
  return std::max(stationarity.norm(), residual(s, x).norm());
}

ReferenceSolution solve_quadratic_kkt(const StackedSystem& s, std::span<const ObjectiveSpec> f) {
  require_objectives(s, f);
  for (const auto& spec : f) {
    if (!is_quadratic(spec)) {
      throw Error(ErrorCode::InvalidObjective, std::string("KKT solve does not accept ") + std::string(type_name(spec)));
    }
  }
  const int nx = s.state_dim();
  const int nc = s.constraint_dim();
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(nx);
  const Eigen::MatrixXd hess = stacked_hessian(f, zero, s.n);
  const Eigen::VectorXd grad0 = stacked_gradient(f, zero, s.n);
  const Eigen::MatrixXd jac = s.constraint_matrix();

  if (!unique_minimizer(hess, jac)) {
    throw Error(ErrorCode::Unbounded, "objective is flat along a feasible direction; no unique minimizer");
  }

  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(nx + nc, nx + nc);
  kkt.topLeftCorner(nx, nx) = hess;
  kkt.topRightCorner(nx, nc) = jac.transpose();
  kkt.bottomLeftCorner(nc, nx) = jac;
  Eigen::VectorXd rhs(nx + nc);
  rhs << -grad0, s.P_bar * s.b_bar;
  const Eigen::VectorXd sol = linalg::least_squares(kkt, rhs);

  ReferenceSolution out;
  out.x_star = sol.head(nx);
  out.mu_star = sol.tail(nc);
  out.kkt_residual = kkt_residual(s, f, out.x_star, out.mu_star);
  out.objective_value = total_value(f, out.x_star, s.n);
  out.unique = true;
  out.method = "quadratic_kkt";
  if (!(out.kkt_residual <= 1e-8)) {
    throw Error(ErrorCode::NoConvergence, "KKT system inconsistent, residual " + format_residual(out.kkt_residual));
  }
  return out;
}

ReferenceSolution solve_general(const StackedSystem& s, std::span<const ObjectiveSpec> f,
                                const Eigen::VectorXd& init, const GeneralSolverOptions& options) {
  require_objectives(s, f);
  if (init.size() != s.state_dim()) throw Error(ErrorCode::DimensionMismatch, "init has wrong dimension");

  const Eigen::MatrixXd jac = s.constraint_matrix();
  const Eigen::MatrixXd gram = jac.transpose() * jac;
  const Eigen::VectorXd target = s.P_bar * s.b_bar;

  Eigen::VectorXd x = init;
  // First-order multiplier estimate at the starting point.
  Eigen::VectorXd mu = linalg::least_squares(jac.transpose(), -stacked_gradient(f, x, s.n));
  double rho = options.rho_initial;
  double last_violation = std::numeric_limits<double>::infinity();

  auto merit = [&](const Eigen::VectorXd& z) {
    const Eigen::VectorXd r = jac * z - target;
    return total_value(f, z, s.n) + mu.dot(r) + 0.5 * rho * r.squaredNorm();
  };

  for (int outer = 1; outer <= options.max_outer; ++outer) {
    for (int inner = 0; inner < options.max_inner; ++inner) {
      const Eigen::VectorXd r = jac * x - target;
      const Eigen::VectorXd g = stacked_gradient(f, x, s.n) + jac.transpose() * (mu + rho * r);
      if (g.norm() <= options.inner_gradient_tolerance) break;
      const Eigen::MatrixXd h = stacked_hessian(f, x, s.n) + rho * gram;
      Eigen::VectorXd step;
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
      if (ldlt.info() == Eigen::Success && ldlt.isPositive()) step = -ldlt.solve(g);
      if (step.size() == 0 || !step.allFinite()) step = -linalg::least_squares(h, g);

      const double base = merit(x);
      const double slope = g.dot(step);
      if (!(slope < 0.0)) break;
      double t = 1.0;
      // Slack at rounding level so exact Newton steps near the optimum are not refused.
      const double slack = 1e-14 * (1.0 + std::abs(base));
      while (t > 1e-12 && merit(x + t * step) > base + 1e-4 * t * slope + slack) t *= 0.5;
      if (t <= 1e-12) break;
      const Eigen::VectorXd move = t * step;
      x += move;
      if (move.norm() <= 1e-15 * (1.0 + x.norm())) break;
    }

    const Eigen::VectorXd r = jac * x - target;
    mu += rho * r;
    double kkt = kkt_residual(s, f, x, mu);
    if (kkt > options.kkt_tolerance && r.norm() <= options.kkt_tolerance) {
      // At large ρ the update ρr carries ρ times the rounding in r; the
      // least-squares multiplier at a feasible x does not.
      const Eigen::VectorXd refined = linalg::least_squares(jac.transpose(), -stacked_gradient(f, x, s.n));
      const double refined_kkt = kkt_residual(s, f, x, refined);
      if (refined_kkt < kkt) {
        mu = refined;
        kkt = refined_kkt;
      }
    }
    if (kkt <= options.kkt_tolerance) {
      ReferenceSolution out;
      out.x_star = x;
      out.mu_star = mu;
      out.kkt_residual = kkt;
      out.objective_value = total_value(f, x, s.n);
      out.unique = unique_minimizer(stacked_hessian(f, x, s.n), jac);
      out.outer_iterations = outer;
      out.method = "augmented_lagrangian";
      return out;
    }
    const double violation = r.norm();
    if (violation > 0.25 * last_violation) rho = std::min(rho * options.rho_growth, options.rho_max);
    last_violation = violation;
  }
  throw Error(ErrorCode::NoConvergence,
              "KKT residual " + format_residual(kkt_residual(s, f, x, mu)) + " after " +
                  std::to_string(options.max_outer) + " outer iterations");
}

ReferenceSolution solve_reference(const StackedSystem& s, std::span<const ObjectiveSpec> f) {
  const bool quadratic = std::all_of(f.begin(), f.end(), [](const ObjectiveSpec& spec) { return is_quadratic(spec); });
  if (quadratic) return solve_quadratic_kkt(s, f);
  return solve_general(s, f, feasible_point(s).x);
}

double distance_to_opt(const Eigen::VectorXd& x, const ReferenceSolution& ref) {
  if (x.size() != ref.x_star.size()) throw Error(ErrorCode::DimensionMismatch, "state and x* differ in size");
  return 0.5 * (x - ref.x_star).squaredNorm();
}

Eigen::VectorXd node_multiplier(const StackedSystem& s, const ReferenceSolution& ref) {
  const Eigen::MatrixXd laplacian = s.H_bar.transpose() * s.P_bar * s.H_bar;
  return linalg::least_squares(laplacian, s.H_bar.transpose() * (s.P_bar * ref.mu_star));
}

}  // namespace edgeflow
