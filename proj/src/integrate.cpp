#include "edgeflow/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "edgeflow/error.hpp"

namespace edgeflow {

namespace {

constexpr double kMinStep = 1e-14;

Eigen::VectorXd eval_checked(const OdeRhs& rhs, double t, const Eigen::VectorXd& y, std::size_t& counter) {
  ++counter;
  Eigen::VectorXd d = rhs(t, y);
  if (d.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "rhs returned wrong dimension");
  if (!d.allFinite()) throw Error(ErrorCode::NonFiniteDerivative, "at t = " + std::to_string(t));
  return d;
}

// Dormand–Prince 5(4) tableau.
namespace dp {
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b − b̂ (fifth minus fourth order weights)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
}  // namespace dp

}  // namespace

void IntegratorConfig::validate() const {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidConfig, "dt must be positive");
  if (!(rtol > 0.0)) throw Error(ErrorCode::InvalidConfig, "rtol must be positive");
  if (!(atol > 0.0)) throw Error(ErrorCode::InvalidConfig, "atol must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw Error(ErrorCode::InvalidConfig, "t_end must be >= 0");
  if (!(record_every > 0.0)) throw Error(ErrorCode::InvalidConfig, "record_every must be positive");
  if (stop_on && !(stop_on->threshold >= 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "stop_on threshold must be >= 0");
  }
}

Eigen::VectorXd rk4_step(const OdeRhs& rhs, double t, const Eigen::VectorXd& y, double dt) {
  std::size_t unused = 0;
  const Eigen::VectorXd k1 = eval_checked(rhs, t, y, unused);
  const Eigen::VectorXd k2 = eval_checked(rhs, t + 0.5 * dt, y + 0.5 * dt * k1, unused);
  const Eigen::VectorXd k3 = eval_checked(rhs, t + 0.5 * dt, y + 0.5 * dt * k2, unused);
  const Eigen::VectorXd k4 = eval_checked(rhs, t + dt, y + dt * k3, unused);
  return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

OdeSolution integrate(const OdeRhs& rhs, const Eigen::VectorXd& y0, const IntegratorConfig& config,
                      const StopMetricFn& stop_metric) {
  config.validate();
  OdeSolution sol;
  sol.times.push_back(0.0);
  sol.states.push_back(y0);

  const bool watch = config.stop_on.has_value() && static_cast<bool>(stop_metric);
  auto should_stop = [&](double t, const Eigen::VectorXd& y) {
    return watch && stop_metric(t, y) <= config.stop_on->threshold;
  };
  if (config.t_end == 0.0 || should_stop(0.0, y0)) {
    sol.stopped_early = config.t_end > 0.0;
    return sol;
  }

  const bool adaptive = config.method == IntegrationMethod::Rk45Adaptive;
  double t = 0.0;
  Eigen::VectorXd y = y0;
  long record_index = 1;
  double h = config.dt;
  Eigen::VectorXd k1;
  if (adaptive) k1 = eval_checked(rhs, t, y, sol.rhs_evaluations);

  while (t < config.t_end) {
    const double boundary = std::min(static_cast<double>(record_index) * config.record_every, config.t_end);
    const double remaining = boundary - t;
    // Avoid leaving a sliver before the boundary.
    const bool lands = h >= remaining * (1.0 - 1e-10);
    const double step = lands ? remaining : h;

    Eigen::VectorXd y_next;
    if (!adaptive) {
      const std::size_t before = sol.rhs_evaluations;
      y_next = rk4_step(rhs, t, y, step);
      sol.rhs_evaluations = before + 4;
    } else {
      using namespace dp;
      const Eigen::VectorXd k2 = eval_checked(rhs, t + c2 * step, y + step * (a21 * k1), sol.rhs_evaluations);
      const Eigen::VectorXd k3 =
          eval_checked(rhs, t + c3 * step, y + step * (a31 * k1 + a32 * k2), sol.rhs_evaluations);
      const Eigen::VectorXd k4 =
          eval_checked(rhs, t + c4 * step, y + step * (a41 * k1 + a42 * k2 + a43 * k3), sol.rhs_evaluations);
      const Eigen::VectorXd k5 = eval_checked(
          rhs, t + c5 * step, y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), sol.rhs_evaluations);
      const Eigen::VectorXd k6 = eval_checked(
          rhs, t + step, y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), sol.rhs_evaluations);
      Eigen::VectorXd candidate = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      Eigen::VectorXd k7 = eval_checked(rhs, t + step, candidate, sol.rhs_evaluations);
      const Eigen::VectorXd err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const Eigen::ArrayXd scale =
          config.atol + config.rtol * y.array().abs().max(candidate.array().abs());
      const double err_norm = (err.array().abs() / scale).maxCoeff();

      if (!(err_norm <= 1.0)) {
        ++sol.rejected_steps;
        const double shrink = std::isfinite(err_norm) ? std::max(0.2, 0.9 * std::pow(err_norm, -0.2)) : 0.2;
        h = step * shrink;
        if (h < kMinStep) {
          throw Error(ErrorCode::StepUnderflow, "step fell to " + std::to_string(h) + " at t = " + std::to_string(t));
        }
        continue;
      }
      const double grow = err_norm == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(err_norm, -0.2)));
      // A step shortened to hit a boundary says nothing against the previous proposal.
      h = lands ? std::max(h, step * grow) : step * grow;
      y_next = std::move(candidate);
      k1 = std::move(k7);
    }

    ++sol.accepted_steps;
    y = std::move(y_next);
    t = lands ? boundary : t + step;
    bool recorded = false;
    if (lands) {
      sol.times.push_back(t);
      sol.states.push_back(y);
      recorded = true;
      if (boundary >= static_cast<double>(record_index) * config.record_every) ++record_index;
    }
    if (should_stop(t, y)) {
      if (!recorded) {
        sol.times.push_back(t);
        sol.states.push_back(y);
      }
      sol.stopped_early = t < config.t_end;
      break;
    }
  }
  return sol;
}

}  // namespace edgeflow
