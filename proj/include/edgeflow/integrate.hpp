#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace edgeflow {

enum class IntegrationMethod { Rk4Fixed, Rk45Adaptive };

enum class StopMetric { V, RhsNorm, W };

struct StopRule {
  StopMetric metric = StopMetric::V;
  double threshold = 0.0;

  bool operator==(const StopRule&) const = default;
};

struct IntegratorConfig {
  IntegrationMethod method = IntegrationMethod::Rk45Adaptive;
  double dt = 1e-3;  // fixed step (rk4) or initial step (rk45)
  double rtol = 1e-8;
  double atol = 1e-10;
  double t_end = 50.0;
  double record_every = 0.01;
  std::optional<StopRule> stop_on;

  // Throws InvalidConfig.
  void validate() const;

  bool operator==(const IntegratorConfig&) const = default;
};

using OdeRhs = std::function<Eigen::VectorXd(double t, const Eigen::VectorXd& y)>;
using StopMetricFn = std::function<double(double t, const Eigen::VectorXd& y)>;

struct OdeSolution {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  bool stopped_early = false;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  std::size_t rhs_evaluations = 0;
};

// Classical fourth-order Runge–Kutta. Throws NonFiniteDerivative.
Eigen::VectorXd rk4_step(const OdeRhs& rhs, double t, const Eigen::VectorXd& y, double dt);

// Integrates from t = 0 to config.t_end. States are recorded at t = 0, at every
// multiple of record_every and at the stop time; steps are shortened so that
// they land on those instants, so no interpolation is involved. The rk45
// method is Dormand–Prince 5(4) with the error test
//   max_k |err_k| / (atol + rtol · max(|y_k|, |y_new_k|)) <= 1.
// When config.stop_on is set, `stop_metric` is evaluated after every accepted
// step and integration ends once it drops to the threshold.
// Throws StepUnderflow (adaptive step < 1e-14), NonFiniteDerivative, InvalidConfig.
OdeSolution integrate(const OdeRhs& rhs, const Eigen::VectorXd& y0, const IntegratorConfig& config,
                      const StopMetricFn& stop_metric = {});

}  // namespace edgeflow
