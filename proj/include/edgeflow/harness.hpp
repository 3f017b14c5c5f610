#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "edgeflow/constraints.hpp"
#include "edgeflow/dynamics.hpp"
#include "edgeflow/graph.hpp"
#include "edgeflow/integrate.hpp"
#include "edgeflow/objectives.hpp"
#include "edgeflow/reference.hpp"

namespace edgeflow {

enum class FlowMode { SaddlePoint, EdgeOnly };

struct ExplicitInit {
  Eigen::VectorXd x0;
  std::optional<Eigen::VectorXd> lambda0;

  bool operator==(const ExplicitInit& o) const { return x0 == o.x0 && lambda0 == o.lambda0; }
};

// Every entry of x(0) drawn i.i.d. from U[low, high) with a seeded generator.
struct UniformInit {
  double low = -10.0;
  double high = 10.0;
  std::uint64_t seed = 0;

  bool operator==(const UniformInit&) const = default;
};

using InitSpec = std::variant<ExplicitInit, UniformInit>;

struct Scenario {
  int n = 0;
  Graph graph;
  std::vector<EdgeConstraint> constraints;  // one per edge, edge order
  std::vector<ObjectiveSpec> objectives;    // one per agent
  FlowMode mode = FlowMode::SaddlePoint;
  InitSpec init = UniformInit{};
  IntegratorConfig integrator;
  bool edge_only_override = false;  // allow edge_only with non-Zero objectives (they are ignored)

  bool operator==(const Scenario& o) const;
};

enum class CheckStatus { Pass, Fail, Skipped };

struct ValidationCheck {
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  std::string evidence;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  std::vector<std::string> warnings;
  std::optional<StackedSystem> system;  // present once consistency and rank pass

  bool ok() const;
  const ValidationCheck* first_failure() const;
};

// Runs the named checks in order: consistency, objectives, rank, connectivity,
// well_configured, feasibility.
ValidationReport validate_scenario(const Scenario& sc, double feasibility_tolerance = kDefaultFeasibilityTolerance);

// Throws ValidationFailed naming the first failing check; returns the stacked system.
StackedSystem require_valid(const Scenario& sc);

// x(0), λ(0) = 0 unless given. Throws DimensionMismatch for explicit vectors.
SystemState initialize(const Scenario& sc);

// Which neighbor slices each agent was handed, over every evaluation.
struct LocalityLog {
  std::vector<std::set<std::vector<int>>> slices_seen;  // per agent
  std::vector<std::size_t> calls;                       // per agent
};

// Builds the global derivative only from per-agent calls, each given the
// slice of state listed for it in the neighbor table.
class DistributedAssembler {
 public:
  DistributedAssembler(const StackedSystem& system, std::span<const ObjectiveSpec> objectives);
  // Throws UnexpectedNeighbor if the table names a node that shares no edge.
  DistributedAssembler(const StackedSystem& system, std::span<const ObjectiveSpec> objectives,
                       std::vector<std::vector<int>> neighbor_table);

  FlowRate saddle(const SystemState& state);
  Eigen::VectorXd edge_only(const Eigen::VectorXd& x);

  const LocalityLog& log() const noexcept { return log_; }

 private:
  std::vector<NeighborSample> snapshot(int i, const Eigen::VectorXd& x, const Eigen::VectorXd* lambda);

  const StackedSystem* system_;
  std::vector<ObjectiveSpec> objectives_;
  std::vector<std::vector<int>> table_;
  std::vector<std::vector<LocalConstraint>> local_;
  LocalityLog log_;
};

// True iff every agent was evaluated and every slice it received equals N_i.
bool locality_audit(const LocalityLog& log, const Graph& g);

struct Trajectory {
  std::vector<double> times;
  std::vector<SystemState> states;
  std::vector<double> V_series;
  std::optional<std::vector<double>> W_series;
};

struct RateFit {
  double rate = 0.0;
  double r_squared = 0.0;
  std::size_t samples = 0;
};

inline constexpr double kRateFloor = 1e-13;

// Least-squares slope of ln(series) against time over the middle `window`
// fraction of the samples preceding the first value <= 1e-13.
// Throws InsufficientData when fewer than 10 samples are usable.
RateFit fit_exponential_rate(std::span<const double> times, std::span<const double> series, double window = 0.6);

struct RunSummary {
  double final_V = 0.0;
  std::optional<double> final_W;
  double final_rhs_norm = 0.0;
  std::optional<double> fitted_rate;  // of W in saddle_point runs with a reference, else of V
  std::optional<double> fit_r_squared;
  std::string fitted_series;
  bool locality_ok = false;
  double wall_time = 0.0;
  std::optional<std::uint64_t> seed;
  double t_final = 0.0;
  bool stopped_early = false;
  std::vector<std::string> notes;
};

struct RunResult {
  Trajectory trajectory;
  RunSummary summary;
  std::optional<ReferenceSolution> reference;
  LocalityLog locality;
};

// Validates, initializes, integrates the selected flow through the
// DistributedAssembler and records V (always) and W (when a reference exists).
// Throws ValidationFailed and propagates integrator errors.
RunResult run(const Scenario& sc);

}  // namespace edgeflow
