#include "edgeflow/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "edgeflow/error.hpp"
#include "edgeflow/linalg.hpp"

namespace edgeflow {

namespace {

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

std::string edge_label(int i, int j) {
  return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
}

bool constraints_equal(const EdgeConstraint& a, const EdgeConstraint& b) {
  return a.i == b.i && a.j == b.j && a.A.rows() == b.A.rows() && a.A.cols() == b.A.cols() && a.A == b.A &&
         a.b.size() == b.b.size() && a.b == b.b;
}

// Consistency: one well-shaped constraint per edge, listed in edge orientation.
std::string consistency_problem(const Scenario& sc) {
  const auto& g = sc.graph;
  if (sc.n < 1) return "n must be positive";
  if (static_cast<int>(sc.constraints.size()) != g.edge_count()) {
    return std::to_string(sc.constraints.size()) + " constraints for " + std::to_string(g.edge_count()) + " edges";
  }
  for (int k = 0; k < g.edge_count(); ++k) {
    const auto& e = g.edge(k);
    const auto& c = sc.constraints[static_cast<std::size_t>(k)];
    if (c.i != e.tail || c.j != e.head) {
      return "constraint " + edge_label(c.i, c.j) + " does not match edge " + edge_label(e.tail, e.head);
    }
    if (c.A.cols() != sc.n || c.A.rows() < 1 || c.A.rows() > sc.n) {
      return "edge " + edge_label(c.i, c.j) + ": A is " + std::to_string(c.A.rows()) + "x" +
             std::to_string(c.A.cols()) + ", need d x n with 1 <= d <= n";
    }
    if (c.b.size() != c.A.rows()) return "edge " + edge_label(c.i, c.j) + ": b length differs from rows of A";
  }
  return {};
}

// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double unit_uniform(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

}  // namespace

bool Scenario::operator==(const Scenario& o) const {
  if (n != o.n || !(graph == o.graph) || mode != o.mode || !(init == o.init) || !(integrator == o.integrator) ||
      edge_only_override != o.edge_only_override || objectives != o.objectives ||
      constraints.size() != o.constraints.size()) {
    return false;
  }
  for (std::size_t k = 0; k < constraints.size(); ++k) {
    if (!constraints_equal(constraints[k], o.constraints[k])) return false;
  }
  return true;
}

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const ValidationCheck& c) { return c.status == CheckStatus::Pass; });
}

const ValidationCheck* ValidationReport::first_failure() const {
  for (const auto& c : checks) {
    if (c.status != CheckStatus::Pass) return &c;
  }
  return nullptr;
}

ValidationReport validate_scenario(const Scenario& sc, double feasibility_tolerance) {
  ValidationReport report;
  auto add = [&](std::string name, CheckStatus status, std::string evidence) {
    report.checks.push_back({std::move(name), status, std::move(evidence)});
  };

  const std::string consistency = consistency_problem(sc);
  add("consistency", consistency.empty() ? CheckStatus::Pass : CheckStatus::Fail,
      consistency.empty() ? std::to_string(sc.graph.edge_count()) + " edge constraints, mirrors synthesized"
                          : consistency);

  std::string objective_problem;
  if (static_cast<int>(sc.objectives.size()) != sc.graph.agent_count()) {
    objective_problem = std::to_string(sc.objectives.size()) + " objectives for " +
                        std::to_string(sc.graph.agent_count()) + " agents";
  } else {
    for (std::size_t i = 0; i < sc.objectives.size() && objective_problem.empty(); ++i) {
      try {
        validate(sc.objectives[i], sc.n);
      } catch (const Error& e) {
        objective_problem = "agent " + std::to_string(i + 1) + ": " + e.what();
      }
    }
    const bool all_zero = std::all_of(sc.objectives.begin(), sc.objectives.end(), is_zero);
    if (objective_problem.empty() && sc.mode == FlowMode::EdgeOnly && !all_zero && !sc.edge_only_override) {
      objective_problem = "edge_only mode needs all-zero objectives or edge_only_override";
    }
  }
  add("objectives", objective_problem.empty() ? CheckStatus::Pass : CheckStatus::Fail,
      objective_problem.empty() ? "all objectives well-formed" : objective_problem);

  if (!consistency.empty()) {
    for (const char* name : {"rank", "connectivity", "well_configured", "feasibility"}) {
      add(name, CheckStatus::Skipped, "consistency failed");
    }
    return report;
  }

  std::string rank_problem;
  double worst_sigma_ratio = std::numeric_limits<double>::infinity();
  for (const auto& c : sc.constraints) {
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(c.A);
    const auto& s = svd.singularValues();
    if (s(0) > 0.0) worst_sigma_ratio = std::min(worst_sigma_ratio, s(s.size() - 1) / s(0));
    try {
      (void)project_constraint(c);
    } catch (const Error& e) {
      if (rank_problem.empty()) rank_problem = e.what();
    }
  }
  if (sc.constraints.empty()) worst_sigma_ratio = 1.0;
  add("rank", rank_problem.empty() ? CheckStatus::Pass : CheckStatus::Fail,
      rank_problem.empty() ? "all A_ij full row rank, min sigma_min/sigma_max = " + sci(worst_sigma_ratio)
                           : rank_problem);

  const int components = component_count(sc.graph);
  add("connectivity", components == 1 ? CheckStatus::Pass : CheckStatus::Fail,
      std::to_string(components) + " connected component(s)");

  if (!rank_problem.empty()) {
    add("well_configured", CheckStatus::Skipped, "rank failed");
    add("feasibility", CheckStatus::Skipped, "rank failed");
    return report;
  }

  report.system = stack(sc.graph, sc.constraints, sc.n);
  const auto& s = *report.system;
  const auto wc = well_configured(s);
  add("well_configured", wc.ok ? CheckStatus::Pass : CheckStatus::Fail,
      "rank(PH) = " + std::to_string(wc.rank_PH) + ", rank(H'PH) = " + std::to_string(wc.rank_HPH));

  const auto fp = feasible_point(s, feasibility_tolerance);
  add("feasibility", fp.feasible ? CheckStatus::Pass : CheckStatus::Fail,
      "least-squares residual " + sci(fp.residual_norm) + " (tolerance " + sci(feasibility_tolerance) + ")");

  if (sc.mode == FlowMode::SaddlePoint && objective_problem.empty()) {
    try {
      const SystemState x0 = initialize(sc);
      bool any_regular = false;
      for (int i = 0; i < sc.graph.agent_count(); ++i) {
        const Eigen::MatrixXd h = hessian(sc.objectives[static_cast<std::size_t>(i)], x0.x.segment(i * sc.n, sc.n));
        if (linalg::numerical_rank(h) == sc.n) any_regular = true;
      }
      if (!any_regular) {
        report.warnings.push_back("every agent's Hessian is singular at x(0); f may not be strictly convex");
      }
    } catch (const Error& e) {
      report.warnings.push_back(std::string("could not evaluate x(0): ") + e.what());
    }
  }
  return report;
}

StackedSystem require_valid(const Scenario& sc) {
  auto report = validate_scenario(sc);
  if (const auto* failure = report.first_failure()) {
    throw Error(ErrorCode::ValidationFailed, failure->name + ": " + failure->evidence);
  }
  return std::move(*report.system);
}

SystemState initialize(const Scenario& sc) {
  const int dim = sc.graph.agent_count() * sc.n;
  SystemState state;
  state.t = 0.0;
  state.lambda = Eigen::VectorXd::Zero(dim);
  if (const auto* e = std::get_if<ExplicitInit>(&sc.init)) {
    if (e->x0.size() != dim) {
      throw Error(ErrorCode::DimensionMismatch, "x0 has " + std::to_string(e->x0.size()) + " entries, expected " +
                                                    std::to_string(dim));
    }
    state.x = e->x0;
    if (e->lambda0) {
      if (e->lambda0->size() != dim) {
        throw Error(ErrorCode::DimensionMismatch, "lambda0 has " + std::to_string(e->lambda0->size()) +
                                                      " entries, expected " + std::to_string(dim));
      }
      state.lambda = *e->lambda0;
    }
    return state;
  }
  const auto& u = std::get<UniformInit>(sc.init);
  if (!(u.low < u.high)) throw Error(ErrorCode::InvalidConfig, "uniform init needs low < high");
  std::mt19937_64 gen(u.seed);
  state.x.resize(dim);
  for (int k = 0; k < dim; ++k) state.x(k) = u.low + (u.high - u.low) * unit_uniform(gen);
  return state;
}

DistributedAssembler::DistributedAssembler(const StackedSystem& system, std::span<const ObjectiveSpec> objectives)
    : DistributedAssembler(system, objectives, [&system] {
        std::vector<std::vector<int>> table;
        for (int i = 0; i < system.agent_count(); ++i) table.push_back(system.graph.neighbors(i));
        return table;
      }()) {}

DistributedAssembler::DistributedAssembler(const StackedSystem& system, std::span<const ObjectiveSpec> objectives,
                                           std::vector<std::vector<int>> neighbor_table)
    : system_(&system), objectives_(objectives.begin(), objectives.end()), table_(std::move(neighbor_table)) {
  const int m = system.agent_count();
  if (static_cast<int>(table_.size()) != m) throw Error(ErrorCode::DimensionMismatch, "neighbor table size != m");
  if (static_cast<int>(objectives_.size()) != m) {
    throw Error(ErrorCode::DimensionMismatch, "need one objective per agent");
  }
  const auto& g = system.graph;
  for (int i = 0; i < m; ++i) {
    std::vector<LocalConstraint> mine;
    const auto all = local_constraints(system, i);
    for (int j : table_[static_cast<std::size_t>(i)]) {
      const auto it = std::find_if(all.begin(), all.end(), [j](const LocalConstraint& c) { return c.j == j; });
      if (it == all.end() || g.find_edge(i, j) < 0) {
        throw Error(ErrorCode::UnexpectedNeighbor,
                    "agent " + std::to_string(i + 1) + " shares no edge with " + std::to_string(j + 1));
      }
      mine.push_back(*it);
    }
    local_.push_back(std::move(mine));
  }
  log_.slices_seen.resize(static_cast<std::size_t>(m));
  log_.calls.assign(static_cast<std::size_t>(m), 0);
}

std::vector<NeighborSample> DistributedAssembler::snapshot(int i, const Eigen::VectorXd& x,
                                                           const Eigen::VectorXd* lambda) {
  const int n = system_->n;
  const auto& slice = table_[static_cast<std::size_t>(i)];
  std::vector<NeighborSample> samples;
  samples.reserve(slice.size());
  for (int j : slice) {
    samples.push_back({j, x.segment(j * n, n), lambda ? Eigen::VectorXd(lambda->segment(j * n, n)) : Eigen::VectorXd()});
  }
  std::vector<int> ids(slice.begin(), slice.end());
  std::sort(ids.begin(), ids.end());
  log_.slices_seen[static_cast<std::size_t>(i)].insert(std::move(ids));
  ++log_.calls[static_cast<std::size_t>(i)];
  return samples;
}

FlowRate DistributedAssembler::saddle(const SystemState& state) {
  const int n = system_->n;
  const int m = system_->agent_count();
  FlowRate out{Eigen::VectorXd(m * n), Eigen::VectorXd(m * n)};
  for (int i = 0; i < m; ++i) {
    const auto samples = snapshot(i, state.x, &state.lambda);
    const auto rate = saddle_rhs_local(i, objectives_[static_cast<std::size_t>(i)], state.x.segment(i * n, n),
                                       state.lambda.segment(i * n, n), samples, local_[static_cast<std::size_t>(i)]);
    out.xdot.segment(i * n, n) = rate.xdot;
    out.lambdadot.segment(i * n, n) = rate.lambdadot;
  }
  return out;
}

Eigen::VectorXd DistributedAssembler::edge_only(const Eigen::VectorXd& x) {
  const int n = system_->n;
  const int m = system_->agent_count();
  Eigen::VectorXd out(m * n);
  for (int i = 0; i < m; ++i) {
    const auto samples = snapshot(i, x, nullptr);
    out.segment(i * n, n) = edge_only_rhs_local(i, x.segment(i * n, n), samples, local_[static_cast<std::size_t>(i)]);
  }
  return out;
}

bool locality_audit(const LocalityLog& log, const Graph& g) {
  if (static_cast<int>(log.slices_seen.size()) != g.agent_count()) return false;
  for (int i = 0; i < g.agent_count(); ++i) {
    const auto& seen = log.slices_seen[static_cast<std::size_t>(i)];
    if (log.calls[static_cast<std::size_t>(i)] == 0) return false;
    if (seen.size() != 1 || *seen.begin() != g.neighbors(i)) return false;
  }
  return true;
}

RateFit fit_exponential_rate(std::span<const double> times, std::span<const double> series, double window) {
  if (times.size() != series.size()) throw Error(ErrorCode::DimensionMismatch, "times and series differ in length");
  if (!(window > 0.0 && window <= 1.0)) throw Error(ErrorCode::InvalidConfig, "window must be in (0, 1]");
  std::size_t usable = 0;
  while (usable < series.size() && series[usable] > kRateFloor && std::isfinite(series[usable])) ++usable;
  if (usable < 10) {
    throw Error(ErrorCode::InsufficientData, std::to_string(usable) + " samples above the floor, need 10");
  }
  const std::size_t count =
      std::min(usable, std::max<std::size_t>(10, static_cast<std::size_t>(std::lround(window * usable))));
  const std::size_t first = (usable - count) / 2;

  // Logs are taken relative to the first sample so a constant series gives exactly zero spread.
  const double y0 = std::log(series[first]);
  double mean_t = 0.0;
  double mean_y = 0.0;
  for (std::size_t k = first; k < first + count; ++k) {
    mean_t += times[k];
    mean_y += std::log(series[k]) - y0;
  }
  mean_t /= static_cast<double>(count);
  mean_y /= static_cast<double>(count);
  double stt = 0.0;
  double sty = 0.0;
  double syy = 0.0;
  for (std::size_t k = first; k < first + count; ++k) {
    const double dt = times[k] - mean_t;
    const double dy = std::log(series[k]) - y0 - mean_y;
    stt += dt * dt;
    sty += dt * dy;
    syy += dy * dy;
  }
  if (stt == 0.0) throw Error(ErrorCode::InsufficientData, "all fitting samples share one time");
  const double slope = sty / stt;
  const double ss_res = std::max(0.0, syy - slope * sty);
  RateFit fit;
  fit.rate = -slope;
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.samples = count;
  return fit;
}

RunResult run(const Scenario& sc) {
  const auto started = std::chrono::steady_clock::now();
  const StackedSystem system = require_valid(sc);
  const SystemState start = initialize(sc);
  const int dim = system.state_dim();
  const bool edge_only = sc.mode == FlowMode::EdgeOnly;

  RunResult result;
  auto& summary = result.summary;
  if (const auto* u = std::get_if<UniformInit>(&sc.init)) summary.seed = u->seed;

  const bool all_zero = std::all_of(sc.objectives.begin(), sc.objectives.end(), is_zero);
  if (!edge_only && !all_zero) {
    try {
      result.reference = solve_reference(system, sc.objectives);
      if (!result.reference->unique) summary.notes.push_back("reference optimum may not be unique; W is relative to it");
    } catch (const Error& e) {
      summary.notes.push_back(std::string("W not recorded: reference solve failed: ") + e.what());
    }
  }

  std::vector<ObjectiveSpec> flow_objectives = sc.objectives;
  if (edge_only) {
    std::fill(flow_objectives.begin(), flow_objectives.end(), ObjectiveSpec{objective::Zero{}});
    if (!all_zero) summary.notes.push_back("edge_only override: objectives ignored by the flow");
  }
  DistributedAssembler assembler(system, flow_objectives);

  OdeRhs rhs;
  Eigen::VectorXd y0;
  if (edge_only) {
    rhs = [&](double, const Eigen::VectorXd& y) { return assembler.edge_only(y); };
    y0 = start.x;
  } else {
    rhs = [&](double, const Eigen::VectorXd& y) {
      const auto rate = assembler.saddle(SystemState{y.head(dim), y.tail(dim), 0.0});
      Eigen::VectorXd d(2 * dim);
      d << rate.xdot, rate.lambdadot;
      return d;
    };
    y0.resize(2 * dim);
    y0 << start.x, start.lambda;
  }

  StopMetricFn stop_metric;
  if (sc.integrator.stop_on) {
    switch (sc.integrator.stop_on->metric) {
      case StopMetric::V:
        stop_metric = [&](double, const Eigen::VectorXd& y) {
          return agreement_error(sc.constraints, y.head(dim), sc.n);
        };
        break;
      case StopMetric::RhsNorm:
        stop_metric = [&](double t, const Eigen::VectorXd& y) { return rhs(t, y).norm(); };
        break;
      case StopMetric::W:
        if (result.reference) {
          stop_metric = [&](double, const Eigen::VectorXd& y) { return distance_to_opt(y.head(dim), *result.reference); };
        } else {
          summary.notes.push_back("stop_on W ignored: no reference solution");
        }
        break;
    }
  }

  const OdeSolution sol = integrate(rhs, y0, sc.integrator, stop_metric);

  auto& traj = result.trajectory;
  traj.times = sol.times;
  if (result.reference) traj.W_series.emplace();
  for (std::size_t k = 0; k < sol.states.size(); ++k) {
    const auto& y = sol.states[k];
    SystemState st;
    st.t = sol.times[k];
    st.x = y.head(dim);
    st.lambda = edge_only ? Eigen::VectorXd(Eigen::VectorXd::Zero(dim)) : Eigen::VectorXd(y.tail(dim));
    traj.V_series.push_back(agreement_error(sc.constraints, st.x, sc.n));
    if (result.reference) traj.W_series->push_back(distance_to_opt(st.x, *result.reference));
    traj.states.push_back(std::move(st));
  }

  summary.final_V = traj.V_series.back();
  if (traj.W_series) summary.final_W = traj.W_series->back();
  summary.final_rhs_norm = rhs(traj.times.back(), sol.states.back()).norm();
  summary.t_final = traj.times.back();
  summary.stopped_early = sol.stopped_early;

  const bool fit_w = !edge_only && traj.W_series.has_value();
  summary.fitted_series = fit_w ? "W" : "V";
  try {
    const auto fit = fit_exponential_rate(traj.times, fit_w ? *traj.W_series : traj.V_series);
    summary.fitted_rate = fit.rate;
    summary.fit_r_squared = fit.r_squared;
  } catch (const Error& e) {
    summary.notes.push_back(std::string("rate not fitted: ") + e.what());
  }

  result.locality = assembler.log();
  summary.locality_ok = locality_audit(result.locality, system.graph);
  summary.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace edgeflow
