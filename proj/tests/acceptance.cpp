// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "support.hpp"

using namespace edgeflow;
using namespace edgeflow::testing;

namespace {

constexpr std::uint64_t kSeeds[] = {1, 2, 3, 4, 5};

struct Outcome {
  bool pass = true;
  std::string evidence;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      evidence = what;
    }
  }
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

struct TimedRun {
  RunResult result;
  double seconds = 0.0;
};

TimedRun timed_run(const Scenario& sc) {
  const auto start = std::chrono::steady_clock::now();
  TimedRun out{run(sc), 0.0};
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

Scenario with_seed(Scenario sc, std::uint64_t seed) {
  std::get<UniformInit>(sc.init).seed = seed;
  return sc;
}

// Smallest eigenvalue of M above the numerical-zero threshold.
double smallest_positive_eigenvalue(const Eigen::MatrixXd& m) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  const double top = eig.eigenvalues().cwiseAbs().maxCoeff();
  const double floor = static_cast<double>(m.rows()) * 1e-12 * std::max(1.0, top);
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k) {
    if (eig.eigenvalues()(k) > floor) best = std::min(best, eig.eigenvalues()(k));
  }
  return best;
}

// Flips the orientation of edges (3,1) and (3,4), mirroring their constraints.
Scenario reoriented(const Scenario& sc) {
  std::vector<std::pair<int, int>> pairs;
  std::vector<EdgeConstraint> cons;
  for (const auto& c : sc.constraints) {
    const bool flip = (c.i == 2 && c.j == 0) || (c.i == 2 && c.j == 3);
    const EdgeConstraint e = flip ? mirror(c) : c;
    pairs.emplace_back(e.i + 1, e.j + 1);
    cons.push_back(e);
  }
  Scenario out = sc;
  out.graph = build_graph(sc.graph.agent_count(), pairs);
  out.constraints = cons;
  return out;
}

std::vector<TimedRun> g_audited_runs;

Outcome criterion1() {
  Outcome o;
  const auto base = formation_edge_only();
  const double lambda_plus = smallest_positive_eigenvalue(error_matrix(system_of(base)));
  const double expected = 2.0 * lambda_plus;
  double worst_v = 0.0, worst_r2 = 1.0, worst_dev = 0.0, worst_time = 0.0;
  for (auto seed : kSeeds) {
    auto tr = timed_run(with_seed(base, seed));
    const auto& t = tr.result.trajectory;
    const auto fit = fit_exponential_rate(t.times, t.V_series);
    worst_v = std::max(worst_v, tr.result.summary.final_V);
    worst_r2 = std::min(worst_r2, fit.r_squared);
    worst_dev = std::max(worst_dev, std::abs(fit.rate - expected) / expected);
    worst_time = std::max(worst_time, tr.seconds);
    o.require(t.times.back() == 50.0, "run ended before t = 50");
    g_audited_runs.push_back(std::move(tr));
  }
  o.require(worst_v <= 1e-10, fmt("final_V %.3e > 1e-10", worst_v));
  o.require(worst_r2 >= 0.99, fmt("r^2 %.6f < 0.99", worst_r2));
  o.require(worst_dev <= 0.2, fmt("rate off 2*lambda_+ by %.1f%%", 100 * worst_dev));
  o.require(worst_time <= 5.0, fmt("run took %.2f s", worst_time));
  if (o.pass) {
    o.evidence = fmt("max final_V %.2e, min r^2 %.6f, ", worst_v, worst_r2) +
                 fmt("2*lambda_+ = %.4f, max rate deviation %.3f%%, ", expected, 100 * worst_dev) +
                 fmt("max %.3f s/run", worst_time);
  }
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto base = formation_with_objectives();
  const auto s = system_of(base);
  const auto ref = solve_reference(s, base.objectives);
  const double v_star = agreement_error(base.constraints, ref.x_star, base.n);
  o.require(ref.kkt_residual <= 1e-9, fmt("kkt_residual %.3e > 1e-9", ref.kkt_residual));
  o.require(v_star <= 1e-10, fmt("V(x*) %.3e > 1e-10", v_star));
  double worst_w = 0.0, worst_drop = 0.0, worst_eq = 0.0, worst_time = 0.0;
  for (auto seed : kSeeds) {
    auto tr = timed_run(with_seed(base, seed));
    const auto& t = tr.result.trajectory;
    const auto& w = *t.W_series;
    worst_w = std::max(worst_w, *tr.result.summary.final_W);
    worst_drop = std::max(worst_drop, w.back() / w.front());
    const auto& last = t.states.back();
    const auto eq = equilibrium_residual(s, base.objectives, last.x, last.lambda);
    worst_eq = std::max({worst_eq, eq.primal, eq.stationarity});
    worst_time = std::max(worst_time, tr.seconds);
    o.require((tr.result.reference->x_star - ref.x_star).norm() <= 1e-9, "run used a different x*");
    g_audited_runs.push_back(std::move(tr));
  }
  o.require(worst_w <= 1e-6, fmt("final_W %.3e > 1e-6", worst_w));
  o.require(worst_drop < 1e-6, fmt("W(t_end)/W(0) = %.3e", worst_drop));
  o.require(worst_eq <= 1e-6, fmt("equilibrium residual %.3e > 1e-6", worst_eq));
  o.require(worst_time <= 10.0, fmt("run took %.2f s", worst_time));
  if (o.pass) {
    o.evidence = fmt("max final_W %.2e, max W(t_end)/W(0) %.2e, ", worst_w, worst_drop) +
                 fmt("kkt %.2e, V(x*) %.2e, ", ref.kkt_residual, v_star) +
                 fmt("max equilibrium residual %.2e, max %.3f s/run", worst_eq, worst_time);
  }
  return o;
}

Outcome criterion3() {
  Outcome o;
  double worst = 0.0;
  std::mt19937_64 rng(3);
  for (const Scenario& sc : {formation_edge_only(), formation_with_objectives()}) {
    const auto s = system_of(sc);
    DistributedAssembler assembler(s, sc.objectives);
    for (int k = 0; k < 100; ++k) {
      const SystemState st{random_vector(rng, 8, -10, 10), random_vector(rng, 8, -10, 10), 0.0};
      const auto local = assembler.saddle(st);
      const auto compact = saddle_rhs_compact(s, sc.objectives, st);
      worst = std::max({worst, (local.xdot - compact.xdot).cwiseAbs().maxCoeff(),
                        (local.lambdadot - compact.lambdadot).cwiseAbs().maxCoeff(),
                        (assembler.edge_only(st.x) - edge_only_rhs_compact(s, st.x)).cwiseAbs().maxCoeff()});
    }
    o.require(locality_audit(assembler.log(), s.graph), "audit failed on the random-state assembler");
  }
  o.require(worst <= 1e-12, fmt("local vs compact %.3e > 1e-12", worst));
  std::size_t audited = 0;
  for (const auto& tr : g_audited_runs) {
    o.require(tr.result.summary.locality_ok, "locality audit failed on an acceptance run");
    ++audited;
  }
  o.require(audited > 0, "no acceptance runs to audit");
  if (o.pass) o.evidence = fmt("max |local - compact| %.2e over 400 evaluations, audit ok on %.0f runs", worst, audited);
  return o;
}

Outcome criterion4() {
  Outcome o;
  std::mt19937_64 rng(4);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const int n = 1 + static_cast<int>(rng() % 5);
    const int d = 1 + static_cast<int>(rng() % static_cast<unsigned>(n));
    const Eigen::MatrixXd a = random_full_row_rank(rng, d, n);
    const auto pc = project_constraint(EdgeConstraint{0, 1, a, random_vector(rng, d)});
    worst = std::max({worst, (pc.P * pc.P - pc.P).cwiseAbs().maxCoeff(),
                      (pc.P.transpose() - pc.P).cwiseAbs().maxCoeff(), (pc.P * pc.b_bar - pc.b_bar).cwiseAbs().maxCoeff()});
  }
  o.require(worst <= 1e-12, fmt("projection identity off by %.3e", worst));
  if (o.pass) o.evidence = fmt("200 random A, max deviation %.2e", worst);
  return o;
}

Outcome criterion5() {
  Outcome o;
  auto sc = formation_edge_only();
  sc.integrator.rtol = 1e-10;
  sc.integrator.atol = 1e-12;
  sc.integrator.record_every = 1e-4;
  sc.integrator.t_end = 2.0;
  const auto s = system_of(sc);
  const auto result = run(sc);
  std::vector<Eigen::VectorXd> xs;
  for (const auto& st : result.trajectory.states) xs.push_back(st.x);
  const double dev = error_dynamics_check(s, result.trajectory.times, xs);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(error_matrix(s));
  const double low = eig.eigenvalues().minCoeff();
  o.require(dev <= 1e-5, fmt("|de/dt + M e| = %.3e > 1e-5", dev));
  o.require(low >= -1e-10, fmt("min eigenvalue of M %.3e", low));
  if (o.pass) o.evidence = fmt("max |de/dt + M e| %.2e, min eig(M) %.2e", dev, low);
  return o;
}

Outcome criterion6() {
  Outcome o;
  double worst = 0.0;
  for (const Scenario& sc : {formation_edge_only(), formation_with_objectives()}) {
    const auto a = run(sc);
    const auto b = run(reoriented(sc));
    o.require(a.trajectory.times == b.trajectory.times, "recording times differ");
    if (!o.pass) break;
    for (std::size_t k = 0; k < a.trajectory.states.size(); ++k) {
      worst = std::max(worst, (a.trajectory.states[k].x - b.trajectory.states[k].x).cwiseAbs().maxCoeff());
    }
  }
  o.require(worst <= 1e-8, fmt("trajectories differ by %.3e", worst));
  if (o.pass) o.evidence = fmt("max x difference %.2e over both scenarios", worst);
  return o;
}

Outcome criterion7() {
  Outcome o;
  std::mt19937_64 rng(7);
  double worst_ref = 0.0;
  for (int k = 0; k < 50; ++k) {
    const int m = 2 + static_cast<int>(rng() % 5);
    const int n = 1 + static_cast<int>(rng() % 3);
    const Graph g = random_connected_graph(rng, m);
    const auto s = stack(g, consistent_constraints(rng, g, n, random_vector(rng, m * n)), n);
    const auto f = random_strict_quadratics(rng, m, n);
    const auto direct = solve_quadratic_kkt(s, f);
    const auto alm = solve_general(s, f, feasible_point(s).x);
    worst_ref = std::max(worst_ref, (direct.x_star - alm.x_star).cwiseAbs().maxCoeff());
  }

  double worst_fd = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const Eigen::MatrixXd b = random_matrix(rng, n, n);
    const std::vector<ObjectiveSpec> variants{objective::Zero{}, objective::SquaredDistance{random_vector(rng, n), 2.0},
                                              objective::Quadratic{b * b.transpose(), random_vector(rng, n), 1.0},
                                              objective::ExpSum{}};
    for (const auto& spec : variants) worst_fd = std::max(worst_fd, fd_check(spec, random_vector(rng, n)));
  }

  double worst_ode = 0.0;
  for (int k = 0; k < 20; ++k) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const Eigen::MatrixXd b = random_matrix(rng, n, n);
    const Eigen::MatrixXd a = -(b * b.transpose() + 0.05 * Eigen::MatrixXd::Identity(n, n));
    const Eigen::VectorXd y0 = random_vector(rng, n);
    IntegratorConfig c;
    c.rtol = 1e-10;
    c.atol = 1e-12;
    c.t_end = 5.0;
    c.record_every = 0.5;
    const auto sol = integrate([&](double, const Eigen::VectorXd& y) -> Eigen::VectorXd { return a * y; }, y0, c);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
    for (std::size_t r = 0; r < sol.times.size(); ++r) {
      const Eigen::VectorXd exact = eig.eigenvectors() *
                                    (eig.eigenvalues().array() * sol.times[r]).exp().matrix().asDiagonal() *
                                    eig.eigenvectors().transpose() * y0;
      worst_ode = std::max(worst_ode, (sol.states[r] - exact).cwiseAbs().maxCoeff());
    }
  }
  o.require(worst_ref <= 1e-6, fmt("solve_general vs KKT %.3e > 1e-6", worst_ref));
  o.require(worst_fd <= 1e-6, fmt("gradient check %.3e > 1e-6", worst_fd));
  o.require(worst_ode <= 1e-7, fmt("integrator vs expm %.3e > 1e-7", worst_ode));
  if (o.pass) {
    o.evidence = fmt("ALM vs KKT %.2e (50 problems), fd %.2e (400 checks), expm %.2e (20 systems)", worst_ref, worst_fd,
                     worst_ode);
  }
  return o;
}

Outcome criterion8() {
  Outcome o;
  auto tr = timed_run(read_scenario(scenario_path("fixtures/consensus_path.json")));
  const Eigen::VectorXd& x = tr.result.trajectory.states.back().x;
  const double gap = x.maxCoeff() - x.minCoeff();
  o.require(tr.result.trajectory.times.back() == 50.0, "run ended before t = 50");
  o.require(gap <= 1e-9, fmt("max pairwise gap %.3e > 1e-9", gap));
  if (o.pass) o.evidence = fmt("max pairwise gap %.2e at t = 50, common value %.6f", gap, x.mean());
  g_audited_runs.push_back(std::move(tr));
  return o;
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    Outcome (*fn)();
  };
  // Criterion 3 audits the runs from 1, 2 and 8, so those go first.
  const Entry entries[] = {{"edge-only formation reproduction", criterion1},
                           {"saddle-point formation reproduction", criterion2},
                           {"consensus on a path", criterion8},
                           {"distributed assembly and locality", criterion3},
                           {"projection algebra", criterion4},
                           {"error dynamics", criterion5},
                           {"reorientation invariance", criterion6},
                           {"oracle cross-checks", criterion7}};
  const int number[] = {1, 2, 8, 3, 4, 5, 6, 7};
  std::vector<std::string> lines(8);
  bool all = true;
  for (int k = 0; k < 8; ++k) {
    Outcome o;
    try {
      o = entries[k].fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.evidence = std::string("exception: ") + e.what();
    }
    all = all && o.pass;
    lines[static_cast<std::size_t>(number[k] - 1)] = std::string(o.pass ? "PASS" : "FAIL") + "  [" +
                                                      std::to_string(number[k]) + "] " + entries[k].name + ": " +
                                                      o.evidence;
  }
  for (const auto& line : lines) std::printf("%s\n", line.c_str());
  std::printf("%s\n", all ? "acceptance: all criteria passed" : "acceptance: FAILED");
  return all ? 0 : 1;
}
