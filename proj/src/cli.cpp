#include "edgeflow/cli.hpp"

#include <fstream>
#include <iostream>

#include "edgeflow/error.hpp"
#include "edgeflow/scenario_io.hpp"

namespace edgeflow::cli {

namespace {

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ParseError:
    case ErrorCode::SchemaError:
    case ErrorCode::ValidationFailed:
      return kExitValidation;
    default:
      return kExitRuntime;
  }
}

const char* status_label(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "PASS";
    case CheckStatus::Fail: return "FAIL";
    case CheckStatus::Skipped: return "SKIP";
  }
  return "?";
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return os;
}

void prepare_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
}

}  // namespace

int cmd_check(const std::filesystem::path& scenario, std::ostream& out, std::ostream& err) {
  try {
    const Scenario sc = read_scenario(scenario);
    const auto report = validate_scenario(sc);
    for (const auto& c : report.checks) {
      out << status_label(c.status) << "  " << c.name << ": " << c.evidence << "\n";
    }
    for (const auto& w : report.warnings) out << "WARN  " << w << "\n";
    return report.ok() ? kExitOk : kExitValidation;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ValidationFailed) {
      out << "FAIL  " << e.what() << "\n";
    } else {
      err << "error: " << e.what() << "\n";
    }
    return exit_code_for(e);
  }
}

int cmd_run(const std::filesystem::path& scenario, const std::filesystem::path& out_dir,
            const RunOverrides& overrides, std::ostream& out, std::ostream& err) {
  try {
    Scenario sc = read_scenario(scenario);
    if (overrides.seed) {
      if (auto* u = std::get_if<UniformInit>(&sc.init)) {
        u->seed = *overrides.seed;
      } else {
        err << "warning: --seed ignored for explicit init\n";
      }
    }
    if (overrides.t_end) {
      sc.integrator.t_end = *overrides.t_end;
      sc.integrator.validate();
    }
    const RunResult result = run(sc);
    prepare_dir(out_dir);
    {
      auto csv = open_output(out_dir / "trajectory.csv");
      write_trajectory_csv(csv, result.trajectory, sc.graph.agent_count(), sc.n);
      if (!csv) throw Error(ErrorCode::IoError, "failed writing trajectory.csv");
    }
    {
      auto js = open_output(out_dir / "summary.json");
      js << summary_to_json(result.summary, scenario_hash(sc)).dump(2) << "\n";
      if (!js) throw Error(ErrorCode::IoError, "failed writing summary.json");
    }
    const auto& s = result.summary;
    out << "t_final " << s.t_final << "  final_V " << s.final_V;
    if (s.final_W) out << "  final_W " << *s.final_W;
    out << "  locality " << (s.locality_ok ? "ok" : "VIOLATED") << "\n";
    for (const auto& note : s.notes) out << "note: " << note << "\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

int cmd_reference(const std::filesystem::path& scenario, const std::filesystem::path& out_dir, std::ostream& out,
                  std::ostream& err) {
  try {
    const Scenario sc = read_scenario(scenario);
    const StackedSystem system = require_valid(sc);
    if (sc.mode != FlowMode::SaddlePoint) {
      err << "warning: reference solve on an edge_only scenario\n";
    }
    prepare_dir(out_dir);
    nlohmann::json doc;
    int code = kExitOk;
    try {
      const auto ref = solve_reference(system, sc.objectives);
      doc = reference_to_json(ref);
      out << "kkt_residual " << ref.kkt_residual << "  objective " << ref.objective_value << "\n";
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Unbounded && e.code() != ErrorCode::NoConvergence) throw;
      doc = {{"status", e.code() == ErrorCode::Unbounded ? "unbounded" : "no_convergence"}, {"message", e.what()}};
      err << "error: " << e.what() << "\n";
      code = kExitRuntime;
    }
    auto js = open_output(out_dir / "reference.json");
    js << doc.dump(2) << "\n";
    if (!js) throw Error(ErrorCode::IoError, "failed writing reference.json");
    return code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace edgeflow::cli
