#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "edgeflow/cli.hpp"
#include "edgeflow/scenario_io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Edge-agreement saddle-point flow simulator"};
  app.set_version_flag("--version", std::string(edgeflow::tool_version()));
  app.require_subcommand(1);

  std::string scenario;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> t_end;

  auto* check = app.add_subcommand("check", "Validate a scenario file");
  check->add_option("file", scenario, "Scenario JSON")->required();

  auto* run = app.add_subcommand("run", "Simulate a scenario and write trajectory.csv and summary.json");
  run->add_option("file", scenario, "Scenario JSON")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--seed", seed, "Override the uniform-init seed");
  run->add_option("--t-end", t_end, "Override the integration horizon");

  auto* reference = app.add_subcommand("reference", "Solve the centralized problem and write reference.json");
  reference->add_option("file", scenario, "Scenario JSON")->required();
  reference->add_option("--out", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : edgeflow::cli::kExitRuntime;
  }

  if (check->parsed()) return edgeflow::cli::cmd_check(scenario, std::cout, std::cerr);
  if (run->parsed()) return edgeflow::cli::cmd_run(scenario, out_dir, {seed, t_end}, std::cout, std::cerr);
  return edgeflow::cli::cmd_reference(scenario, out_dir, std::cout, std::cerr);
}
