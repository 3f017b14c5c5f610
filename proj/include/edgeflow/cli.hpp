#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

namespace edgeflow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

// Prints one line per validation check with its evidence.
int cmd_check(const std::filesystem::path& scenario, std::ostream& out, std::ostream& err);

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> t_end;
};

// Writes trajectory.csv and summary.json into out_dir.
int cmd_run(const std::filesystem::path& scenario, const std::filesystem::path& out_dir,
            const RunOverrides& overrides, std::ostream& out, std::ostream& err);

// Writes reference.json into out_dir. Failed solves still write the file,
// with status "unbounded" or "no_convergence".
int cmd_reference(const std::filesystem::path& scenario, const std::filesystem::path& out_dir, std::ostream& out,
                  std::ostream& err);

}  // namespace edgeflow::cli
