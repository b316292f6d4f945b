#pragma once

// The `klmdp` subcommands as callable functions. Each returns the process
// exit code and writes to the given streams.
//
// Exit codes: 0 success, 1 usage or I/O failure, 2 malformed input or config,
// 3 a modelling assumption does not hold, 4 the eigen-solver did not converge.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "klmdp/cli/config.hpp"
#include "klmdp/spectral.hpp"

namespace klmdp::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitParse = 2,
  kExitAssumption = 3,
  kExitConvergence = 4,
};

struct SolveOptions {
  std::filesystem::path passive;
  std::filesystem::path cost;
  std::optional<std::filesystem::path> out_h;
  std::optional<std::filesystem::path> out_kernel;
  SolverSettings settings{};
};

struct TrackOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::optional<std::size_t> workers;
  std::optional<std::string> output_dir;
  EnvLookup env = process_env();
};

enum class PlotSeriesKind { Hindsight, Pool };

struct PlotOptions {
  std::filesystem::path summary;
  std::filesystem::path output;
  PlotSeriesKind series = PlotSeriesKind::Hindsight;
};

int cmd_solve(const SolveOptions& options, std::ostream& out, std::ostream& err);
int cmd_track(const TrackOptions& options, std::ostream& out, std::ostream& err);
int cmd_plot(const PlotOptions& options, std::ostream& out, std::ostream& err);

/// Resolves defaults, file, environment and flags into one configuration.
ExperimentConfig resolve_config(const TrackOptions& options);

/// Parses argv and dispatches to a subcommand.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace klmdp::cli
