#include "klmdp/cli/commands.hpp"

#include <algorithm>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "klmdp/cli/svg.hpp"
#include "klmdp/csv.hpp"
#include "klmdp/eval.hpp"
#include "klmdp/policy.hpp"

namespace klmdp::cli {

namespace {

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << " (bracket [" << format_number(e.bracket().lower) << ", "
        << format_number(e.bracket().upper) << "] after " << e.iterations() << " iterations)\n";
    return kExitConvergence;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitParse;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const nlohmann::json::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitParse;
  } catch (const AssumptionError& e) {
    err << "assumption violated: " << e.what() << '\n';
    return kExitAssumption;
  } catch (const NotUnichainError& e) {
    err << "assumption violated: " << e.what() << '\n';
    return kExitAssumption;
  } catch (const DimensionError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitAssumption;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitAssumption;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

std::string padded_index(std::size_t i, std::size_t count) {
  const std::size_t width = std::max<std::size_t>(3, std::to_string(count - 1).size());
  return fmt::format("{:0{}}", i, width);
}

std::string format_trace(const RunTrace& trace) {
  std::string text(kTraceHeader);
  text += '\n';
  for (std::size_t t = 0; t < trace.horizon(); ++t) {
    text += fmt::format("{},{},{},{},{},{}\n", t + 1, trace.states[t], format_number(trace.state_costs[t]),
                        format_number(trace.control_costs[t]), format_number(trace.cumulative[t]), trace.phases[t]);
  }
  return text;
}

std::string format_summary(const ExperimentResult& result) {
  std::string text(kSummaryHeader);
  text += '\n';
  const auto& h = result.hindsight;
  for (std::size_t t = 0; t < h.mean.size(); ++t) {
    text += fmt::format("{},{},{},{},{}\n", t + 1, format_number(h.mean[t]), format_number(h.stddev[t]),
                        format_number(result.pool->mean[t]), format_number(result.pool->stddev[t]));
  }
  return text;
}

}  // namespace

int cmd_solve(const SolveOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const StochasticMatrix passive = parse_stochastic_csv(read_text_file(options.passive));
    const CostFunction f = parse_cost_csv(read_text_file(options.cost));
    if (f.size() != passive.size()) {
      throw DimensionError(fmt::format("cost has {} entries but the kernel has {} states", f.size(), passive.size()));
    }
    const MpeSolution solution = solve_mpe(passive, f, options.settings);
    const double span = solution.h.maxCoeff() - solution.h.minCoeff();
    out << "lambda: " << format_number(solution.lambda) << '\n';
    out << "eigenvalue_bracket: [" << format_number(solution.bracket.lower) << ", "
        << format_number(solution.bracket.upper) << "]\n";
    out << "iterations: " << solution.iterations << '\n';
    out << "span_h: " << format_number(span) << '\n';
    out << "acoe_residual: " << format_number(acoe_residual(passive, f, solution)) << '\n';
    if (options.out_h) write_text_file(*options.out_h, format_vector_csv(solution.h));
    if (options.out_kernel) {
      const KlPolicy policy = twisted_kernel(passive, solution.h);
      write_text_file(*options.out_kernel, format_matrix_csv(policy.kernel.rows()));
    }
    return kExitOk;
  });
}

ExperimentConfig resolve_config(const TrackOptions& options) {
  nlohmann::json document = nlohmann::json::object();
  if (options.config) {
    const std::string text = read_text_file(*options.config);
    try {
      document = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(options.config->string() + ": " + e.what(), 0);
    }
  }
  document = apply_env_overrides(std::move(document), options.env);
  if (document.is_object()) {
    if (options.seed) document["base_seed"] = *options.seed;
    if (options.runs) document["runs"] = *options.runs;
    if (options.output_dir) document["output_dir"] = *options.output_dir;
  }
  return parse_config(document);
}

int cmd_track(const TrackOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig config = resolve_config(options);
    const ExperimentSettings settings = to_settings(config);
    const std::size_t workers =
        options.workers.value_or(std::max<std::size_t>(1, std::thread::hardware_concurrency()));
    const ExperimentResult result = monte_carlo(settings, config.runs, config.base_seed, workers);

    const std::filesystem::path dir(config.output_dir);
    std::filesystem::create_directories(dir);
    for (std::size_t i = 0; i < result.runs.size(); ++i) {
      write_text_file(dir / ("trace_run_" + padded_index(i, result.runs.size()) + ".csv"),
                      format_trace(result.runs[i].trace));
    }
    write_text_file(dir / "summary.csv", format_summary(result));
    write_text_file(dir / "config.json", to_json(config).dump(2) + "\n");

    const std::size_t last = config.horizon - 1;
    out << "runs: " << config.runs << ", horizon: " << config.horizon << ", states: " << settings.graph.size()
        << '\n';
    out << "final regret vs best-in-hindsight: " << format_number(result.hindsight.mean[last]) << " +- "
        << format_number(result.hindsight.stddev[last]) << '\n';
    out << "final regret vs sampled-pool-best: " << format_number(result.pool->mean[last]) << " +- "
        << format_number(result.pool->stddev[last]) << '\n';
    out << "wrote " << dir.string() << '\n';
    return kExitOk;
  });
}

int cmd_plot(const PlotOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const SummaryTable table = parse_summary_csv(read_text_file(options.summary));
    PlotSeries series;
    series.t = table.t;
    if (options.series == PlotSeriesKind::Hindsight) {
      series.mean = table.mean_hindsight;
      series.stddev = table.std_hindsight;
      series.label = "Regret vs best-in-hindsight";
    } else {
      series.mean = table.mean_pool;
      series.stddev = table.std_pool;
      series.label = "Regret vs sampled-pool-best";
    }
    write_text_file(options.output, render_regret_svg(series));
    out << "wrote " << options.output.string() << '\n';
    return kExitOk;
  });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"KL-control MDP solver and online tracking experiments", "klmdp"};
  app.require_subcommand(1);

  SolveOptions solve;
  std::string passive_path;
  std::string cost_path;
  std::string out_h;
  std::string out_kernel;
  auto* solve_cmd = app.add_subcommand("solve", "Solve the multiplicative Poisson equation for P and f");
  solve_cmd->add_option("passive", passive_path, "Passive kernel CSV (n x n)")->required();
  solve_cmd->add_option("cost", cost_path, "State cost CSV (n values)")->required();
  solve_cmd->add_option("--out-h", out_h, "Write the relative value function here");
  solve_cmd->add_option("--out-kernel", out_kernel, "Write the optimal controlled kernel here");
  solve_cmd->add_option("--tolerance", solve.settings.tolerance, "Relative eigenvalue bracket width")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  solve_cmd->add_option("--max-iterations", solve.settings.max_iterations, "Power-iteration cap")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  solve_cmd->add_option("--pin", solve.settings.pin_index, "State where h is pinned to 0")->capture_default_str();

  TrackOptions track;
  std::string config_path;
  std::uint64_t seed = 0;
  std::size_t runs = 0;
  std::size_t workers = 0;
  std::string output_dir;
  auto* track_cmd = app.add_subcommand("track", "Run the Monte-Carlo tracking experiment");
  auto* config_opt = track_cmd->add_option("--config", config_path, "JSON configuration file");
  auto* seed_opt = track_cmd->add_option("--seed", seed, "Base seed (overrides base_seed)");
  auto* runs_opt = track_cmd->add_option("--runs", runs, "Number of replications")->check(CLI::PositiveNumber);
  auto* workers_opt =
      track_cmd->add_option("--workers", workers, "Worker threads (default: hardware threads)")->check(CLI::PositiveNumber);
  auto* dir_opt = track_cmd->add_option("--output-dir", output_dir, "Directory for traces and summary");

  PlotOptions plot;
  std::string summary_path;
  std::string svg_path;
  std::string series = "hindsight";
  auto* plot_cmd = app.add_subcommand("plot", "Render summary.csv as an SVG regret plot");
  plot_cmd->add_option("summary", summary_path, "summary.csv written by track")->required();
  plot_cmd->add_option("output", svg_path, "SVG file to write")->required();
  plot_cmd->add_option("--series", series, "Which comparator to plot")
      ->check(CLI::IsMember({"hindsight", "pool"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n' << "run with --help for usage\n";
    return kExitUsage;
  }

  if (solve_cmd->parsed()) {
    solve.passive = passive_path;
    solve.cost = cost_path;
    if (!out_h.empty()) solve.out_h = out_h;
    if (!out_kernel.empty()) solve.out_kernel = out_kernel;
    return cmd_solve(solve, out, err);
  }
  if (track_cmd->parsed()) {
    if (config_opt->count() > 0) track.config = config_path;
    if (seed_opt->count() > 0) track.seed = seed;
    if (runs_opt->count() > 0) track.runs = runs;
    if (workers_opt->count() > 0) track.workers = workers;
    if (dir_opt->count() > 0) track.output_dir = output_dir;
    return cmd_track(track, out, err);
  }
  plot.summary = summary_path;
  plot.output = svg_path;
  plot.series = series == "pool" ? PlotSeriesKind::Pool : PlotSeriesKind::Hindsight;
  return cmd_plot(plot, out, err);
}

}  // namespace klmdp::cli
