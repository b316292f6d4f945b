#pragma once

// Experiment configuration for `klmdp track`.
//
// JSON schema (every field optional; defaults in parentheses):
//
//   {
//     "graph": {"type": "grid", "rows": 10, "cols": 10}     ("grid", 10, 10)
//            | {"type": "edge_list", "path": "terrain.txt"},
//     "horizon": 1000,          "epsilon": 0.05,
//     "stay_prob": 0.01,        "delta": 0.01,
//     "home": 0,                "start": 0,
//     "runs": 100,              "pool_size": 1000,
//     "base_seed": 1,           "dirichlet_alpha": 1.0,
//     "solver_tolerance": 1e-12,
//     "output_dir": "klmdp-out"
//   }
//
// Each field can be overridden by an environment variable KLMDP_<FIELD>, with
// nested graph fields as KLMDP_GRAPH_TYPE, KLMDP_GRAPH_ROWS, KLMDP_GRAPH_COLS
// and KLMDP_GRAPH_PATH. Precedence: defaults < file < environment < flags.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include <json.hpp>

#include "klmdp/error.hpp"
#include "klmdp/eval.hpp"

namespace klmdp::cli {

/// Schema violation; `path()` is the offending field, e.g. "config.graph.rows".
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& message)
      : Error(path + ": " + message), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

struct GraphSource {
  enum class Kind { Grid, EdgeList };
  Kind kind = Kind::Grid;
  std::size_t rows = 10;
  std::size_t cols = 10;
  std::string path;
};

struct ExperimentConfig {
  GraphSource graph;
  std::size_t horizon = 1000;
  double epsilon = 0.05;
  double stay_prob = 0.01;
  double delta = 0.01;
  std::size_t home = 0;
  std::size_t start = 0;
  std::size_t runs = 100;
  std::size_t pool_size = 1000;
  std::uint64_t base_seed = 1;
  double dirichlet_alpha = 1.0;
  double solver_tolerance = 1e-12;
  std::string output_dir = "klmdp-out";
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads the process environment.
EnvLookup process_env();

/// Validates a JSON document against the schema. Unknown keys are errors.
ExperimentConfig parse_config(const nlohmann::json& document);

/// Copies KLMDP_* variables over the document, typed per field.
nlohmann::json apply_env_overrides(nlohmann::json document, const EnvLookup& env);

nlohmann::json to_json(const ExperimentConfig& config);

/// Builds the experiment; loads the edge list when the graph comes from a file.
ExperimentSettings to_settings(const ExperimentConfig& config);

}  // namespace klmdp::cli
