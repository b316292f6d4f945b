#include "klmdp/cli/config.hpp"

#include <cstdlib>
#include <limits>

#include "klmdp/world.hpp"

namespace klmdp::cli {

using nlohmann::json;

namespace {

enum class FieldType { Unsigned, Positive, Number, String };

struct Field {
  const char* key;
  FieldType type;
};

constexpr Field kTopFields[] = {
    {"horizon", FieldType::Positive},        {"epsilon", FieldType::Number},
    {"stay_prob", FieldType::Number},        {"delta", FieldType::Number},
    {"home", FieldType::Unsigned},           {"start", FieldType::Unsigned},
    {"runs", FieldType::Positive},           {"pool_size", FieldType::Positive},
    {"base_seed", FieldType::Unsigned},      {"dirichlet_alpha", FieldType::Number},
    {"solver_tolerance", FieldType::Number}, {"output_dir", FieldType::String},
};

constexpr Field kGraphFields[] = {
    {"type", FieldType::String},
    {"rows", FieldType::Positive},
    {"cols", FieldType::Positive},
    {"path", FieldType::String},
};

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

const char* type_name(FieldType type) {
  switch (type) {
    case FieldType::Unsigned:
      return "a nonnegative integer";
    case FieldType::Positive:
      return "a positive integer";
    case FieldType::Number:
      return "a number";
    case FieldType::String:
      return "a string";
  }
  return "?";
}

void check_type(const json& value, FieldType type, const std::string& path) {
  bool ok = false;
  switch (type) {
    case FieldType::Unsigned:
      ok = value.is_number_unsigned() || (value.is_number_integer() && value.get<std::int64_t>() >= 0);
      break;
    case FieldType::Positive:
      ok = (value.is_number_unsigned() || value.is_number_integer()) && value.get<std::int64_t>() > 0;
      break;
    case FieldType::Number:
      ok = value.is_number();
      break;
    case FieldType::String:
      ok = value.is_string();
      break;
  }
  if (!ok) throw ConfigError(path, std::string("expected ") + type_name(type) + ", got " + value.dump());
}

template <std::size_t N>
void check_object(const json& object, const Field (&fields)[N], const std::string& path,
                  const char* nested_key = nullptr) {
  if (!object.is_object()) throw ConfigError(path, "expected an object");
  for (const auto& [key, value] : object.items()) {
    const std::string child = path + "." + key;
    if (nested_key && key == nested_key) continue;
    bool known = false;
    for (const auto& field : fields) {
      if (key == field.key) {
        check_type(value, field.type, child);
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError(child, "unknown field");
  }
}

void require_range(bool ok, const std::string& path, const std::string& message) {
  if (!ok) throw ConfigError(path, message);
}

json parse_env_value(const std::string& name, const std::string& raw, FieldType type) {
  if (type == FieldType::String) return raw;
  try {
    json value = json::parse(raw);
    if (!value.is_number()) throw ConfigError("env." + name, "expected " + std::string(type_name(type)));
    return value;
  } catch (const json::parse_error&) {
    throw ConfigError("env." + name, "cannot parse '" + raw + "' as " + type_name(type));
  }
}

}  // namespace

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    if (const char* value = std::getenv(name.c_str())) return std::string(value);
    return std::nullopt;
  };
}

json apply_env_overrides(json document, const EnvLookup& env) {
  if (document.is_null()) document = json::object();
  for (const auto& field : kTopFields) {
    const std::string name = "KLMDP_" + upper(field.key);
    if (auto raw = env(name)) document[field.key] = parse_env_value(name, *raw, field.type);
  }
  for (const auto& field : kGraphFields) {
    const std::string name = "KLMDP_GRAPH_" + upper(field.key);
    if (auto raw = env(name)) {
      if (!document.contains("graph") || !document["graph"].is_object()) document["graph"] = json::object();
      document["graph"][field.key] = parse_env_value(name, *raw, field.type);
    }
  }
  return document;
}

ExperimentConfig parse_config(const json& document) {
  ExperimentConfig config;
  if (document.is_null()) return config;
  check_object(document, kTopFields, "config", "graph");

  if (document.contains("graph")) {
    const json& graph = document["graph"];
    check_object(graph, kGraphFields, "config.graph");
    const std::string type = graph.value("type", std::string("grid"));
    if (type == "grid") {
      require_range(!graph.contains("path"), "config.graph.path", "not allowed for a grid");
      config.graph.kind = GraphSource::Kind::Grid;
      config.graph.rows = graph.value("rows", config.graph.rows);
      config.graph.cols = graph.value("cols", config.graph.cols);
    } else if (type == "edge_list") {
      require_range(!graph.contains("rows"), "config.graph.rows", "not allowed for an edge list");
      require_range(!graph.contains("cols"), "config.graph.cols", "not allowed for an edge list");
      require_range(graph.contains("path"), "config.graph.path", "required for an edge list");
      config.graph.kind = GraphSource::Kind::EdgeList;
      config.graph.path = graph["path"].get<std::string>();
    } else {
      throw ConfigError("config.graph.type", "expected \"grid\" or \"edge_list\", got \"" + type + "\"");
    }
  }

  config.horizon = document.value("horizon", config.horizon);
  config.epsilon = document.value("epsilon", config.epsilon);
  config.stay_prob = document.value("stay_prob", config.stay_prob);
  config.delta = document.value("delta", config.delta);
  config.home = document.value("home", config.home);
  config.start = document.value("start", config.start);
  config.runs = document.value("runs", config.runs);
  config.pool_size = document.value("pool_size", config.pool_size);
  config.base_seed = document.value("base_seed", config.base_seed);
  config.dirichlet_alpha = document.value("dirichlet_alpha", config.dirichlet_alpha);
  config.solver_tolerance = document.value("solver_tolerance", config.solver_tolerance);
  config.output_dir = document.value("output_dir", config.output_dir);

  require_range(config.epsilon > 0.0 && config.epsilon < 1.0 / 3.0, "config.epsilon", "must lie in (0, 1/3)");
  require_range(config.stay_prob > 0.0 && config.stay_prob < 1.0, "config.stay_prob", "must lie in (0, 1)");
  require_range(config.delta > 0.0 && config.delta < 1.0, "config.delta", "must lie in (0, 1)");
  require_range(config.dirichlet_alpha > 0.0, "config.dirichlet_alpha", "must be positive");
  require_range(config.solver_tolerance > 0.0 && config.solver_tolerance < 1.0, "config.solver_tolerance",
                "must lie in (0, 1)");
  require_range(!config.output_dir.empty(), "config.output_dir", "must not be empty");
  if (config.graph.kind == GraphSource::Kind::Grid) {
    const std::size_t n = config.graph.rows * config.graph.cols;
    require_range(config.home < n, "config.home", "outside the grid");
    require_range(config.start < n, "config.start", "outside the grid");
  }
  return config;
}

json to_json(const ExperimentConfig& config) {
  json graph;
  if (config.graph.kind == GraphSource::Kind::Grid) {
    graph = {{"type", "grid"}, {"rows", config.graph.rows}, {"cols", config.graph.cols}};
  } else {
    graph = {{"type", "edge_list"}, {"path", config.graph.path}};
  }
  return {
      {"graph", graph},
      {"horizon", config.horizon},
      {"epsilon", config.epsilon},
      {"stay_prob", config.stay_prob},
      {"delta", config.delta},
      {"home", config.home},
      {"start", config.start},
      {"runs", config.runs},
      {"pool_size", config.pool_size},
      {"base_seed", config.base_seed},
      {"dirichlet_alpha", config.dirichlet_alpha},
      {"solver_tolerance", config.solver_tolerance},
      {"output_dir", config.output_dir},
  };
}

ExperimentSettings to_settings(const ExperimentConfig& config) {
  ExperimentSettings settings;
  if (config.graph.kind == GraphSource::Kind::Grid) {
    settings.graph = grid_graph(config.graph.rows, config.graph.cols);
  } else {
    settings.graph = load_graph_file(config.graph.path);
  }
  if (config.home >= settings.graph.size()) throw ConfigError("config.home", "vertex not in the graph");
  if (config.start >= settings.graph.size()) throw ConfigError("config.start", "vertex not in the graph");
  settings.stay_prob = config.stay_prob;
  settings.delta = config.delta;
  settings.home = config.home;
  settings.start = config.start;
  settings.horizon = config.horizon;
  settings.epsilon = config.epsilon;
  settings.pool_size = config.pool_size;
  settings.dirichlet_alpha = config.dirichlet_alpha;
  settings.strategy.solver.tolerance = config.solver_tolerance;
  return settings;
}

}  // namespace klmdp::cli
