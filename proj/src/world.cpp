#include "klmdp/world.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>

namespace klmdp {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_vertex(std::string_view token, Vertex& out) {
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

}  // namespace

Graph::Graph(std::size_t n, std::vector<std::pair<Vertex, Vertex>> edges)
    : edges_(std::move(edges)), adjacency_(n) {
  if (n == 0) throw ValidationError("graph must have at least one vertex");
  std::set<std::pair<Vertex, Vertex>> seen;
  for (const auto& [u, v] : edges_) {
    if (u >= n || v >= n) throw ValidationError("edge endpoint out of range");
    if (u == v) throw ValidationError("self-loop at vertex " + std::to_string(u));
    if (!seen.emplace(std::min(u, v), std::max(u, v)).second) {
      throw ValidationError("duplicate edge " + std::to_string(u) + " " + std::to_string(v));
    }
    adjacency_[u].push_back(v);
    adjacency_[v].push_back(u);
  }
  for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());

  std::vector<char> reached(n, 0);
  std::vector<Vertex> todo{0};
  reached[0] = 1;
  std::size_t count = 1;
  while (!todo.empty()) {
    const Vertex v = todo.back();
    todo.pop_back();
    for (Vertex w : adjacency_[v]) {
      if (!reached[w]) {
        reached[w] = 1;
        ++count;
        todo.push_back(w);
      }
    }
  }
  if (count != n) throw ValidationError("graph is disconnected");
}

Graph load_graph(std::string_view text) {
  std::vector<std::pair<Vertex, Vertex>> edges;
  std::set<std::pair<Vertex, Vertex>> seen;
  Vertex largest = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    const auto raw = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;

    const auto line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto tokens = split_ws(line);
    Vertex u = 0;
    Vertex v = 0;
    if (tokens.size() != 2 || !parse_vertex(tokens[0], u) || !parse_vertex(tokens[1], v)) {
      throw ParseError("expected two vertex indices", line_no);
    }
    if (u == v) throw ParseError("self-loop at vertex " + std::to_string(u), line_no);
    if (!seen.emplace(std::min(u, v), std::max(u, v)).second) {
      throw ParseError("duplicate edge " + std::to_string(u) + " " + std::to_string(v), line_no);
    }
    largest = std::max({largest, u, v});
    edges.emplace_back(u, v);
  }
  if (edges.empty()) throw ParseError("edge list contains no edges", 0);
  try {
    return Graph(largest + 1, std::move(edges));
  } catch (const ValidationError& e) {
    throw ParseError(e.what(), 0);
  }
}

Graph load_graph_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open edge list " + path.string(), 0);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_graph(buffer.str());
}

Graph grid_graph(std::size_t rows, std::size_t cols) {
  if (rows < 1 || cols < 1) throw ValidationError("grid dimensions must be positive");
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const Vertex v = r * cols + c;
      if (c + 1 < cols) edges.emplace_back(v, v + 1);
      if (r + 1 < rows) edges.emplace_back(v, v + cols);
    }
  }
  return Graph(rows * cols, std::move(edges));
}

DistanceTable bfs_distances(const Graph& graph) {
  const std::size_t n = graph.size();
  constexpr auto kUnseen = static_cast<std::uint32_t>(-1);
  DistanceTable table;
  table.n = n;
  table.hops.assign(n * n, kUnseen);
  std::queue<Vertex> frontier;
  for (Vertex source = 0; source < n; ++source) {
    std::uint32_t* row = &table.hops[source * n];
    row[source] = 0;
    frontier.push(source);
    while (!frontier.empty()) {
      const Vertex v = frontier.front();
      frontier.pop();
      for (Vertex w : graph.neighbors(v)) {
        if (row[w] == kUnseen) {
          row[w] = row[v] + 1;
          frontier.push(w);
        }
      }
    }
  }
  table.diameter = *std::max_element(table.hops.begin(), table.hops.end());
  return table;
}

StochasticMatrix lazy_walk(const Graph& graph, double stay_prob) {
  if (!(stay_prob > 0.0 && stay_prob < 1.0)) throw ValidationError("stay probability must lie in (0, 1)");
  const auto n = static_cast<Eigen::Index>(graph.size());
  Matrix rows = Matrix::Zero(n, n);
  for (Vertex x = 0; x < graph.size(); ++x) {
    const auto& nbrs = graph.neighbors(x);
    const auto i = static_cast<Eigen::Index>(x);
    if (nbrs.empty()) {
      rows(i, i) = 1.0;
      continue;
    }
    rows(i, i) = stay_prob;
    const double move = (1.0 - stay_prob) / static_cast<double>(nbrs.size());
    for (Vertex y : nbrs) rows(i, static_cast<Eigen::Index>(y)) = move;
  }
  return StochasticMatrix(std::move(rows));
}

StochasticMatrix build_passive(const Graph& graph, double stay_prob, double delta, Vertex home) {
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
  if (home >= graph.size()) throw ValidationError("home vertex out of range");
  Matrix rows = (1.0 - delta) * lazy_walk(graph, stay_prob).rows();
  rows.col(static_cast<Eigen::Index>(home)).array() += delta;
  return StochasticMatrix(std::move(rows));
}

// ---------------------------------------------------------------------------

TrackingEnv::TrackingEnv(Graph graph, StochasticMatrix target_kernel, std::vector<Vertex> target_path)
    : graph_(std::move(graph)),
      target_kernel_(std::move(target_kernel)),
      distances_(bfs_distances(graph_)),
      target_path_(std::move(target_path)) {
  if (target_kernel_.size() != graph_.size()) throw DimensionError("target kernel and graph sizes differ");
  for (Vertex s : target_path_) {
    if (s >= graph_.size()) throw DimensionError("target path leaves the graph");
  }
}

Vertex TrackingEnv::target_state() const {
  if (cursor_ >= target_path_.size()) throw Error("target path exhausted");
  return target_path_[cursor_];
}

CostFunction TrackingEnv::next() {
  const Vertex s = target_state();
  ++cursor_;
  return tracking_cost(*this, s);
}

std::vector<CostFunction> TrackingEnv::costs() const {
  std::vector<CostFunction> out;
  out.reserve(target_path_.size());
  for (Vertex s : target_path_) out.push_back(tracking_cost(*this, s));
  return out;
}

TrackingEnv make_tracking_env(const Graph& graph, std::size_t horizon, std::uint64_t seed, double dirichlet_alpha) {
  if (!(dirichlet_alpha > 0.0)) throw ValidationError("Dirichlet parameter must be positive");
  const std::size_t n = graph.size();
  Rng rng(seed);

  Matrix rows = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<double> weights;
  for (Vertex x = 0; x < n; ++x) {
    std::vector<Vertex> closed = graph.neighbors(x);
    closed.push_back(x);
    std::sort(closed.begin(), closed.end());
    weights.assign(closed.size(), 0.0);
    sample_dirichlet(dirichlet_alpha, weights, rng);
    for (std::size_t k = 0; k < closed.size(); ++k) {
      rows(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(closed[k])) = weights[k];
    }
  }
  StochasticMatrix kernel(std::move(rows));

  std::vector<Vertex> path;
  path.reserve(horizon);
  if (horizon > 0) {
    auto start = static_cast<Vertex>(uniform01(rng) * static_cast<double>(n));
    path.push_back(std::min(start, n - 1));
    const TransitionSampler sampler(kernel);
    while (path.size() < horizon) path.push_back(sampler.next(path.back(), rng));
  }
  return TrackingEnv(graph, std::move(kernel), std::move(path));
}

CostFunction tracking_cost(const TrackingEnv& env, Vertex target) {
  const std::size_t n = env.graph().size();
  if (target >= n) throw DimensionError("target vertex out of range");
  Vector values = Vector::Zero(static_cast<Eigen::Index>(n));
  const auto diameter = static_cast<double>(env.diameter());
  if (diameter > 0.0) {
    for (Vertex x = 0; x < n; ++x) {
      values[static_cast<Eigen::Index>(x)] = static_cast<double>(env.distances()(x, target)) / diameter;
    }
  }
  return CostFunction(std::move(values));
}

}  // namespace klmdp
