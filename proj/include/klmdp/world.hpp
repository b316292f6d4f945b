#pragma once

// Graph worlds for the target-tracking experiment.

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <utility>
#include <vector>

#include "klmdp/chains.hpp"
#include "klmdp/online.hpp"

namespace klmdp {

using Vertex = std::size_t;

/// Connected simple undirected graph.
class Graph {
 public:
  /// Validates: endpoints in range, no self-loops, no duplicate edges, connected.
  Graph(std::size_t n, std::vector<std::pair<Vertex, Vertex>> edges);

  std::size_t size() const noexcept { return adjacency_.size(); }
  const std::vector<std::pair<Vertex, Vertex>>& edges() const noexcept { return edges_; }
  const std::vector<Vertex>& neighbors(Vertex v) const { return adjacency_.at(v); }
  std::size_t degree(Vertex v) const { return neighbors(v).size(); }

 private:
  std::vector<std::pair<Vertex, Vertex>> edges_;
  std::vector<std::vector<Vertex>> adjacency_;
};

/// Parses "u v" lines (0-based, whitespace separated); '#' starts a comment.
/// The vertex count is one more than the largest index. Throws ParseError.
Graph load_graph(std::string_view text);
Graph load_graph_file(const std::filesystem::path& path);

/// rows x cols 4-connected lattice; vertex (r, c) has index r * cols + c.
Graph grid_graph(std::size_t rows, std::size_t cols);

struct DistanceTable {
  std::size_t n = 0;
  /// Row-major n x n hop counts.
  std::vector<std::uint32_t> hops;
  std::uint32_t diameter = 0;

  std::uint32_t operator()(Vertex a, Vertex b) const { return hops[a * n + b]; }
};

DistanceTable bfs_distances(const Graph& graph);

/// Lazy walk P1: stay with stay_prob, else move to a uniform neighbor.
/// An isolated vertex (n = 1) stays with probability 1.
StochasticMatrix lazy_walk(const Graph& graph, double stay_prob);

/// (1 - delta) P1 + delta P0, where P0 jumps to `home` from everywhere.
StochasticMatrix build_passive(const Graph& graph, double stay_prob, double delta, Vertex home);

/// Target moving on the graph by its own random walk. The whole target path
/// is drawn at construction, so the cost sequence is fixed before any agent runs.
class TrackingEnv final : public CostStream {
 public:
  TrackingEnv(Graph graph, StochasticMatrix target_kernel, std::vector<Vertex> target_path);

  CostFunction next() override;

  const Graph& graph() const noexcept { return graph_; }
  const StochasticMatrix& target_kernel() const noexcept { return target_kernel_; }
  const DistanceTable& distances() const noexcept { return distances_; }
  std::uint32_t diameter() const noexcept { return distances_.diameter; }
  const std::vector<Vertex>& target_path() const noexcept { return target_path_; }
  /// Target position for the next call to next().
  Vertex target_state() const;
  std::size_t horizon() const noexcept { return target_path_.size(); }

  /// All horizon costs, in order.
  std::vector<CostFunction> costs() const;

 private:
  Graph graph_;
  StochasticMatrix target_kernel_;
  DistanceTable distances_;
  std::vector<Vertex> target_path_;
  std::size_t cursor_ = 0;
};

/// Samples a target kernel row-wise from Dirichlet(dirichlet_alpha) over each
/// closed neighborhood, a uniform initial target vertex, and a target path of
/// `horizon` positions.
TrackingEnv make_tracking_env(const Graph& graph, std::size_t horizon, std::uint64_t seed,
                              double dirichlet_alpha = 1.0);

/// f(x) = d(x, target) / diameter (all zeros on a one-vertex graph).
CostFunction tracking_cost(const TrackingEnv& env, Vertex target);

}  // namespace klmdp
