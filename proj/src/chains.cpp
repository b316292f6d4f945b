#include "klmdp/chains.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <queue>
#include <unordered_set>

namespace klmdp {

namespace {

Eigen::Index as_index(std::size_t i) { return static_cast<Eigen::Index>(i); }

void check_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                         std::to_string(b) + ")");
  }
}

using Adjacency = std::vector<std::vector<StateIndex>>;

Adjacency positive_digraph(const StochasticMatrix& p) {
  const std::size_t n = p.size();
  Adjacency adj(n);
  for (StateIndex x = 0; x < n; ++x) {
    const auto row = p.row(x);
    for (StateIndex y = 0; y < n; ++y) {
      if (row[y] > 0.0) adj[x].push_back(y);
    }
  }
  return adj;
}

// Kosaraju, iterative. Returns component id per vertex and the component count.
std::pair<std::vector<std::size_t>, std::size_t> strong_components(const Adjacency& adj) {
  const std::size_t n = adj.size();
  Adjacency radj(n);
  for (StateIndex x = 0; x < n; ++x) {
    for (StateIndex y : adj[x]) radj[y].push_back(x);
  }

  std::vector<StateIndex> order;
  order.reserve(n);
  std::vector<char> seen(n, 0);
  std::vector<std::pair<StateIndex, std::size_t>> stack;
  for (StateIndex s = 0; s < n; ++s) {
    if (seen[s]) continue;
    seen[s] = 1;
    stack.emplace_back(s, 0);
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next < adj[v].size()) {
        const StateIndex w = adj[v][next++];
        if (!seen[w]) {
          seen[w] = 1;
          stack.emplace_back(w, 0);
        }
      } else {
        order.push_back(v);
        stack.pop_back();
      }
    }
  }

  constexpr std::size_t kUnassigned = static_cast<std::size_t>(-1);
  std::vector<std::size_t> comp(n, kUnassigned);
  std::size_t count = 0;
  std::vector<StateIndex> todo;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (comp[*it] != kUnassigned) continue;
    comp[*it] = count;
    todo.push_back(*it);
    while (!todo.empty()) {
      const StateIndex v = todo.back();
      todo.pop_back();
      for (StateIndex w : radj[v]) {
        if (comp[w] == kUnassigned) {
          comp[w] = count;
          todo.push_back(w);
        }
      }
    }
    ++count;
  }
  return {comp, count};
}

// Period of every strongly connected component: gcd over intra-component edges
// u -> v of level(u) + 1 - level(v), with BFS levels from a component root.
// A component without internal edges has no cycles and gets period 0.
std::vector<std::size_t> component_periods(const Adjacency& adj, const std::vector<std::size_t>& comp,
                                           std::size_t count) {
  const std::size_t n = adj.size();
  constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> level(n, kUnvisited);
  std::vector<std::size_t> period(count, 0);
  for (StateIndex root = 0; root < n; ++root) {
    if (level[root] != kUnvisited) continue;
    const std::size_t c = comp[root];
    level[root] = 0;
    std::queue<StateIndex> frontier;
    frontier.push(root);
    while (!frontier.empty()) {
      const StateIndex u = frontier.front();
      frontier.pop();
      for (StateIndex v : adj[u]) {
        if (comp[v] != c) continue;
        if (level[v] == kUnvisited) {
          level[v] = level[u] + 1;
          frontier.push(v);
        } else {
          const auto diff = static_cast<std::int64_t>(level[u]) + 1 - static_cast<std::int64_t>(level[v]);
          period[c] = std::gcd(period[c], static_cast<std::size_t>(diff < 0 ? -diff : diff));
        }
      }
    }
  }
  return period;
}

// Boolean n x n matrix stored as rows of 64-bit words.
class BitMatrix {
 public:
  explicit BitMatrix(std::size_t n) : n_(n), words_((n + 63) / 64), bits_(n * words_, 0) {}

  void set(std::size_t i, std::size_t j) { bits_[i * words_ + j / 64] |= std::uint64_t{1} << (j % 64); }
  bool get(std::size_t i, std::size_t j) const { return (bits_[i * words_ + j / 64] >> (j % 64)) & 1U; }

  BitMatrix times(const BitMatrix& other) const {
    BitMatrix out(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      std::uint64_t* dst = &out.bits_[i * words_];
      for (std::size_t j = 0; j < n_; ++j) {
        if (!get(i, j)) continue;
        const std::uint64_t* src = &other.bits_[j * words_];
        for (std::size_t w = 0; w < words_; ++w) dst[w] |= src[w];
      }
    }
    return out;
  }

  bool all_set() const {
    const std::size_t tail = n_ % 64;
    const std::uint64_t last_mask = tail == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << tail) - 1;
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t w = 0; w < words_; ++w) {
        const std::uint64_t mask = (w + 1 == words_) ? last_mask : ~std::uint64_t{0};
        if ((bits_[i * words_ + w] & mask) != mask) return false;
      }
    }
    return true;
  }

 private:
  std::size_t n_;
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
};

}  // namespace

// ---------------------------------------------------------------------------

StateSpace::StateSpace(std::size_t n) : n_(n) {
  if (n == 0) throw ValidationError("state space must have at least one state");
}

StateSpace::StateSpace(std::vector<std::string> labels) : n_(labels.size()), labels_(std::move(labels)) {
  if (n_ == 0) throw ValidationError("state space must have at least one state");
  std::unordered_set<std::string> unique(labels_.begin(), labels_.end());
  if (unique.size() != labels_.size()) throw ValidationError("state labels must be unique");
}

Distribution::Distribution(Vector weights) : weights_(std::move(weights)) {
  if (weights_.size() == 0) throw ValidationError("distribution must be nonempty");
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    if (!std::isfinite(weights_[i]) || weights_[i] < 0.0) {
      throw ValidationError("distribution weight " + std::to_string(i) + " is negative or not finite");
    }
  }
  if (std::abs(weights_.sum() - 1.0) > kMassTolerance) {
    throw ValidationError("distribution weights do not sum to 1");
  }
}

Distribution Distribution::normalized(Vector weights) {
  const double total = weights.sum();
  if (!(total > 0.0) || !std::isfinite(total) || (weights.array() < 0.0).any()) {
    throw ValidationError("cannot normalize weights without positive finite mass");
  }
  return Distribution(weights / total);
}

Distribution Distribution::point_mass(std::size_t n, StateIndex x) {
  if (x >= n) throw DimensionError("point mass index out of range");
  Vector w = Vector::Zero(as_index(n));
  w[as_index(x)] = 1.0;
  return Distribution(std::move(w));
}

Distribution Distribution::uniform(std::size_t n) {
  if (n == 0) throw ValidationError("distribution must be nonempty");
  return Distribution(Vector::Constant(as_index(n), 1.0 / static_cast<double>(n)));
}

StochasticMatrix::StochasticMatrix(Matrix rows) : rows_(std::move(rows)) {
  if (rows_.rows() == 0 || rows_.rows() != rows_.cols()) {
    throw ValidationError("stochastic matrix must be square and nonempty");
  }
  for (Eigen::Index x = 0; x < rows_.rows(); ++x) {
    double total = 0.0;
    for (Eigen::Index y = 0; y < rows_.cols(); ++y) {
      const double v = rows_(x, y);
      if (!std::isfinite(v) || v < 0.0) {
        throw ValidationError("entry (" + std::to_string(x) + ", " + std::to_string(y) +
                              ") is negative or not finite");
      }
      total += v;
    }
    if (std::abs(total - 1.0) > kMassTolerance) {
      throw ValidationError("row " + std::to_string(x) + " sums to " + std::to_string(total) + ", not 1");
    }
  }
}

StochasticMatrix StochasticMatrix::renormalized(Matrix rows) {
  for (Eigen::Index x = 0; x < rows.rows(); ++x) {
    const double total = rows.row(x).sum();
    if (!(total > 0.0) || !std::isfinite(total)) {
      throw ValidationError("row " + std::to_string(x) + " has no positive mass");
    }
    rows.row(x) /= total;
  }
  return StochasticMatrix(std::move(rows));
}

StochasticMatrix StochasticMatrix::identity(std::size_t n) {
  return StochasticMatrix(Matrix::Identity(as_index(n), as_index(n)));
}

std::span<const double> StochasticMatrix::row(StateIndex x) const {
  if (x >= size()) throw DimensionError("row index out of range");
  return {rows_.data() + x * size(), size()};
}

Distribution StochasticMatrix::propagate(const Distribution& mu) const {
  check_same_size(mu.size(), size(), "propagate");
  Vector next = rows_.transpose() * mu.weights();
  return Distribution::normalized(next.cwiseMax(0.0));
}

CostFunction::CostFunction(Vector values) : values_(std::move(values)) {
  if (values_.size() == 0) throw ValidationError("cost function must be nonempty");
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]) || values_[i] < 0.0) {
      throw ValidationError("cost at state " + std::to_string(i) + " is negative or not finite");
    }
  }
}

// ---------------------------------------------------------------------------

double total_variation(std::span<const double> mu, std::span<const double> nu) {
  check_same_size(mu.size(), nu.size(), "total_variation");
  double acc = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) acc += std::abs(mu[i] - nu[i]);
  return acc;
}

double total_variation(const Distribution& mu, const Distribution& nu) {
  return total_variation(mu.span(), nu.span());
}

double kl_divergence(std::span<const double> mu, std::span<const double> nu) {
  check_same_size(mu.size(), nu.size(), "kl_divergence");
  double acc = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] <= 0.0) continue;  // 0 log 0 = 0
    if (nu[i] <= 0.0) return kInfinity;
    acc += mu[i] * std::log(mu[i] / nu[i]);
  }
  return std::max(acc, 0.0);
}

double kl_divergence(const Distribution& mu, const Distribution& nu) {
  return kl_divergence(mu.span(), nu.span());
}

double span_seminorm(std::span<const double> f) {
  if (f.empty()) throw ValidationError("span seminorm of an empty vector");
  const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
  return *hi - *lo;
}

double span_seminorm(const Vector& f) {
  return span_seminorm(std::span<const double>(f.data(), static_cast<std::size_t>(f.size())));
}

double span_seminorm(const CostFunction& f) { return span_seminorm(f.values()); }

double dobrushin_coefficient(const StochasticMatrix& p) {
  // 1 - min overlap rather than half the L1 gap: a row mass of delta shared by
  // every row then gives alpha <= 1 - delta with no rounding excess
  const std::size_t n = p.size();
  if (n <= 1) return 0.0;
  double overlap = 1.0;
  for (StateIndex x = 0; x < n; ++x) {
    const auto a = p.row(x);
    for (StateIndex x2 = x + 1; x2 < n; ++x2) {
      const auto b = p.row(x2);
      double shared = 0.0;
      for (std::size_t y = 0; y < n; ++y) shared += std::min(a[y], b[y]);
      overlap = std::min(overlap, shared);
    }
  }
  return std::clamp(1.0 - overlap, 0.0, 1.0);
}

bool is_irreducible(const StochasticMatrix& p) {
  return strong_components(positive_digraph(p)).second == 1;
}

bool is_aperiodic(const StochasticMatrix& p) {
  const Adjacency adj = positive_digraph(p);
  const auto [comp, count] = strong_components(adj);
  const auto periods = component_periods(adj, comp, count);
  return std::all_of(periods.begin(), periods.end(), [](std::size_t d) { return d == 1; });
}

ErgodicityReport ergodicity_report(const StochasticMatrix& p) {
  const std::size_t n = p.size();
  const Adjacency adj = positive_digraph(p);
  const auto [comp, count] = strong_components(adj);
  const auto periods = component_periods(adj, comp, count);

  ErgodicityReport report;
  report.irreducible = count == 1;
  report.aperiodic = std::all_of(periods.begin(), periods.end(), [](std::size_t d) { return d == 1; });
  report.dobrushin = dobrushin_coefficient(p);
  if (!report.ergodic()) return report;

  // Primitive: some power is positive, and Wielandt bounds the first such power.
  BitMatrix one(n);
  for (StateIndex x = 0; x < n; ++x) {
    for (StateIndex y : adj[x]) one.set(x, y);
  }
  const std::size_t cap = n * n - 2 * n + 2;
  BitMatrix pattern = one;
  Matrix power = p.rows();
  for (std::size_t k = 1; k <= cap; ++k) {
    if (pattern.all_set()) {
      report.nbar = k;
      report.theta = power.minCoeff();
      return report;
    }
    pattern = pattern.times(one);
    power = power * p.rows();
  }
  // Unreachable for a primitive kernel; kept as the non-ergodic fallback.
  return report;
}

Distribution invariant_distribution(const StochasticMatrix& p) {
  const auto n = static_cast<Eigen::Index>(p.size());
  // pi (P - I) = 0 with one redundant balance equation replaced by sum(pi) = 1.
  Eigen::MatrixXd system = p.rows().transpose();
  system.diagonal().array() -= 1.0;
  system.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs[n - 1] = 1.0;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  if (!lu.isInvertible()) {
    throw NotUnichainError("stationarity system is singular: kernel is not unichain");
  }
  Vector pi = lu.solve(rhs);
  if ((pi.array() < -1e-10).any()) {
    throw NotUnichainError("stationarity solve produced negative mass: kernel is not unichain");
  }
  Distribution result = Distribution::normalized(pi.cwiseMax(0.0));
  const Vector drift = p.rows().transpose() * result.weights() - result.weights();
  if (drift.lpNorm<1>() > 1e-10) {
    throw NotUnichainError("invariant distribution residual " + std::to_string(drift.lpNorm<1>()) +
                           " exceeds 1e-10");
  }
  return result;
}

StateIndex sample_next(const StochasticMatrix& p, StateIndex x, Rng& rng) {
  if (x >= p.size()) throw DimensionError("sample_next: state index out of range");
  const auto row = p.row(x);
  const double u = uniform01(rng);
  double cumulative = 0.0;
  StateIndex last_positive = 0;
  for (StateIndex y = 0; y < row.size(); ++y) {
    if (row[y] <= 0.0) continue;
    cumulative += row[y];
    last_positive = y;
    if (u < cumulative) return y;
  }
  return last_positive;
}

TransitionSampler::TransitionSampler(const StochasticMatrix& p)
    : n_(p.size()), cumulative_(n_ * n_), last_positive_(n_, 0) {
  for (StateIndex x = 0; x < n_; ++x) {
    const auto row = p.row(x);
    double cumulative = 0.0;
    for (StateIndex y = 0; y < n_; ++y) {
      if (row[y] > 0.0) {
        cumulative += row[y];
        last_positive_[x] = y;
      }
      cumulative_[x * n_ + y] = cumulative;
    }
  }
}

StateIndex TransitionSampler::next(StateIndex x, Rng& rng) const {
  if (x >= n_) throw DimensionError("TransitionSampler: state index out of range");
  const double u = uniform01(rng);
  const auto begin = cumulative_.begin() + static_cast<std::ptrdiff_t>(x * n_);
  const auto end = begin + static_cast<std::ptrdiff_t>(n_);
  const auto it = std::upper_bound(begin, end, u);
  if (it == end) return last_positive_[x];
  return static_cast<StateIndex>(it - begin);
}

}  // namespace klmdp
