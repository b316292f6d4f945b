#pragma once

// Regret against stationary comparators, sampled policy pools and seeded
// Monte-Carlo replication of the tracking experiment.

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "klmdp/chains.hpp"
#include "klmdp/online.hpp"
#include "klmdp/policy.hpp"
#include "klmdp/world.hpp"

namespace klmdp {

enum class ComparatorKind { BestInHindsight, FixedPolicy, SampledPoolBest };

std::string_view to_string(ComparatorKind kind);

struct RegretTrace {
  std::size_t horizon = 0;
  /// R_t for every prefix t = 1..T.
  std::vector<double> per_step;
  ComparatorKind comparator_kind = ComparatorKind::FixedPolicy;
  /// Prefix costs of the comparator.
  std::vector<double> comparator_cost;
};

struct MonteCarloSummary {
  std::size_t runs = 0;
  std::vector<double> mean;
  /// Sample standard deviation (divisor runs - 1); zero when runs == 1.
  std::vector<double> stddev;
  std::vector<std::uint64_t> seeds;
};

/// Prefix sums of E_pi[f_t + control_cost], pi the invariant law of the policy.
std::vector<double> steady_state_comparator_cost(const KlPolicy& policy, const std::vector<CostFunction>& costs);

/// Prefix sums of E[f_t(X_t) + control_cost(X_t)] for the chain started at
/// `start`, with the marginals nu_t = delta_start P^{t-1} propagated exactly.
std::vector<double> expected_comparator_cost(const KlPolicy& policy, const std::vector<CostFunction>& costs,
                                             StateIndex start);

/// Twisted kernel of the MPE solution for the average of `costs`.
KlPolicy best_in_hindsight(const StochasticMatrix& passive, const std::vector<CostFunction>& costs,
                           const SolverSettings& settings = {});

/// comparator_cost(t) = t * lambda(mean of f_1..f_t): the steady-state cost over
/// the first t steps of the best stationary policy in hindsight for that same
/// prefix, so entry t is the regret comparator for horizon t. The last entry
/// equals steady_state_comparator_cost(best_in_hindsight(costs)).back().
/// Each solve is warm-started from the previous prefix.
std::vector<double> hindsight_prefix_cost(const StochasticMatrix& passive, const std::vector<CostFunction>& costs,
                                          const SolverSettings& settings = {});

/// One policy whose row x is a Dirichlet(alpha) draw over the support of passive row x.
KlPolicy sample_policy(const StochasticMatrix& passive, Rng& rng, double alpha = 1.0);

/// `pool_size` irreducible sampled policies; deterministic in `seed`.
std::vector<KlPolicy> sample_policy_pool(const StochasticMatrix& passive, std::size_t pool_size, std::uint64_t seed,
                                         double alpha = 1.0);

/// Prefix sums of f_t(x_t) + control_cost(x_t) along one simulated path of the policy.
std::vector<double> realized_cost_trace(const KlPolicy& policy, const std::vector<CostFunction>& costs,
                                        StateIndex start, std::uint64_t seed);

struct PoolBest {
  std::size_t index = 0;
  std::vector<double> cost_trace;
};

/// Simulates every pooled policy on the same cost sequence from the same start
/// with the same random stream (common random numbers) and returns the one with
/// the smallest total; ties go to the lowest index.
PoolBest pool_best_realized_cost(const std::vector<KlPolicy>& pool, const StochasticMatrix& passive,
                                 const std::vector<CostFunction>& costs, StateIndex start, std::uint64_t seed);

/// per_step(t) = run.cumulative(t) - comparator_cost(t).
RegretTrace regret_trace(const RunTrace& run, const std::vector<double>& comparator_cost, ComparatorKind kind);

/// Per-step mean and sample standard deviation over equally long traces.
MonteCarloSummary summarize(const std::vector<std::vector<double>>& traces, std::vector<std::uint64_t> seeds);

/// Least-squares slope of log R_t against log t over t > burn_in (t is 1-based).
/// Returns NaN when some R_t there is not positive; throws ValidationError on
/// fewer than two points or an all-equal trace.
double growth_exponent(const std::vector<double>& trace, std::size_t burn_in);

/// Default burn-in: 10% of the trace length.
std::size_t default_burn_in(std::size_t horizon);

// ---------------------------------------------------------------------------
// Tracking experiment

struct ExperimentSettings {
  Graph graph = grid_graph(10, 10);
  double stay_prob = 0.01;
  double delta = 0.01;
  Vertex home = 0;
  Vertex start = 0;
  std::size_t horizon = 1000;
  double epsilon = 0.05;
  /// 0 disables the pool comparator.
  std::size_t pool_size = 1000;
  double dirichlet_alpha = 1.0;
  StrategyOptions strategy{};
};

struct RunResult {
  std::uint64_t seed = 0;
  RunTrace trace;
  RegretTrace hindsight;
  std::optional<RegretTrace> pool;
  std::size_t pool_winner = 0;
};

struct ExperimentResult {
  MonteCarloSummary hindsight;
  std::optional<MonteCarloSummary> pool;
  std::vector<RunResult> runs;
};

/// One replication: tracking env from split_seed(seed, 0), agent stream
/// split_seed(seed, 1), pool draw split_seed(seed, 2), pool simulation split_seed(seed, 3).
RunResult run_replication(const ExperimentSettings& settings, const StochasticMatrix& passive, std::uint64_t seed);

/// Replication i uses seed split_seed(base_seed, i). Results do not depend on `workers`.
ExperimentResult monte_carlo(const ExperimentSettings& settings, std::size_t runs, std::uint64_t base_seed,
                             std::size_t workers = 1);

}  // namespace klmdp
