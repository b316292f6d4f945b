#include "klmdp/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace klmdp {

namespace {

void check_costs(const std::vector<CostFunction>& costs, std::size_t n) {
  for (const auto& f : costs) {
    if (f.size() != n) throw DimensionError("cost function size differs from the state space");
  }
}

}  // namespace

std::string_view to_string(ComparatorKind kind) {
  switch (kind) {
    case ComparatorKind::BestInHindsight:
      return "best-in-hindsight";
    case ComparatorKind::FixedPolicy:
      return "fixed-policy";
    case ComparatorKind::SampledPoolBest:
      return "sampled-pool-best";
  }
  return "unknown";
}

std::vector<double> steady_state_comparator_cost(const KlPolicy& policy, const std::vector<CostFunction>& costs) {
  const std::size_t n = policy.kernel.size();
  check_costs(costs, n);
  const Distribution pi = invariant_distribution(policy.kernel);
  double control = 0.0;
  for (StateIndex x = 0; x < n; ++x) {
    if (pi[x] > 0.0) control += pi[x] * policy.control_cost[static_cast<Eigen::Index>(x)];
  }
  std::vector<double> prefix;
  prefix.reserve(costs.size());
  double total = 0.0;
  for (const auto& f : costs) {
    total += pi.weights().dot(f.values()) + control;
    prefix.push_back(total);
  }
  return prefix;
}

std::vector<double> expected_comparator_cost(const KlPolicy& policy, const std::vector<CostFunction>& costs,
                                             StateIndex start) {
  const std::size_t n = policy.kernel.size();
  check_costs(costs, n);
  if (start >= n) throw DimensionError("start state out of range");
  Vector nu = Vector::Zero(static_cast<Eigen::Index>(n));
  nu[static_cast<Eigen::Index>(start)] = 1.0;
  const Matrix transposed = policy.kernel.rows().transpose();
  std::vector<double> prefix;
  prefix.reserve(costs.size());
  double total = 0.0;
  for (const auto& f : costs) {
    double step = 0.0;
    for (Eigen::Index x = 0; x < nu.size(); ++x) {
      if (nu[x] > 0.0) step += nu[x] * (f.values()[x] + policy.control_cost[x]);
    }
    total += step;
    prefix.push_back(total);
    nu = transposed * nu;
  }
  return prefix;
}

KlPolicy best_in_hindsight(const StochasticMatrix& passive, const std::vector<CostFunction>& costs,
                           const SolverSettings& settings) {
  if (costs.empty()) throw ValidationError("best_in_hindsight needs at least one cost function");
  check_costs(costs, passive.size());
  Vector sum = Vector::Zero(static_cast<Eigen::Index>(passive.size()));
  for (const auto& f : costs) sum += f.values();
  const CostFunction average(sum / static_cast<double>(costs.size()));
  return optimal_policy(passive, average, settings);
}

std::vector<double> hindsight_prefix_cost(const StochasticMatrix& passive, const std::vector<CostFunction>& costs,
                                          const SolverSettings& settings) {
  check_costs(costs, passive.size());
  SolverSettings warm = settings;
  Vector sum = Vector::Zero(static_cast<Eigen::Index>(passive.size()));
  std::vector<double> out;
  out.reserve(costs.size());
  for (std::size_t t = 0; t < costs.size(); ++t) {
    sum += costs[t].values();
    const double steps = static_cast<double>(t + 1);
    const MpeSolution sol = solve_mpe(passive, CostFunction(sum / steps), warm);
    warm.initial_v = sol.v;
    out.push_back(steps * sol.lambda);
  }
  return out;
}

KlPolicy sample_policy(const StochasticMatrix& passive, Rng& rng, double alpha) {
  const std::size_t n = passive.size();
  Matrix rows = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<StateIndex> support;
  std::vector<double> weights;
  for (StateIndex x = 0; x < n; ++x) {
    const auto row = passive.row(x);
    support.clear();
    for (StateIndex y = 0; y < n; ++y) {
      if (row[y] > 0.0) support.push_back(y);
    }
    weights.assign(support.size(), 0.0);
    sample_dirichlet(alpha, weights, rng);
    for (std::size_t k = 0; k < support.size(); ++k) {
      rows(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(support[k])) = weights[k];
    }
  }
  return make_policy(passive, StochasticMatrix(std::move(rows)));
}

std::vector<KlPolicy> sample_policy_pool(const StochasticMatrix& passive, std::size_t pool_size, std::uint64_t seed,
                                         double alpha) {
  if (pool_size < 1) throw ValidationError("pool size must be at least 1");
  Rng rng(seed);
  std::vector<KlPolicy> pool;
  pool.reserve(pool_size);
  while (pool.size() < pool_size) {
    KlPolicy candidate = sample_policy(passive, rng, alpha);
    // a Dirichlet weight can underflow to zero and cut an edge; redraw then
    if (is_irreducible(candidate.kernel)) pool.push_back(std::move(candidate));
  }
  return pool;
}

std::vector<double> realized_cost_trace(const KlPolicy& policy, const std::vector<CostFunction>& costs,
                                        StateIndex start, std::uint64_t seed) {
  check_costs(costs, policy.kernel.size());
  if (start >= policy.kernel.size()) throw DimensionError("start state out of range");
  const TransitionSampler sampler(policy.kernel);
  Rng rng(seed);
  std::vector<double> prefix;
  prefix.reserve(costs.size());
  StateIndex x = start;
  double total = 0.0;
  for (const auto& f : costs) {
    total += f[x] + policy.control_cost[static_cast<Eigen::Index>(x)];
    prefix.push_back(total);
    x = sampler.next(x, rng);
  }
  return prefix;
}

PoolBest pool_best_realized_cost(const std::vector<KlPolicy>& pool, const StochasticMatrix& passive,
                                 const std::vector<CostFunction>& costs, StateIndex start, std::uint64_t seed) {
  if (pool.empty()) throw ValidationError("policy pool is empty");
  PoolBest best;
  double best_total = kInfinity;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (pool[i].kernel.size() != passive.size()) throw DimensionError("pooled policy has the wrong size");
    auto trace = realized_cost_trace(pool[i], costs, start, seed);
    const double total = trace.empty() ? 0.0 : trace.back();
    if (i == 0 || total < best_total) {
      best_total = total;
      best.index = i;
      best.cost_trace = std::move(trace);
    }
  }
  return best;
}

RegretTrace regret_trace(const RunTrace& run, const std::vector<double>& comparator_cost, ComparatorKind kind) {
  if (run.cumulative.size() != comparator_cost.size()) throw DimensionError("regret_trace: horizon mismatch");
  RegretTrace out;
  out.horizon = comparator_cost.size();
  out.comparator_kind = kind;
  out.comparator_cost = comparator_cost;
  out.per_step.resize(out.horizon);
  for (std::size_t t = 0; t < out.horizon; ++t) out.per_step[t] = run.cumulative[t] - comparator_cost[t];
  return out;
}

MonteCarloSummary summarize(const std::vector<std::vector<double>>& traces, std::vector<std::uint64_t> seeds) {
  if (traces.empty()) throw ValidationError("summarize needs at least one trace");
  const std::size_t horizon = traces.front().size();
  for (const auto& trace : traces) {
    if (trace.size() != horizon) throw DimensionError("summarize: traces differ in length");
  }
  MonteCarloSummary out;
  out.runs = traces.size();
  out.seeds = std::move(seeds);
  out.mean.assign(horizon, 0.0);
  out.stddev.assign(horizon, 0.0);
  const auto runs = static_cast<double>(out.runs);
  for (std::size_t t = 0; t < horizon; ++t) {
    double sum = 0.0;
    for (const auto& trace : traces) sum += trace[t];
    const double mean = sum / runs;
    double squares = 0.0;
    for (const auto& trace : traces) squares += (trace[t] - mean) * (trace[t] - mean);
    out.mean[t] = mean;
    out.stddev[t] = out.runs > 1 ? std::sqrt(squares / (runs - 1.0)) : 0.0;
  }
  return out;
}

double growth_exponent(const std::vector<double>& trace, std::size_t burn_in) {
  if (trace.size() < burn_in + 2) throw ValidationError("growth_exponent needs at least two points after burn-in");
  const auto first = trace.begin() + static_cast<std::ptrdiff_t>(burn_in);
  if (std::all_of(first, trace.end(), [&](double r) { return r == *first; })) {
    throw ValidationError("growth_exponent of an all-equal trace");
  }
  double sx = 0.0;
  double sy = 0.0;
  double sxx = 0.0;
  double sxy = 0.0;
  double count = 0.0;
  for (std::size_t i = burn_in; i < trace.size(); ++i) {
    if (!(trace[i] > 0.0) || !std::isfinite(trace[i])) return std::numeric_limits<double>::quiet_NaN();
    const double lx = std::log(static_cast<double>(i + 1));
    const double ly = std::log(trace[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    count += 1.0;
  }
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

std::size_t default_burn_in(std::size_t horizon) { return horizon / 10; }

// ---------------------------------------------------------------------------

RunResult run_replication(const ExperimentSettings& settings, const StochasticMatrix& passive, std::uint64_t seed) {
  TrackingEnv env = make_tracking_env(settings.graph, settings.horizon, split_seed(seed, 0), settings.dirichlet_alpha);
  const std::vector<CostFunction> costs = env.costs();

  RunResult result;
  result.seed = seed;
  result.trace = run_episode(passive, env, settings.horizon, settings.epsilon, settings.start, split_seed(seed, 1),
                             settings.strategy);

  result.hindsight = regret_trace(result.trace, hindsight_prefix_cost(passive, costs, settings.strategy.solver),
                                  ComparatorKind::BestInHindsight);

  if (settings.pool_size > 0) {
    const auto pool = sample_policy_pool(passive, settings.pool_size, split_seed(seed, 2), settings.dirichlet_alpha);
    PoolBest best = pool_best_realized_cost(pool, passive, costs, settings.start, split_seed(seed, 3));
    result.pool_winner = best.index;
    result.pool = regret_trace(result.trace, best.cost_trace, ComparatorKind::SampledPoolBest);
  }
  return result;
}

ExperimentResult monte_carlo(const ExperimentSettings& settings, std::size_t runs, std::uint64_t base_seed,
                             std::size_t workers) {
  if (runs < 1) throw ValidationError("monte_carlo needs at least one run");
  const StochasticMatrix passive = build_passive(settings.graph, settings.stay_prob, settings.delta, settings.home);
  if (settings.start >= passive.size()) throw ValidationError("start vertex out of range");

  std::vector<RunResult> results(runs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < runs; i = next++) {
      try {
        results[i] = run_replication(settings, passive, split_seed(base_seed, i));
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(workers, 1, runs);
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentResult out;
  std::vector<std::uint64_t> seeds;
  std::vector<std::vector<double>> hindsight;
  std::vector<std::vector<double>> pooled;
  for (const auto& r : results) {
    seeds.push_back(r.seed);
    hindsight.push_back(r.hindsight.per_step);
    if (r.pool) pooled.push_back(r.pool->per_step);
  }
  out.hindsight = summarize(hindsight, seeds);
  if (settings.pool_size > 0) out.pool = summarize(pooled, seeds);
  out.runs = std::move(results);
  return out;
}

}  // namespace klmdp
