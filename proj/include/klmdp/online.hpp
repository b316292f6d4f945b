#pragma once

// Phased online strategy.
//
// Time is cut into phases of length tau_m = ceil(m^{1/3 - epsilon}). At the
// start of phase m the strategy solves the MPE for the average of all costs
// revealed in phases 1..m-1 and follows the resulting twisted kernel for the
// whole phase.

#include <cstdint>
#include <optional>
#include <vector>

#include "klmdp/chains.hpp"
#include "klmdp/policy.hpp"
#include "klmdp/spectral.hpp"

namespace klmdp {

/// Source of per-step state costs. It never sees the agent's states, which
/// makes every implementation oblivious by construction.
class CostStream {
 public:
  virtual ~CostStream() = default;
  virtual CostFunction next() = 0;
};

/// Replays a fixed cost sequence.
class CostSequence final : public CostStream {
 public:
  explicit CostSequence(std::vector<CostFunction> costs) : costs_(std::move(costs)) {}

  CostFunction next() override;
  const std::vector<CostFunction>& costs() const noexcept { return costs_; }

 private:
  std::vector<CostFunction> costs_;
  std::size_t cursor_ = 0;
};

/// ceil(m^{1/3 - epsilon}) for 1-based phase m.
std::size_t phase_length(std::size_t m, double epsilon);

struct PhaseSchedule {
  double epsilon = 0.05;
  std::size_t horizon = 0;
  /// tau[i] is the length of phase i + 1.
  std::vector<std::size_t> tau;
  /// Prefix sums of tau; the last entry is >= horizon.
  std::vector<std::size_t> tau_cum;

  /// Number of phases that end at or before the horizon.
  std::size_t complete_phases() const;
};

PhaseSchedule make_schedule(double epsilon, std::size_t horizon);

struct StrategyOptions {
  SolverSettings solver{};
  double cost_cap = 1.0;
  /// Accept costs above cost_cap instead of throwing AssumptionError.
  bool allow_cost_cap_violation = false;
  /// Start each phase's power iteration from the previous phase's V.
  bool warm_start = true;
};

struct StepRecord {
  std::size_t t = 0;
  StateIndex state = 0;
  double state_cost = 0.0;
  double control_cost = 0.0;
  std::size_t phase = 1;
  StateIndex next_state = 0;
};

/// Strategy state owned by a single episode.
class PhasedStrategy {
 public:
  PhasedStrategy(StochasticMatrix passive, double epsilon, StateIndex start, StrategyOptions options = {});

  /// Records c_t(X_t, P_t) for the current state, draws X_{t+1} from the
  /// current policy, and opens the next phase once this one is full.
  StepRecord step(const CostFunction& cost, Rng& rng);

  std::size_t current_phase() const noexcept { return phase_; }
  std::size_t phase_step() const noexcept { return phase_step_; }
  std::size_t current_phase_length() const noexcept { return tau_; }
  /// Steps in completed phases, tau_{1:m-1}.
  std::size_t steps_seen() const noexcept { return steps_seen_; }
  std::size_t steps_taken() const noexcept { return steps_taken_; }
  StateIndex current_state() const noexcept { return state_; }
  const KlPolicy& policy() const noexcept { return policy_; }
  const StochasticMatrix& passive() const noexcept { return passive_; }
  /// Sum of costs over completed phases.
  const Vector& cost_sum() const noexcept { return cost_sum_; }
  const MpeSolution& last_solution() const noexcept { return solution_; }
  /// kernel_sup_distance(P^(m), P^(m-1)) * tau_{1:m-1} / tau_{m-1}, per phase change.
  const std::vector<double>& drift_ratios() const noexcept { return drift_ratios_; }

 private:
  void begin_phase();

  StochasticMatrix passive_;
  double epsilon_;
  StrategyOptions options_;
  std::size_t phase_ = 0;
  std::size_t tau_ = 0;
  std::size_t phase_step_ = 0;
  std::size_t steps_seen_ = 0;
  std::size_t steps_taken_ = 0;
  StateIndex state_;
  Vector cost_sum_;
  Vector phase_buffer_;
  KlPolicy policy_;
  MpeSolution solution_;
  std::optional<TransitionSampler> sampler_;
  std::vector<double> drift_ratios_;
};

struct RunTrace {
  std::vector<StateIndex> states;
  std::vector<double> state_costs;
  std::vector<double> control_costs;
  std::vector<double> cumulative;
  /// 1-based phase of every step.
  std::vector<std::size_t> phases;
  /// 0-based steps at which a new phase's policy took over.
  std::vector<std::size_t> phase_boundaries;
  std::vector<double> drift_ratios;

  std::size_t horizon() const noexcept { return states.size(); }
};

/// Runs the phased strategy for `horizon` steps against `env`.
RunTrace run_episode(const StochasticMatrix& passive, CostStream& env, std::size_t horizon, double epsilon,
                     StateIndex start, std::uint64_t seed, const StrategyOptions& options = {});

}  // namespace klmdp
