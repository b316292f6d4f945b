#include "klmdp/online.hpp"

#include <cmath>

namespace klmdp {

CostFunction CostSequence::next() {
  if (cursor_ >= costs_.size()) throw Error("cost sequence exhausted");
  return costs_[cursor_++];
}

std::size_t phase_length(std::size_t m, double epsilon) {
  if (m == 0) throw ValidationError("phases are numbered from 1");
  const double exponent = 1.0 / 3.0 - epsilon;
  const double raw = std::pow(static_cast<double>(m), exponent);
  // snap values that are integers up to rounding, so ceil(2 + 1ulp) stays 2
  const double nearest = std::round(raw);
  if (std::abs(raw - nearest) <= 1e-9 * nearest) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::ceil(raw));
}

std::size_t PhaseSchedule::complete_phases() const {
  std::size_t count = 0;
  while (count < tau_cum.size() && tau_cum[count] <= horizon) ++count;
  return count;
}

PhaseSchedule make_schedule(double epsilon, std::size_t horizon) {
  if (!(epsilon > 0.0 && epsilon < 1.0 / 3.0)) throw ValidationError("epsilon must lie in (0, 1/3)");
  if (horizon < 1) throw ValidationError("horizon must be at least 1");
  PhaseSchedule schedule;
  schedule.epsilon = epsilon;
  schedule.horizon = horizon;
  std::size_t total = 0;
  for (std::size_t m = 1; total < horizon; ++m) {
    const std::size_t tau = phase_length(m, epsilon);
    total += tau;
    schedule.tau.push_back(tau);
    schedule.tau_cum.push_back(total);
  }
  return schedule;
}

// ---------------------------------------------------------------------------

PhasedStrategy::PhasedStrategy(StochasticMatrix passive, double epsilon, StateIndex start, StrategyOptions options)
    : passive_(std::move(passive)),
      epsilon_(epsilon),
      options_(std::move(options)),
      state_(start),
      cost_sum_(Vector::Zero(static_cast<Eigen::Index>(passive_.size()))),
      phase_buffer_(Vector::Zero(static_cast<Eigen::Index>(passive_.size()))),
      policy_(make_policy(passive_, passive_)) {
  if (!(epsilon > 0.0 && epsilon < 1.0 / 3.0)) throw ValidationError("epsilon must lie in (0, 1/3)");
  if (start >= passive_.size()) throw DimensionError("start state out of range");
  begin_phase();
}

void PhasedStrategy::begin_phase() {
  // average of all costs revealed in completed phases; zero before any
  const Vector average = steps_seen_ == 0 ? Vector::Zero(cost_sum_.size())
                                          : Vector(cost_sum_ / static_cast<double>(steps_seen_));
  SolverSettings settings = options_.solver;
  if (options_.warm_start && phase_ > 0 && (solution_.v.array() > 0.0).all()) {
    settings.initial_v = solution_.v;
  }
  solution_ = solve_mpe(passive_, CostFunction(average), settings);
  KlPolicy next = twisted_kernel(passive_, solution_.h);

  if (phase_ > 0) {
    const double distance = kernel_sup_distance(next.kernel, policy_.kernel);
    drift_ratios_.push_back(distance * static_cast<double>(steps_seen_) / static_cast<double>(tau_));
  }
  policy_ = std::move(next);
  sampler_.emplace(policy_.kernel);
  ++phase_;
  tau_ = phase_length(phase_, epsilon_);
  phase_step_ = 0;
}

StepRecord PhasedStrategy::step(const CostFunction& cost, Rng& rng) {
  if (cost.size() != passive_.size()) throw DimensionError("cost function has the wrong size");
  if (!options_.allow_cost_cap_violation && cost.max() > options_.cost_cap) {
    throw AssumptionError("state cost exceeds the cost cap of the admissible class");
  }

  StepRecord record;
  record.t = steps_taken_;
  record.state = state_;
  record.phase = phase_;
  record.state_cost = cost[state_];
  record.control_cost = policy_.control_cost[static_cast<Eigen::Index>(state_)];
  state_ = sampler_->next(state_, rng);
  record.next_state = state_;

  phase_buffer_ += cost.values();
  ++steps_taken_;
  if (++phase_step_ == tau_) {
    cost_sum_ += phase_buffer_;
    phase_buffer_.setZero();
    steps_seen_ += tau_;
    begin_phase();
  }
  return record;
}

RunTrace run_episode(const StochasticMatrix& passive, CostStream& env, std::size_t horizon, double epsilon,
                     StateIndex start, std::uint64_t seed, const StrategyOptions& options) {
  PhasedStrategy strategy(passive, epsilon, start, options);
  Rng rng(seed);
  RunTrace trace;
  trace.states.reserve(horizon);
  trace.state_costs.reserve(horizon);
  trace.control_costs.reserve(horizon);
  trace.cumulative.reserve(horizon);
  trace.phases.reserve(horizon);

  double cumulative = 0.0;
  std::size_t last_phase = 0;
  for (std::size_t t = 0; t < horizon; ++t) {
    const StepRecord record = strategy.step(env.next(), rng);
    if (record.phase != last_phase) trace.phase_boundaries.push_back(t);
    last_phase = record.phase;
    cumulative += record.state_cost + record.control_cost;
    trace.states.push_back(record.state);
    trace.state_costs.push_back(record.state_cost);
    trace.control_costs.push_back(record.control_cost);
    trace.cumulative.push_back(cumulative);
    trace.phases.push_back(record.phase);
  }
  // keep only the policy changes that took effect within the horizon
  const auto& drift = strategy.drift_ratios();
  const std::size_t changes = trace.phase_boundaries.empty() ? 0 : trace.phase_boundaries.size() - 1;
  trace.drift_ratios.assign(drift.begin(), drift.begin() + static_cast<std::ptrdiff_t>(changes));
  return trace;
}

}  // namespace klmdp
