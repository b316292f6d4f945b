#include "klmdp/policy.hpp"

#include <algorithm>
#include <cmath>

namespace klmdp {

namespace {

Eigen::Index as_index(std::size_t i) { return static_cast<Eigen::Index>(i); }

void check_phi(const StochasticMatrix& passive, const Vector& phi) {
  if (static_cast<std::size_t>(phi.size()) != passive.size()) {
    throw DimensionError("twisting function and kernel dimensions differ");
  }
  if (!phi.allFinite()) throw ValidationError("twisting function must be finite");
}

// log sum_y w(y) e^{g(y)} over y with w(y) > 0.
double weighted_log_sum_exp(std::span<const double> w, const Vector& g) {
  double top = -kInfinity;
  for (std::size_t y = 0; y < w.size(); ++y) {
    if (w[y] > 0.0) top = std::max(top, g[as_index(y)]);
  }
  double acc = 0.0;
  for (std::size_t y = 0; y < w.size(); ++y) {
    if (w[y] > 0.0) acc += w[y] * std::exp(g[as_index(y)] - top);
  }
  return top + std::log(acc);
}

}  // namespace

KlPolicy twisted_kernel(const StochasticMatrix& passive, const Vector& phi) {
  check_phi(passive, phi);
  const std::size_t n = passive.size();
  Matrix rows = Matrix::Zero(as_index(n), as_index(n));
  Vector control_cost = Vector::Zero(as_index(n));

  for (StateIndex x = 0; x < n; ++x) {
    const auto row = passive.row(x);
    double lo = kInfinity;
    double hi = -kInfinity;
    for (std::size_t y = 0; y < n; ++y) {
      if (row[y] > 0.0) {
        lo = std::min(lo, phi[as_index(y)]);
        hi = std::max(hi, phi[as_index(y)]);
      }
    }
    if (hi == lo) {
      // constant on the support: the twist cancels in the normalization
      for (std::size_t y = 0; y < n; ++y) rows(as_index(x), as_index(y)) = row[y];
      continue;
    }

    // psi = phi - min_support(phi) >= 0; weights P e^{-psi} normalized via a max shift
    double top = -kInfinity;
    for (std::size_t y = 0; y < n; ++y) {
      if (row[y] > 0.0) top = std::max(top, std::log(row[y]) - (phi[as_index(y)] - lo));
    }
    double total = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      if (row[y] <= 0.0) continue;
      const double w = std::exp(std::log(row[y]) - (phi[as_index(y)] - lo) - top);
      rows(as_index(x), as_index(y)) = w;
      total += w;
    }
    rows.row(as_index(x)) /= total;

    // D = -E[psi] - log Lambda_psi(x), with log Lambda_psi(x) = top + log(total)
    double mean_psi = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      mean_psi += rows(as_index(x), as_index(y)) * (phi[as_index(y)] - lo);
    }
    control_cost[as_index(x)] = std::max(0.0, -mean_psi - (top + std::log(total)));
  }

  return KlPolicy{StochasticMatrix(std::move(rows)), std::move(control_cost), phi};
}

KlPolicy make_policy(const StochasticMatrix& passive, StochasticMatrix kernel) {
  if (kernel.size() != passive.size()) throw DimensionError("policy and passive kernel dimensions differ");
  const std::size_t n = passive.size();
  Vector control_cost(as_index(n));
  for (StateIndex x = 0; x < n; ++x) control_cost[as_index(x)] = kl_divergence(kernel.row(x), passive.row(x));
  return KlPolicy{std::move(kernel), std::move(control_cost), std::nullopt};
}

KlPolicy optimal_policy(const StochasticMatrix& passive, const CostFunction& f, const SolverSettings& settings) {
  return twisted_kernel(passive, solve_mpe(passive, f, settings).h);
}

double twisted_divergence(const StochasticMatrix& passive, const Vector& phi, const Vector& phi2, StateIndex x) {
  check_phi(passive, phi);
  check_phi(passive, phi2);
  if (x >= passive.size()) throw DimensionError("twisted_divergence: state index out of range");
  const Vector d = phi2 - phi;
  const auto row = passive.row(x);

  // P_phi(x, .) restricted to the row support, log-domain normalized.
  Vector log_w = Vector::Constant(d.size(), -kInfinity);
  double top = -kInfinity;
  for (std::size_t y = 0; y < row.size(); ++y) {
    if (row[y] > 0.0) {
      log_w[as_index(y)] = std::log(row[y]) - phi[as_index(y)];
      top = std::max(top, log_w[as_index(y)]);
    }
  }
  Vector w = Vector::Zero(d.size());
  for (std::size_t y = 0; y < row.size(); ++y) {
    if (row[y] > 0.0) w[as_index(y)] = std::exp(log_w[as_index(y)] - top);
  }
  w /= w.sum();

  // E[d] + log E[e^{-d}] = log E[e^{-(d - E[d])}]
  const double mean_d = w.dot(d);
  const Vector centered = -(d.array() - mean_d).matrix();
  const double value = weighted_log_sum_exp({w.data(), static_cast<std::size_t>(w.size())}, centered);
  return std::max(0.0, value);
}

double state_action_cost(const CostFunction& f, const KlPolicy& policy, StateIndex x) {
  if (f.size() != policy.kernel.size()) throw DimensionError("state_action_cost: dimension mismatch");
  if (x >= f.size()) throw DimensionError("state_action_cost: state index out of range");
  return f[x] + policy.control_cost[as_index(x)];
}

double steady_state_cost(const CostFunction& f, const KlPolicy& policy) {
  if (f.size() != policy.kernel.size()) throw DimensionError("steady_state_cost: dimension mismatch");
  const Distribution pi = invariant_distribution(policy.kernel);
  double total = 0.0;
  for (StateIndex x = 0; x < f.size(); ++x) {
    if (pi[x] == 0.0) continue;  // 0 * inf = 0 off the recurrent class
    total += pi[x] * (f[x] + policy.control_cost[as_index(x)]);
  }
  return total;
}

double kernel_sup_distance(const StochasticMatrix& a, const StochasticMatrix& b) {
  if (a.size() != b.size()) throw DimensionError("kernel_sup_distance: dimension mismatch");
  double worst = 0.0;
  for (StateIndex x = 0; x < a.size(); ++x) worst = std::max(worst, total_variation(a.row(x), b.row(x)));
  return worst;
}

BoundConstants bound_constants(const StochasticMatrix& passive, double cost_cap) {
  if (!(cost_cap >= 0.0) || !std::isfinite(cost_cap)) throw ValidationError("cost cap must be finite and >= 0");
  const ErgodicityReport report = ergodicity_report(passive);
  if (!report.ergodic()) throw AssumptionError("passive dynamics must be irreducible and aperiodic");
  if (!(report.dobrushin < 1.0)) throw AssumptionError("passive dynamics must have Dobrushin coefficient < 1");

  double p_star = 1.0;
  for (StateIndex x = 0; x < passive.size(); ++x) {
    for (double v : passive.row(x)) {
      if (v > 0.0) p_star = std::min(p_star, v);
    }
  }

  BoundConstants out;
  out.p_star = p_star;
  out.k0 = cost_cap + std::log(1.0 / p_star);
  out.theta = *report.theta;
  out.nbar = *report.nbar;
  out.k1 = std::log(1.0 / out.theta) + static_cast<double>(out.nbar) * cost_cap;
  out.alpha_passive = report.dobrushin;
  return out;
}

}  // namespace klmdp
