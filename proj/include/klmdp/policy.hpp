#pragma once

// Twisted-kernel policies and their costs.
//
// The twisted kernel of the passive dynamics P* by phi is
//
//   P_phi(x, y) = P*(x, y) e^{-phi(y)} / sum_z P*(x, z) e^{-phi(z)},
//
// the minimizer of D(u || P*(x, .)) + E_u phi over distributions u. With phi
// the relative value function of a cost f it is the optimal policy for f.

#include <optional>

#include "klmdp/chains.hpp"
#include "klmdp/spectral.hpp"

namespace klmdp {

struct KlPolicy {
  StochasticMatrix kernel;
  /// control_cost(x) = D(kernel(x, .) || passive(x, .)); may be kInfinity.
  Vector control_cost;
  /// Twisting function, when the policy is a twisted kernel.
  std::optional<Vector> source_h;
};

/// Twisted kernel of `passive` by `phi`, computed in the log domain. Row
/// supports equal the passive row supports (up to underflow of e^{-phi}).
KlPolicy twisted_kernel(const StochasticMatrix& passive, const Vector& phi);

/// Wraps an arbitrary kernel, evaluating its control cost against `passive` by direct summation.
KlPolicy make_policy(const StochasticMatrix& passive, StochasticMatrix kernel);

/// Twisted kernel of the relative value function: the optimal stationary policy for f.
KlPolicy optimal_policy(const StochasticMatrix& passive, const CostFunction& f, const SolverSettings& settings = {});

/// D(P_phi(x, .) || P_phi2(x, .)) from the closed form
/// E_{P_phi(x,.)}[phi2 - phi] + log(Lambda_phi2(x) / Lambda_phi(x)).
double twisted_divergence(const StochasticMatrix& passive, const Vector& phi, const Vector& phi2, StateIndex x);

/// c(x, P) = f(x) + D(P(x, .) || P*(x, .)).
double state_action_cost(const CostFunction& f, const KlPolicy& policy, StateIndex x);

/// E_pi[f + control_cost] under the invariant law of the policy kernel.
double steady_state_cost(const CostFunction& f, const KlPolicy& policy);

/// max_x || a(x, .) - b(x, .) ||_1.
double kernel_sup_distance(const StochasticMatrix& a, const StochasticMatrix& b);

struct BoundConstants {
  /// Uniform bound on per-step cost: cost_cap + log(1/p_star).
  double k0 = 0.0;
  /// Uniform bound on span(h): log(1/theta) + nbar * cost_cap.
  double k1 = 0.0;
  double alpha_passive = 1.0;
  /// Smallest nonzero passive transition probability.
  double p_star = 0.0;
  double theta = 0.0;
  std::size_t nbar = 0;
};

/// Throws AssumptionError unless the passive kernel is ergodic with Dobrushin coefficient < 1.
BoundConstants bound_constants(const StochasticMatrix& passive, double cost_cap = 1.0);

}  // namespace klmdp
