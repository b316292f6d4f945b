#pragma once

// Multiplicative Poisson equation  e^{-f} P V = e^{-lambda} V.
//
// The dominant eigenpair of A(x, y) = e^{-f(x)} P(x, y) is found by power
// iteration. Every iterate V > 0 yields the Collatz-Wielandt bracket
//
//   min_x (AV)(x) / V(x)  <=  rho(A)  <=  max_x (AV)(x) / V(x),
//
// so termination comes with a certificate on e^{-lambda} = rho(A). All
// products are formed in the log domain; h = -log V is pinned at h(pin) = 0.

#include <optional>
#include <vector>

#include "klmdp/chains.hpp"

namespace klmdp {

struct SolverSettings {
  /// Relative bracket width (upper - lower) / upper at which iteration stops.
  double tolerance = 1e-12;
  int max_iterations = 100000;
  StateIndex pin_index = 0;
  /// Positive starting vector V; all-ones when absent.
  std::optional<Vector> initial_v;
  /// Keep the bracket of every iteration in MpeSolution::history.
  bool record_history = false;
};

struct EigenBracket {
  double lower = 0.0;
  double upper = 0.0;

  double width() const noexcept { return upper - lower; }
};

struct MpeSolution {
  /// Optimal average cost.
  double lambda = 0.0;
  /// Relative value function, h(pin) = 0.
  Vector h;
  /// e^{-h}, V(pin) = 1.
  Vector v;
  /// Certified bounds on e^{-lambda}.
  EigenBracket bracket;
  /// Same bounds as logarithms; exact even where e^{-lambda} underflows.
  EigenBracket log_bracket;
  int iterations = 0;
  std::vector<EigenBracket> history;
};

/// Raised when max_iterations is exhausted; carries the last bracket.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& message, EigenBracket bracket, int iterations)
      : Error(message), bracket_(bracket), iterations_(iterations) {}

  const EigenBracket& bracket() const noexcept { return bracket_; }
  int iterations() const noexcept { return iterations_; }

 private:
  EigenBracket bracket_;
  int iterations_;
};

/// Solves the MPE for (passive, f). Throws AssumptionError when the passive
/// kernel is not irreducible and aperiodic, ConvergenceError on exhaustion.
MpeSolution solve_mpe(const StochasticMatrix& passive, const CostFunction& f, const SolverSettings& settings = {});

/// max_x |h(x) + lambda - f(x) + log sum_y P(x,y) e^{-h(y)}|.
double acoe_residual(const StochasticMatrix& passive, const CostFunction& f, const MpeSolution& solution);
double acoe_residual(const StochasticMatrix& passive, const CostFunction& f, const Vector& h, double lambda);

/// Brute-force reference for small problems (n <= 12): dominant eigenpair of
/// e^{-f} P from 64 normalized repeated squarings, then one Collatz bracket.
struct OracleEigenpair {
  double lambda = 0.0;
  /// Dominant eigenvector scaled to v(0) = 1.
  Vector v;
  EigenBracket bracket;
};

inline constexpr std::size_t kOracleMaxStates = 12;

OracleEigenpair eigen_oracle(const StochasticMatrix& passive, const CostFunction& f);

}  // namespace klmdp
