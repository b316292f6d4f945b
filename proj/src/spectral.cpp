#include "klmdp/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace klmdp {

namespace {

// Below this a linear-domain row sum has lost its relative precision.
constexpr double kLinearFloor = 1e-250;

// log sum_y P(x, y) e^{u(y)} over the support of row x.
double row_log_sum_exp(std::span<const double> row, const Vector& u) {
  double top = -kInfinity;
  for (std::size_t y = 0; y < row.size(); ++y) {
    if (row[y] > 0.0) top = std::max(top, std::log(row[y]) + u[static_cast<Eigen::Index>(y)]);
  }
  double acc = 0.0;
  for (std::size_t y = 0; y < row.size(); ++y) {
    if (row[y] > 0.0) acc += std::exp(std::log(row[y]) + u[static_cast<Eigen::Index>(y)] - top);
  }
  return top + std::log(acc);
}

// log (P e^{u})(x) for every x; linear domain after a max shift, with a
// per-row log-sum-exp fallback where the shifted sum underflows.
Vector log_apply(const StochasticMatrix& p, const Vector& u) {
  const double shift = u.maxCoeff();
  const Vector w = (u.array() - shift).exp().matrix();
  const Vector sums = p.rows() * w;
  Vector out(sums.size());
  for (Eigen::Index x = 0; x < sums.size(); ++x) {
    out[x] = sums[x] > kLinearFloor ? shift + std::log(sums[x])
                                    : row_log_sum_exp(p.row(static_cast<StateIndex>(x)), u);
  }
  return out;
}

// -log of the bracket midpoint, from log-domain endpoints.
double lambda_from_log_bracket(double log_lower, double log_upper) {
  // + 0.0 turns -0 into 0
  return -(log_upper + std::log(0.5 * (1.0 + std::exp(log_lower - log_upper)))) + 0.0;
}

}  // namespace

MpeSolution solve_mpe(const StochasticMatrix& passive, const CostFunction& f, const SolverSettings& settings) {
  const std::size_t n = passive.size();
  if (f.size() != n) throw DimensionError("solve_mpe: cost and kernel dimensions differ");
  if (!(settings.tolerance > 0.0)) throw ValidationError("solver tolerance must be positive");
  if (settings.max_iterations < 1) throw ValidationError("solver max_iterations must be at least 1");
  if (settings.pin_index >= n) throw DimensionError("solver pin index out of range");
  if (!is_irreducible(passive) || !is_aperiodic(passive)) {
    throw AssumptionError("passive dynamics must be irreducible and aperiodic");
  }

  const auto pin = static_cast<Eigen::Index>(settings.pin_index);
  Vector log_v = Vector::Zero(static_cast<Eigen::Index>(n));
  if (settings.initial_v) {
    const Vector& v0 = *settings.initial_v;
    if (static_cast<std::size_t>(v0.size()) != n) throw DimensionError("initial iterate has the wrong size");
    if (!(v0.array() > 0.0).all() || !v0.allFinite()) {
      throw ValidationError("initial iterate must be strictly positive and finite");
    }
    log_v = v0.array().log().matrix();
  }
  log_v.array() -= log_v[pin];

  MpeSolution solution;
  EigenBracket log_bracket{-kInfinity, kInfinity};
  for (int iteration = 1; iteration <= settings.max_iterations; ++iteration) {
    // log (A V) = -f + log (P V)
    Vector log_av = log_apply(passive, log_v) - f.values();
    const Vector log_ratio = log_av - log_v;
    log_bracket = {log_ratio.minCoeff(), log_ratio.maxCoeff()};
    if (settings.record_history) {
      solution.history.push_back({std::exp(log_bracket.lower), std::exp(log_bracket.upper)});
    }

    // relative width 1 - lower/upper
    if (-std::expm1(log_bracket.lower - log_bracket.upper) <= settings.tolerance) {
      solution.lambda = lambda_from_log_bracket(log_bracket.lower, log_bracket.upper);
      solution.h = -log_v;
      solution.h[pin] = 0.0;
      solution.v = log_v.array().exp().matrix();
      solution.v[pin] = 1.0;
      solution.log_bracket = log_bracket;
      solution.bracket = {std::exp(log_bracket.lower), std::exp(log_bracket.upper)};
      solution.iterations = iteration;
      return solution;
    }
    log_v = log_av.array() - log_av[pin];
  }
  throw ConvergenceError("power iteration did not reach the requested bracket width",
                         {std::exp(log_bracket.lower), std::exp(log_bracket.upper)}, settings.max_iterations);
}

double acoe_residual(const StochasticMatrix& passive, const CostFunction& f, const Vector& h, double lambda) {
  const std::size_t n = passive.size();
  if (f.size() != n || static_cast<std::size_t>(h.size()) != n) {
    throw DimensionError("acoe_residual: dimension mismatch");
  }
  const Vector neg_h = -h;
  double worst = 0.0;
  for (StateIndex x = 0; x < n; ++x) {
    const auto i = static_cast<Eigen::Index>(x);
    const double log_lambda_h = row_log_sum_exp(passive.row(x), neg_h);
    worst = std::max(worst, std::abs(h[i] + lambda - f[x] + log_lambda_h));
  }
  return worst;
}

double acoe_residual(const StochasticMatrix& passive, const CostFunction& f, const MpeSolution& solution) {
  return acoe_residual(passive, f, solution.h, solution.lambda);
}

}  // namespace klmdp
