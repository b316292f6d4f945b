#pragma once

// Finite-state Markov chain primitives: distributions, kernels, divergences,
// ergodicity diagnostics, invariant laws and sampling.

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "klmdp/error.hpp"
#include "klmdp/random.hpp"

namespace klmdp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using StateIndex = std::size_t;

/// Tolerance on |sum - 1| accepted when constructing distributions and kernels.
inline constexpr double kMassTolerance = 1e-9;

/// The extended-real +infinity used for divergences with a support violation.
/// IEEE arithmetic gives the saturating semantics: inf + x = inf, x < inf.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Finite state space of `n` states with optional unique labels.
class StateSpace {
 public:
  explicit StateSpace(std::size_t n);
  explicit StateSpace(std::vector<std::string> labels);

  std::size_t size() const noexcept { return n_; }
  bool has_labels() const noexcept { return !labels_.empty(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

 private:
  std::size_t n_;
  std::vector<std::string> labels_;
};

/// Probability mass function on {0, ..., n-1}.
class Distribution {
 public:
  /// Validates: finite, nonnegative, sums to 1 within kMassTolerance.
  explicit Distribution(Vector weights);

  /// Rescales nonnegative weights to unit mass. This is the only renormalizing path.
  static Distribution normalized(Vector weights);
  static Distribution point_mass(std::size_t n, StateIndex x);
  static Distribution uniform(std::size_t n);

  std::size_t size() const noexcept { return static_cast<std::size_t>(weights_.size()); }
  const Vector& weights() const noexcept { return weights_; }
  double operator[](StateIndex x) const { return weights_[static_cast<Eigen::Index>(x)]; }
  std::span<const double> span() const noexcept { return {weights_.data(), size()}; }

 private:
  Vector weights_;
};

/// Row-stochastic n x n kernel; row x is the law of the next state from x.
class StochasticMatrix {
 public:
  /// Validates: square, nonempty, finite, nonnegative, rows sum to 1 within kMassTolerance.
  explicit StochasticMatrix(Matrix rows);

  /// Rescales each row of a nonnegative matrix to unit mass. Rows must have positive mass.
  static StochasticMatrix renormalized(Matrix rows);
  static StochasticMatrix identity(std::size_t n);

  std::size_t size() const noexcept { return static_cast<std::size_t>(rows_.rows()); }
  const Matrix& rows() const noexcept { return rows_; }
  double operator()(StateIndex x, StateIndex y) const {
    return rows_(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
  }
  std::span<const double> row(StateIndex x) const;

  /// mu P.
  Distribution propagate(const Distribution& mu) const;

  friend bool operator==(const StochasticMatrix& a, const StochasticMatrix& b) {
    return a.rows_ == b.rows_;
  }

 private:
  Matrix rows_;
};

/// Nonnegative per-state cost.
class CostFunction {
 public:
  /// Validates: finite and nonnegative.
  explicit CostFunction(Vector values);

  static CostFunction zero(std::size_t n) { return CostFunction(Vector::Zero(static_cast<Eigen::Index>(n))); }
  static CostFunction constant(std::size_t n, double c) {
    return CostFunction(Vector::Constant(static_cast<Eigen::Index>(n), c));
  }

  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
  const Vector& values() const noexcept { return values_; }
  double operator[](StateIndex x) const { return values_[static_cast<Eigen::Index>(x)]; }
  double max() const { return values_.maxCoeff(); }

 private:
  Vector values_;
};

struct ErgodicityReport {
  bool irreducible = false;
  bool aperiodic = false;
  double dobrushin = 1.0;
  /// Smallest k with P^k entrywise positive; present iff irreducible and aperiodic.
  std::optional<std::size_t> nbar;
  /// Minimum entry of P^nbar.
  std::optional<double> theta;

  bool ergodic() const noexcept { return irreducible && aperiodic; }
};

/// L1 distance sum_x |mu(x) - nu(x)|, in [0, 2].
double total_variation(const Distribution& mu, const Distribution& nu);
double total_variation(std::span<const double> mu, std::span<const double> nu);

/// D(mu || nu) in nats; kInfinity when supp(mu) is not inside supp(nu).
double kl_divergence(const Distribution& mu, const Distribution& nu);
double kl_divergence(std::span<const double> mu, std::span<const double> nu);

/// max - min. Throws ValidationError on empty input.
double span_seminorm(std::span<const double> f);
double span_seminorm(const Vector& f);
double span_seminorm(const CostFunction& f);

/// One minus the smallest overlap sum_y min(P(x,y), P(x2,y)) of two rows, which
/// is half their largest L1 distance; in [0, 1].
double dobrushin_coefficient(const StochasticMatrix& p);

/// Strong connectivity of the positive-entry digraph.
bool is_irreducible(const StochasticMatrix& p);

/// Every state has period 1 (gcd of its return times). Cheap graph test.
bool is_aperiodic(const StochasticMatrix& p);

/// Full report including the primitivity index nbar and theta = min P^nbar.
ErgodicityReport ergodicity_report(const StochasticMatrix& p);

/// Unique invariant law by a dense linear solve. Throws NotUnichainError.
Distribution invariant_distribution(const StochasticMatrix& p);

/// Inverse-CDF draw from row x.
StateIndex sample_next(const StochasticMatrix& p, StateIndex x, Rng& rng);

/// Inverse-CDF sampler with cumulative rows precomputed; draws coincide with
/// sample_next for the same stream state.
class TransitionSampler {
 public:
  explicit TransitionSampler(const StochasticMatrix& p);

  StateIndex next(StateIndex x, Rng& rng) const;
  std::size_t size() const noexcept { return n_; }

 private:
  std::size_t n_;
  std::vector<double> cumulative_;
  std::vector<StateIndex> last_positive_;
};

}  // namespace klmdp
