#pragma once

// Test-only reference implementations. These deliberately avoid the library's
// own algorithms: naive matrix powers, Floyd-Warshall, closed-form 2x2 algebra.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "klmdp/chains.hpp"
#include "klmdp/world.hpp"

namespace oracle {

using klmdp::Matrix;
using klmdp::Vector;

inline Matrix matrix_power(const Matrix& p, std::size_t k) {
  Matrix out = Matrix::Identity(p.rows(), p.cols());
  for (std::size_t i = 0; i < k; ++i) out = out * p;
  return out;
}

/// Dominant eigenvalue of [[a, b], [c, d]] with nonnegative entries.
inline double dominant_eigenvalue_2x2(double a, double b, double c, double d) {
  const double tr = a + d;
  const double det = a * d - b * c;
  return 0.5 * (tr + std::sqrt(tr * tr - 4.0 * det));
}

/// Largest real part among the eigenvalues of a dense matrix, via Eigen's
/// general (QR-based) solver.
inline double perron_root(const Matrix& a) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(Eigen::MatrixXd(a), false);
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    best = std::max(best, solver.eigenvalues()[i].real());
  }
  return best;
}

/// All-pairs hop counts by Floyd-Warshall.
inline std::vector<std::vector<std::size_t>> floyd_distances(const klmdp::Graph& g) {
  const std::size_t n = g.size();
  const std::size_t inf = std::numeric_limits<std::size_t>::max() / 4;
  std::vector<std::vector<std::size_t>> d(n, std::vector<std::size_t>(n, inf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
  for (const auto& [u, v] : g.edges()) d[u][v] = d[v][u] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

/// Random irreducible, aperiodic kernel: every row keeps its self-loop and the
/// edge to x + 1 (mod n); other entries are present with probability `density`.
inline klmdp::StochasticMatrix random_ergodic_kernel(std::size_t n, std::mt19937_64& rng, double density = 0.5) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      const bool forced = y == x || y == (x + 1) % n;
      if (forced || u(rng) < density) m(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = 0.05 + u(rng);
    }
  }
  return klmdp::StochasticMatrix::renormalized(m);
}

inline Vector random_vector(std::size_t n, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = u(rng);
  return v;
}

inline double span(const Vector& v) { return v.maxCoeff() - v.minCoeff(); }

/// Row x of the twisted kernel by plain exponentials (no log-domain tricks).
inline std::vector<double> naive_twisted_row(const klmdp::StochasticMatrix& p, const Vector& phi, std::size_t x) {
  const std::size_t n = p.size();
  std::vector<double> row(n);
  double z = 0.0;
  for (std::size_t y = 0; y < n; ++y) {
    row[y] = p(x, y) * std::exp(-phi[static_cast<Eigen::Index>(y)]);
    z += row[y];
  }
  for (auto& r : row) r /= z;
  return row;
}

/// Sum of mu log(mu / nu) by direct summation.
inline double naive_kl(const std::vector<double>& mu, std::span<const double> nu) {
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] > 0.0) s += mu[i] * std::log(mu[i] / nu[i]);
  }
  return s;
}

}  // namespace oracle
