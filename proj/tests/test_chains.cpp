#include <doctest.h>

#include <cmath>
#include <random>

#include "klmdp/chains.hpp"
#include "oracles.hpp"

using namespace klmdp;

namespace {

Distribution dist(std::initializer_list<double> w) {
  Vector v(static_cast<Eigen::Index>(w.size()));
  Eigen::Index i = 0;
  for (double x : w) v[i++] = x;
  return Distribution(v);
}

StochasticMatrix kernel(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double x : r) m(i, j++) = x;
    ++i;
  }
  return StochasticMatrix(m);
}

}  // namespace

TEST_CASE("state space and construction checks") {
  CHECK(StateSpace(3).size() == 3);
  CHECK_THROWS_AS(StateSpace(0), ValidationError);
  CHECK(StateSpace({"a", "b"}).has_labels());
  CHECK_THROWS_AS(StateSpace({"a", "a"}), ValidationError);

  CHECK_THROWS_AS(dist({0.5, 0.6}), ValidationError);
  CHECK_THROWS_AS(dist({1.5, -0.5}), ValidationError);
  CHECK_NOTHROW(dist({0.5, 0.5 + 1e-10}));
  CHECK(Distribution::normalized(Vector::Constant(4, 3.0))[2] == doctest::Approx(0.25));

  CHECK_THROWS_AS(kernel({{0.5, 0.4}, {0.5, 0.5}}), ValidationError);
  CHECK_THROWS_AS(StochasticMatrix(Matrix::Zero(2, 3)), ValidationError);
  Matrix raw(2, 2);
  raw << 1, 3, 2, 2;
  const auto r = StochasticMatrix::renormalized(raw);
  CHECK(r(0, 1) == doctest::Approx(0.75));
  CHECK(r(1, 0) == doctest::Approx(0.5));

  CHECK_THROWS_AS(CostFunction(Vector::Constant(2, -1.0)), ValidationError);
}

TEST_CASE("total variation") {
  CHECK(total_variation(dist({1, 0}), dist({0, 1})) == 2.0);
  const auto mu = dist({0.2, 0.3, 0.5});
  CHECK(total_variation(mu, mu) == 0.0);
  CHECK(total_variation(dist({0.5, 0.5}), dist({0.25, 0.75})) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(total_variation(dist({1, 0}), dist({1, 0, 0})), DimensionError);
}

TEST_CASE("kl divergence") {
  const auto mu = dist({0.2, 0.3, 0.5});
  CHECK(kl_divergence(mu, mu) == 0.0);
  CHECK(kl_divergence(dist({1, 0}), dist({0, 1})) == kInfinity);
  const double expected = 0.5 * std::log(0.5 / 0.25) + 0.5 * std::log(0.5 / 0.75);
  CHECK(expected == doctest::Approx(0.5 * std::log(4.0 / 3.0)).epsilon(1e-14));
  CHECK(kl_divergence(dist({0.5, 0.5}), dist({0.25, 0.75})) == doctest::Approx(0.143841).epsilon(1e-6));
  CHECK(kl_divergence(dist({0.5, 0.5}), dist({0.25, 0.75})) == doctest::Approx(expected).epsilon(1e-14));
  // zero mass in mu contributes nothing, even against zero mass in nu
  CHECK(kl_divergence(dist({1, 0}), dist({0.5, 0.5})) == doctest::Approx(std::log(2.0)));
  CHECK(kl_divergence(dist({1, 0}), dist({1, 0})) == 0.0);
  CHECK_THROWS_AS(kl_divergence(dist({1, 0}), dist({1, 0, 0})), DimensionError);
}

TEST_CASE("span seminorm") {
  CHECK(span_seminorm(Vector{{1.0, 3.0, 2.0}}) == 2.0);
  CHECK(span_seminorm(Vector::Constant(5, 0.7)) == 0.0);
  CHECK(span_seminorm(Vector{{0.0, std::log(2.0)}}) == doctest::Approx(0.693147).epsilon(1e-6));
  CHECK_THROWS_AS(span_seminorm(Vector()), ValidationError);

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Vector f = oracle::random_vector(6, rng, -3.0, 3.0);
    const double c = oracle::random_vector(1, rng, -10.0, 10.0)[0];
    CHECK(span_seminorm(Vector(f.array() + c)) == doctest::Approx(span_seminorm(f)).epsilon(1e-12));
    CHECK(span_seminorm(f) <= 2.0 * f.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("dobrushin coefficient") {
  CHECK(dobrushin_coefficient(kernel({{0.3, 0.7}, {0.3, 0.7}})) == 0.0);
  CHECK(dobrushin_coefficient(StochasticMatrix::identity(2)) == 1.0);
  CHECK(dobrushin_coefficient(kernel({{0.5, 0.5}, {0.25, 0.75}})) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("contraction and Pinsker over random pairs") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + trial % 6;
    const auto p = oracle::random_ergodic_kernel(n, rng, 0.4);
    const double alpha = dobrushin_coefficient(p);
    CHECK(alpha >= 0.0);
    CHECK(alpha <= 1.0);
    const auto mu = Distribution::normalized(oracle::random_vector(n, rng, 0.0, 1.0));
    const auto nu = Distribution::normalized(oracle::random_vector(n, rng, 0.0, 1.0));
    CHECK(total_variation(p.propagate(mu), p.propagate(nu)) <= alpha * total_variation(mu, nu) + 1e-12);
    const double kl = kl_divergence(mu, nu);
    if (std::isfinite(kl)) CHECK(total_variation(mu, nu) <= std::sqrt(2.0 * kl) + 1e-12);
  }
}

TEST_CASE("ergodicity report") {
  const auto swap = ergodicity_report(kernel({{0, 1}, {1, 0}}));
  CHECK(swap.irreducible);
  CHECK_FALSE(swap.aperiodic);
  CHECK_FALSE(swap.nbar.has_value());
  CHECK_FALSE(swap.theta.has_value());

  const auto flat = ergodicity_report(kernel({{0.5, 0.5}, {0.5, 0.5}}));
  CHECK(flat.ergodic());
  CHECK(flat.nbar == std::optional<std::size_t>(1));
  CHECK(*flat.theta == 0.5);

  const auto path = kernel({{0.5, 0.5, 0}, {0.25, 0.5, 0.25}, {0, 0.5, 0.5}});
  const auto report = ergodicity_report(path);
  CHECK(report.nbar == std::optional<std::size_t>(2));
  CHECK(*report.theta == doctest::Approx(oracle::matrix_power(path.rows(), 2).minCoeff()).epsilon(1e-15));
  CHECK(*report.theta == doctest::Approx(0.125));

  const auto reducible = ergodicity_report(StochasticMatrix::identity(3));
  CHECK_FALSE(reducible.irreducible);
  CHECK_FALSE(reducible.nbar.has_value());

  // Wielandt extremal chain: a 4-cycle with one chord needs the full n^2 - 2n + 2 = 10
  const auto wielandt = kernel({{0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}, {0.5, 0.5, 0, 0}});
  const auto wr = ergodicity_report(wielandt);
  CHECK(wr.ergodic());
  CHECK(wr.nbar == std::optional<std::size_t>(10));

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const auto p = oracle::random_ergodic_kernel(n, rng, 0.2);
    const auto r = ergodicity_report(p);
    REQUIRE(r.nbar.has_value());
    CHECK(oracle::matrix_power(p.rows(), *r.nbar).minCoeff() == doctest::Approx(*r.theta).epsilon(1e-12));
    CHECK(*r.theta > 0.0);
    if (*r.nbar > 1) CHECK(oracle::matrix_power(p.rows(), *r.nbar - 1).minCoeff() == 0.0);
  }
}

TEST_CASE("invariant distribution") {
  const auto rank_one = kernel({{0.2, 0.3, 0.5}, {0.2, 0.3, 0.5}, {0.2, 0.3, 0.5}});
  const auto pi1 = invariant_distribution(rank_one);
  CHECK(pi1[0] == doctest::Approx(0.2));
  CHECK(pi1[2] == doctest::Approx(0.5));

  const auto symmetric = kernel({{0.5, 0.3, 0.2}, {0.3, 0.4, 0.3}, {0.2, 0.3, 0.5}});
  const auto pi2 = invariant_distribution(symmetric);
  for (StateIndex x = 0; x < 3; ++x) CHECK(pi2[x] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  const auto pi3 = invariant_distribution(kernel({{0.9, 0.1}, {0.5, 0.5}}));
  CHECK(pi3[0] == doctest::Approx(5.0 / 6.0).epsilon(1e-14));
  CHECK(pi3[1] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));

  CHECK_THROWS_AS(invariant_distribution(StochasticMatrix::identity(2)), NotUnichainError);

  // unichain with a transient state is accepted
  const auto transient = invariant_distribution(kernel({{0.5, 0.5, 0}, {0, 0.5, 0.5}, {0, 0.5, 0.5}}));
  CHECK(transient[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(transient[1] == doctest::Approx(0.5));

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = oracle::random_ergodic_kernel(2 + trial % 9, rng, 0.3);
    const auto pi = invariant_distribution(p);
    CHECK(total_variation(p.propagate(pi), pi) <= 1e-10);
  }
}

TEST_CASE("sampling") {
  const auto p = kernel({{0, 0, 1}, {0.25, 0.75, 0}, {0.2, 0.3, 0.5}});
  Rng rng(99);
  for (int i = 0; i < 100; ++i) CHECK(sample_next(p, 0, rng) == 2);

  Rng a(1234);
  Rng b(1234);
  for (int i = 0; i < 100; ++i) CHECK(sample_next(p, 2, a) == sample_next(p, 2, b));

  const TransitionSampler sampler(p);
  Rng c(77);
  Rng d(77);
  for (int i = 0; i < 10000; ++i) {
    const StateIndex x = static_cast<StateIndex>(i % 3);
    CHECK(sampler.next(x, c) == sample_next(p, x, d));
  }

  Rng e(2024);
  std::size_t ones = 0;
  std::size_t outside = 0;
  const std::size_t draws = 1000000;
  for (std::size_t i = 0; i < draws; ++i) {
    const StateIndex y = sampler.next(1, e);
    outside += y > 1;
    ones += y == 1;
  }
  CHECK(outside == 0);
  const double freq = static_cast<double>(ones) / static_cast<double>(draws);
  CHECK(std::abs(freq - 0.75) <= 0.005);

  CHECK_THROWS_AS(sample_next(p, 3, rng), DimensionError);
}

TEST_CASE("seed splitting") {
  CHECK(split_seed(1, 0) != split_seed(1, 1));
  CHECK(split_seed(1, 0) != split_seed(2, 0));
  CHECK(split_seed(42, 7) == split_seed(42, 7));
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double u = uniform01(rng);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}
