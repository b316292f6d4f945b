#include <algorithm>
#include <cmath>

#include "klmdp/spectral.hpp"

namespace klmdp {

OracleEigenpair eigen_oracle(const StochasticMatrix& passive, const CostFunction& f) {
  const std::size_t n = passive.size();
  if (n > kOracleMaxStates) throw DimensionError("eigen_oracle is limited to 12 states");
  if (f.size() != n) throw DimensionError("eigen_oracle: dimension mismatch");

  Eigen::MatrixXd a = passive.rows();
  for (Eigen::Index x = 0; x < a.rows(); ++x) a.row(x) *= std::exp(-f[static_cast<StateIndex>(x)]);

  // A^(2^64) up to scale; its columns all point along the dominant eigenvector.
  Eigen::MatrixXd power = a;
  for (int k = 0; k < 64; ++k) {
    power = power * power;
    power /= power.maxCoeff();
  }
  Vector v = power.rowwise().sum();
  v /= v[0];

  const Vector ratio = (a * v).cwiseQuotient(v);
  OracleEigenpair out;
  out.v = v;
  out.bracket = {ratio.minCoeff(), ratio.maxCoeff()};
  out.lambda = -std::log(0.5 * (out.bracket.lower + out.bracket.upper));
  return out;
}

}  // namespace klmdp
