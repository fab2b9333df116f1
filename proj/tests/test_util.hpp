#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "dln/common.hpp"

namespace testutil {

inline Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd M(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) M(i, j) = n(rng);
  return M;
}

inline Eigen::VectorXd random_vector(Eigen::Index n, std::mt19937_64& rng) {
  return random_matrix(n, 1, rng);
}

inline double max_abs(const Eigen::MatrixXd& M) { return M.cwiseAbs().maxCoeff(); }

}  // namespace testutil

namespace testutil {

// smallest l1 norm over all basic solutions A_J x_J = y, |J| = m
inline double brute_force_bp(const Eigen::MatrixXd& A, const Eigen::VectorXd& y) {
  const Eigen::Index m = A.rows(), n = A.cols();
  double best = INFINITY;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != m) continue;
    Eigen::MatrixXd AJ(m, m);
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (mask >> j & 1) AJ.col(k++) = A.col(j);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(AJ);
    if (!lu.isInvertible()) continue;
    best = std::min(best, lu.solve(y).lpNorm<1>());
  }
  return best;
}

}  // namespace testutil
