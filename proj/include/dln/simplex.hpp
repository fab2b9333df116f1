#pragma once

#include <vector>

#include "dln/common.hpp"

namespace dln {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Eigen::VectorXd x;
  double value = 0.0;
  std::vector<Index> basis;  // basic columns of the final tableau, one per kept row
};

// min c'x  s.t.  A x = b, x >= 0.  Dense two-phase tableau with Bland's rule.
LpResult simplex(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                 const Eigen::VectorXd& c);

}  // namespace dln
