#pragma once

#include <functional>
#include <vector>

#include "dln/common.hpp"

namespace dln {

// Autonomous system y' = f(y) with Jacobian df/dy
struct OdeSystem {
  std::function<void(const Eigen::VectorXd& y, Eigen::VectorXd& f)> rhs;
  std::function<void(const Eigen::VectorXd& y, Eigen::MatrixXd& J)> jac;
};

struct RadauOptions {
  double rtol = 1e-10;
  double atol = 1e-14;
  double h0 = 0.0;  // 0 picks a small multiple of the first output interval
  long max_steps = 2000000;
  // return true to stop after an accepted step (e.g. blow-up detection)
  std::function<bool(double t, const Eigen::VectorXd& y)> stop_if;
};

struct RadauStats {
  long steps = 0;
  long rejected = 0;
  long newton_failures = 0;
  bool stopped = false;  // stop_if fired
};

// Step-size underflow or Newton breakdown; `t` is where integration stalled.
struct StepSizeUnderflow : NumericalFailure {
  double t;
  StepSizeUnderflow(const std::string& msg, double t_) : NumericalFailure(msg), t(t_) {}
};

// Three-stage Radau IIA (order 5) with Hairer's embedded error estimate.
// Steps land exactly on every requested output time; `out` is called there.
RadauStats radau5(const OdeSystem& sys, Eigen::VectorXd y, double t0,
                  const std::vector<double>& times, const RadauOptions& opt,
                  const std::function<void(double, const Eigen::VectorXd&)>& out);

}  // namespace dln
