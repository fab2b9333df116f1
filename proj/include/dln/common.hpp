#pragma once

// float128 has to be visible to Eigen before Eigen/Dense is parsed
#include <boost/multiprecision/float128.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace dln {

using quad = boost::multiprecision::float128;

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// bad arguments: wrong shapes, non-finite data, p < 2, alpha <= 0
struct InvalidInput : Error {
  using Error::Error;
};
// argument outside the domain of a function, e.g. h_p(t) with |t| >= 1
struct DomainError : Error {
  using Error::Error;
};
struct RankDeficient : Error {
  using Error::Error;
};
// iterative solver or integrator failed to converge
struct NumericalFailure : Error {
  using Error::Error;
};
// combinatorial enumeration requested on a problem that is too large
struct SizeError : Error {
  using Error::Error;
};

struct Hyperparams {
  double p = 2.0;
  double alpha = 1.0;
};

inline void validate(const Hyperparams& hp) {
  if (!std::isfinite(hp.p) || hp.p < 2.0)
    throw InvalidInput("p must be finite and >= 2");
  if (!std::isfinite(hp.alpha) || hp.alpha <= 0.0)
    throw InvalidInput("alpha must be finite and > 0");
}

// A is m x N with rank m, y != 0
struct RegressionInstance {
  Eigen::MatrixXd A;
  Eigen::VectorXd y;
  std::string name;
};

// throws InvalidInput or RankDeficient
void validate(const RegressionInstance& inst);
RegressionInstance make_instance(Eigen::MatrixXd A, Eigen::VectorXd y,
                                 std::string name = "");

template <class S>
inline S sign_of(const S& x) {
  return x > 0 ? S(1) : (x < 0 ? S(-1) : S(0));
}

}  // namespace dln
