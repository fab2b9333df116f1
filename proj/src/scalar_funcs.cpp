#include "dln/scalar_funcs.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace dln {

double hess_condition_bound(double z_inf, const Hyperparams& hp) {
  double ap = std::pow(hp.alpha, hp.p);
  return 0.5 * std::pow(z_inf / ap + 2.0, (2.0 * hp.p - 2.0) / hp.p);
}

double q_p_quadrature(double u, double p, double tol) {
  double a = std::abs(u);
  if (a == 0.0) return 0.0;
  auto f = [p](double v) { return h_p_inv(v, p); };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, a, 12,
                                                                      tol, &err);
}

}  // namespace dln
