#pragma once

#include <limits>

#include "dln/common.hpp"

namespace dln {

namespace detail {

using std::abs;
using std::asinh;
using std::exp;
using std::expm1;
using std::log;
using std::log1p;
using std::pow;
using std::sinh;
using std::cosh;
using std::sqrt;

template <class S>
S eps_of() {
  return std::numeric_limits<S>::epsilon();
}

// t = h_p^{-1}(|u|) >= 0 together with its complement c = 1 - t (p > 2)
template <class S>
struct InvPoint {
  S t;
  S c;
};

// (1-t)^{-k} - (1+t)^{-k} without cancellation near t = 0
template <class S>
S h_raw(const S& t, const S& k) {
  return expm1(-k * log1p(-t)) - expm1(-k * log1p(t));
}

template <class S>
InvPoint<S> inv_small(const S& a, const S& k) {
  // h is convex and increasing on [0,1), so Newton from the upper bound
  // a / h'(0) decreases monotonically onto the root
  S hi = a / (2 * k);
  S lo = 0;
  S t = hi;
  for (int it = 0; it < 200; ++it) {
    S f = h_raw(t, k) - a;
    if (f > 0)
      hi = t;
    else
      lo = t;
    S d = k * (pow(1 - t, -k - 1) + pow(1 + t, -k - 1));
    S tn = t - f / d;
    if (!(tn > lo && tn < hi)) tn = (lo + hi) / 2;
    if (abs(tn - t) <= 2 * eps_of<S>() * t) {
      t = tn;
      break;
    }
    t = tn;
  }
  return {t, 1 - t};
}

template <class S>
InvPoint<S> inv_large(const S& a, const S& k) {
  // fixed-point form c = (a + (2-c)^{-k})^{-1/k}; Newton on c - psi(c),
  // whose slope stays in [1, 2] for a >= 1
  S lo = pow(a + 1, -1 / k);
  S hi = pow(a, -1 / k);
  if (hi > 1) hi = 1;
  S c = lo;
  for (int it = 0; it < 200; ++it) {
    S inner = a + pow(2 - c, -k);
    S psi = pow(inner, -1 / k);
    S dpsi = -pow(inner, -1 / k - 1) * pow(2 - c, -k - 1);
    S phi = c - psi;
    if (phi > 0)
      hi = c;
    else
      lo = c;
    S cn = c - phi / (1 - dpsi);
    if (!(cn >= lo && cn <= hi)) cn = (lo + hi) / 2;
    if (abs(cn - c) <= 2 * eps_of<S>() * c) {
      c = cn;
      break;
    }
    c = cn;
  }
  return {1 - c, c};
}

template <class S>
InvPoint<S> inv_point(const S& u, double p) {
  S a = abs(u);
  if (a == 0) return {S(0), S(1)};
  S k = S(p) / (S(p) - 2);
  return a < 1 ? inv_small(a, k) : inv_large(a, k);
}

// integral of h_p over [0, t], t >= 0, p > 2
template <class S>
S h_integral(const S& t, const S& k) {
  S a = k - 1;
  if (t < S(0.1)) {
    // 2/a * sum over even n of binom(a+n-1, n) t^n
    S coef = 1;
    S sum = 0;
    S tp = 1;
    for (int n = 1; n < 400; ++n) {
      coef *= (a + n - 1) / n;
      tp *= t;
      if (n % 2 == 0) {
        S term = coef * tp;
        sum += term;
        if (term <= eps_of<S>() * sum) break;
      }
    }
    return 2 * sum / a;
  }
  return (pow(1 - t, -a) + pow(1 + t, -a) - 2) / a;
}

}  // namespace detail

template <class S>
S h_p(const S& t, double p) {
  using detail::sinh;
  using detail::abs;
  if (p == 2.0) return 2 * sinh(t);
  if (!(abs(t) < 1)) throw DomainError("h_p requires |t| < 1 for p > 2");
  S k = S(p) / (S(p) - 2);
  return detail::h_raw(t, k);
}

template <class S>
S h_p_prime(const S& t, double p) {
  using detail::cosh;
  using detail::abs;
  using detail::pow;
  if (p == 2.0) return 2 * cosh(t);
  if (!(abs(t) < 1)) throw DomainError("h_p requires |t| < 1 for p > 2");
  S k = S(p) / (S(p) - 2);
  return k * (pow(1 - t, -k - 1) + pow(1 + t, -k - 1));
}

template <class S>
S h_p_inv(const S& u, double p) {
  using detail::asinh;
  if (p == 2.0) return asinh(u / 2);
  auto ip = detail::inv_point(u, p);
  return u < 0 ? S(-ip.t) : ip.t;
}

// 1 - |h_p^{-1}(u)| computed without cancellation (p > 2)
template <class S>
S h_p_inv_complement(const S& u, double p) {
  if (p == 2.0) throw DomainError("complement is only defined for p > 2");
  return detail::inv_point(u, p).c;
}

template <class S>
S q_p(const S& u, double p) {
  using detail::abs;
  using detail::asinh;
  using detail::sqrt;
  if (p == 2.0) return u * asinh(u / 2) - u * u / (2 + sqrt(u * u + 4));
  auto ip = detail::inv_point(u, p);
  S k = S(p) / (S(p) - 2);
  return abs(u) * ip.t - detail::h_integral(ip.t, k);
}

template <class S>
S q_p_prime(const S& u, double p) {
  return h_p_inv(u, p);
}

template <class S>
S q_p_second(const S& u, double p) {
  using detail::pow;
  using detail::sqrt;
  if (p == 2.0) return 1 / sqrt(u * u + 4);
  auto ip = detail::inv_point(u, p);
  S k = S(p) / (S(p) - 2);
  return 1 / (k * (pow(ip.c, -k - 1) + pow(2 - ip.c, -k - 1)));
}

template <class S>
S g_p(const S& u, double p) {
  using detail::abs;
  using detail::log;
  using detail::pow;
  S a = abs(u);
  if (a == 0) return S(0);
  if (p == 2.0) return a * (log(a) - 1);
  return a - S(p) / 2 * pow(a, 2 / S(p));
}

template <class S>
S g_p_prime(const S& u, double p) {
  using detail::abs;
  using detail::log;
  using detail::pow;
  if (u == 0) throw DomainError("g_p' is unbounded at 0");
  S a = abs(u);
  S v = p == 2.0 ? S(log(a)) : S(1 - pow(a, 2 / S(p) - 1));
  return u < 0 ? S(-v) : v;
}

template <class S>
S alpha_pow(const Hyperparams& hp) {
  using detail::pow;
  return pow(S(hp.alpha), S(hp.p));
}

template <class S>
S Q_p(const Vec<S>& z, const Hyperparams& hp) {
  S ap = alpha_pow<S>(hp);
  S sum = 0;
  for (Index i = 0; i < z.size(); ++i) sum += q_p(S(z(i) / ap), hp.p);
  return ap * sum;
}

template <class S>
Vec<S> grad_Q_p(const Vec<S>& z, const Hyperparams& hp) {
  S ap = alpha_pow<S>(hp);
  Vec<S> g(z.size());
  for (Index i = 0; i < z.size(); ++i) g(i) = h_p_inv(S(z(i) / ap), hp.p);
  return g;
}

template <class S>
Vec<S> hess_Q_p_diag(const Vec<S>& z, const Hyperparams& hp) {
  S ap = alpha_pow<S>(hp);
  Vec<S> d(z.size());
  for (Index i = 0; i < z.size(); ++i) d(i) = q_p_second(S(z(i) / ap), hp.p) / ap;
  return d;
}

template <class S>
S G_p(const Vec<S>& z, const Hyperparams& hp) {
  S ap = alpha_pow<S>(hp);
  S sum = 0;
  for (Index i = 0; i < z.size(); ++i) sum += g_p(S(z(i) / ap), hp.p);
  return ap * sum;
}

// componentwise g_p'(z_i / alpha^p); every z_i must be non-zero
template <class S>
Vec<S> grad_G_p(const Vec<S>& z, const Hyperparams& hp) {
  S ap = alpha_pow<S>(hp);
  Vec<S> g(z.size());
  for (Index i = 0; i < z.size(); ++i) g(i) = g_p_prime(S(z(i) / ap), hp.p);
  return g;
}

// kappa bound on the Hessian of Q_p: 0.5 * (|z|_inf / alpha^p + 2)^((2p-2)/p)
double hess_condition_bound(double z_inf, const Hyperparams& hp);

// q_p by adaptive Gauss-Kronrod quadrature of h_p^{-1} over [0, u]
double q_p_quadrature(double u, double p, double tol = 1e-12);

}  // namespace dln
