#include "dln/radau.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dln {

namespace {

const double s6 = std::sqrt(6.0);
const double kA[3][3] = {
    {(88 - 7 * s6) / 360, (296 - 169 * s6) / 1800, (-2 + 3 * s6) / 225},
    {(296 + 169 * s6) / 1800, (88 + 7 * s6) / 360, (-2 - 3 * s6) / 225},
    {(16 - s6) / 36, (16 + s6) / 36, 1.0 / 9}};
const double kDD[3] = {-(13 + 7 * s6) / 3, (-13 + 7 * s6) / 3, -1.0 / 3};
// real eigenvalue of the inverse Butcher matrix
const double kU1 = 30.0 / (6.0 + std::cbrt(81.0) - std::cbrt(9.0));

double rms(const Eigen::VectorXd& v, const Eigen::VectorXd& sc) {
  return std::sqrt((v.array() / sc.array()).square().mean());
}

}  // namespace

RadauStats radau5(const OdeSystem& sys, Eigen::VectorXd y, double t0,
                  const std::vector<double>& times, const RadauOptions& opt,
                  const std::function<void(double, const Eigen::VectorXd&)>& out) {
  const Index n = y.size();
  const double uround = std::numeric_limits<double>::epsilon();
  const double fnewt = std::max(10 * uround / opt.rtol, std::min(0.03, std::sqrt(opt.rtol)));
  RadauStats st;

  Eigen::VectorXd f0(n), f1(n), y1(n), sc(n), sc3(3 * n);
  Eigen::MatrixXd J(n, n), M(3 * n, 3 * n), E1(n, n);
  Eigen::VectorXd Z(3 * n), F(3 * n), G(3 * n), dZ(3 * n), cont(n), F2(n);
  sys.rhs(y, f0);

  double t = t0;
  size_t k = 0;
  while (k < times.size() && times[k] <= t) {
    if (times[k] == t) out(t, y);
    ++k;
  }
  if (k == times.size()) return st;

  double h = opt.h0 > 0 ? opt.h0 : 1e-6 * (times[k] - t);
  bool first = true, reject = false;
  // contraction estimate carried between steps, as in Hairer's RADAU5
  double faccon = 1.0;
  while (k < times.size()) {
    const double t_next = times[k];
    const double remaining = t_next - t;
    const bool hits = h >= remaining;
    const double hs = hits ? remaining : h;
    if (hs <= 10 * uround * std::abs(t) || hs < std::numeric_limits<double>::min()) {
      std::ostringstream os;
      os << "step size underflow at t = " << t;
      throw StepSizeUnderflow(os.str(), t);
    }
    if (st.steps + st.rejected >= opt.max_steps) throw StepSizeUnderflow("step limit reached", t);

    sys.jac(y, J);
    M.setIdentity();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) M.block(i * n, j * n, n, n) -= hs * kA[i][j] * J;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);

    for (Index i = 0; i < n; ++i) sc(i) = opt.atol + opt.rtol * std::abs(y(i));
    for (int b = 0; b < 3; ++b) sc3.segment(b * n, n) = sc;

    Z.setZero();
    bool converged = false;
    int newt = 0;
    double prev = 0.0;
    faccon = std::pow(std::max(faccon, uround), 0.8);
    for (; newt < 12; ++newt) {
      for (int b = 0; b < 3; ++b) {
        y1 = y + Z.segment(b * n, n);
        sys.rhs(y1, f1);
        F.segment(b * n, n) = f1;
      }
      for (int i = 0; i < 3; ++i) {
        G.segment(i * n, n) = Z.segment(i * n, n);
        for (int j = 0; j < 3; ++j) G.segment(i * n, n) -= hs * kA[i][j] * F.segment(j * n, n);
      }
      dZ = -lu.solve(G);
      Z += dZ;
      double nrm = rms(dZ, sc3);
      if (!std::isfinite(nrm)) break;
      if (newt > 0) {
        double theta = nrm / prev;
        if (theta >= 0.99) break;
        faccon = theta / (1 - theta);
      }
      if (faccon * nrm <= fnewt) {
        converged = true;
        ++newt;
        break;
      }
      prev = nrm;
    }
    if (!converged) {
      ++st.newton_failures;
      h = hs * 0.5;
      reject = true;
      continue;
    }

    y1 = y + Z.segment(2 * n, n);
    for (Index i = 0; i < n; ++i)
      sc(i) = opt.atol + opt.rtol * std::max(std::abs(y(i)), std::abs(y1(i)));

    E1 = -J;
    E1.diagonal().array() += kU1 / hs;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu1(E1);
    F2 = (kDD[0] * Z.segment(0, n) + kDD[1] * Z.segment(n, n) + kDD[2] * Z.segment(2 * n, n)) / hs;
    cont = lu1.solve(F2 + f0);
    double err = rms(cont, sc);
    if (err >= 1 && (first || reject)) {
      Eigen::VectorXd yc = y + cont;
      sys.rhs(yc, f1);
      cont = lu1.solve(f1 + F2);
      err = rms(cont, sc);
    }
    if (!std::isfinite(err)) err = 1e10;
    err = std::max(err, 1e-10);

    const double fac = std::min(0.9, 0.9 * (2 * 12 + 1) / (2 * 12 + newt));
    const double quot = std::max(0.125, std::min(5.0, std::pow(err, 0.25) / fac));
    const double hnew = hs / quot;

    if (err < 1) {
      ++st.steps;
      t = hits ? t_next : t + hs;
      y = y1;
      sys.rhs(y, f0);
      first = false;
      reject = false;
      h = hits ? std::max(h, hnew) : hnew;
      if (hits) {
        out(t, y);
        ++k;
      }
      if (opt.stop_if && opt.stop_if(t, y)) {
        st.stopped = true;
        return st;
      }
    } else {
      ++st.rejected;
      h = first ? hs * 0.1 : hnew;
      reject = true;
    }
  }
  return st;
}

}  // namespace dln
