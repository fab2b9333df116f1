#include "dln/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dln/linalg.hpp"
#include "dln/radau.hpp"

namespace dln {

void validate(const RegressionInstance& inst) {
  const auto& A = inst.A;
  if (A.rows() < 1 || A.cols() < 1) throw InvalidInput("A must be non-empty");
  if (inst.y.size() != A.rows()) throw InvalidInput("y must have one entry per row of A");
  if (!A.allFinite() || !inst.y.allFinite()) throw InvalidInput("A and y must be finite");
  if (A.rows() > A.cols()) throw InvalidInput("expected an underdetermined system, m <= N");
  if (inst.y.norm() == 0.0) throw InvalidInput("y must be non-zero");
  auto sv = svd_summary<double>(A);
  if (sv.rank < A.rows())
    throw RankDeficient("rank(A) < m; reduce the system with reduce_rank_deficient first");
}

RegressionInstance make_instance(Eigen::MatrixXd A, Eigen::VectorXd y, std::string name) {
  RegressionInstance inst{std::move(A), std::move(y), std::move(name)};
  validate(inst);
  return inst;
}

namespace {

// sign(x) |x|^q
inline double spow(double x, double q) {
  if (q == 1.0) return x;
  if (q == 2.0) return x * std::abs(x);
  double a = std::pow(std::abs(x), q);
  return x < 0 ? -a : a;
}

inline double apow(double x, double q) {
  if (q == 2.0) return x * x;
  if (q == 0.0) return 1.0;
  return std::pow(std::abs(x), q);
}

Eigen::VectorXd residual_grad(const DlnParams& th, const RegressionInstance& inst, double p) {
  Eigen::VectorXd psi = psi_of(th, p);
  return inst.A.transpose() * (inst.A * psi - inst.y);
}

}  // namespace

DlnParams initial_params(Index n, double alpha) {
  return {Eigen::VectorXd::Constant(n, alpha), Eigen::VectorXd::Constant(n, alpha)};
}

Eigen::VectorXd psi_of(const DlnParams& th, double p) {
  Eigen::VectorXd psi(th.plus.size());
  for (Index i = 0; i < psi.size(); ++i) psi(i) = apow(th.plus(i), p) - apow(th.minus(i), p);
  return psi;
}

double loss(const DlnParams& th, const RegressionInstance& inst, double p) {
  return 0.5 * (inst.A * psi_of(th, p) - inst.y).squaredNorm();
}

DlnParams grad_loss(const DlnParams& th, const RegressionInstance& inst, double p) {
  Eigen::VectorXd r = residual_grad(th, inst, p);
  DlnParams g{Eigen::VectorXd(r.size()), Eigen::VectorXd(r.size())};
  for (Index i = 0; i < r.size(); ++i) {
    g.plus(i) = p * spow(th.plus(i), p - 1) * r(i);
    g.minus(i) = -p * spow(th.minus(i), p - 1) * r(i);
  }
  return g;
}

Eigen::MatrixXd hess_loss(const DlnParams& th, const RegressionInstance& inst, double p) {
  const Index n = th.plus.size();
  Eigen::VectorXd r = residual_grad(th, inst, p);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(2 * n, n);
  for (Index i = 0; i < n; ++i) {
    G(i, i) = p * spow(th.plus(i), p - 1);
    G(n + i, i) = -p * spow(th.minus(i), p - 1);
  }
  Eigen::MatrixXd AtA = inst.A.transpose() * inst.A;
  Eigen::MatrixXd H = G * AtA * G.transpose();
  for (Index i = 0; i < n; ++i) {
    H(i, i) += p * (p - 1) * apow(th.plus(i), p - 2) * r(i);
    H(n + i, n + i) -= p * (p - 1) * apow(th.minus(i), p - 2) * r(i);
  }
  return H;
}

TraceSample make_sample(double t, const DlnParams& theta, const RegressionInstance& inst,
                        double p) {
  TraceSample s;
  s.t = t;
  s.theta = theta;
  s.psi = psi_of(theta, p);
  s.residual = (inst.A * s.psi - inst.y).norm();
  return s;
}

FlowTrace gd_run(const RegressionInstance& inst, const Hyperparams& hp, double eta, long J,
                 long record_every) {
  validate(hp);
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidInput("eta must be positive");
  if (J < 0) throw InvalidInput("J must be non-negative");
  const double p = hp.p;
  const Index n = inst.A.cols(), m = inst.A.rows();
  if (record_every <= 0) record_every = std::max(1L, J / 2000);

  DlnParams th = initial_params(n, hp.alpha);
  FlowTrace tr;
  tr.samples.push_back(make_sample(0.0, th, inst, p));
  Eigen::VectorXd psi(n), res(m), r(n);
  for (long k = 0; k < J; ++k) {
    for (Index i = 0; i < n; ++i) psi(i) = apow(th.plus(i), p) - apow(th.minus(i), p);
    res.noalias() = inst.A * psi;
    res -= inst.y;
    r.noalias() = inst.A.transpose() * res;
    bool bad = false;
    for (Index i = 0; i < n; ++i) {
      double gp = p * spow(th.plus(i), p - 1) * r(i);
      double gm = -p * spow(th.minus(i), p - 1) * r(i);
      th.plus(i) -= eta * gp;
      th.minus(i) -= eta * gm;
      if (!(std::abs(th.plus(i)) <= kDivergenceLimit) ||
          !(std::abs(th.minus(i)) <= kDivergenceLimit))
        bad = true;
    }
    tr.steps = k + 1;
    if (bad) {
      tr.status = RunStatus::diverged;
      tr.samples.push_back(make_sample(double(k + 1) * eta, th, inst, p));
      return tr;
    }
    if ((k + 1) % record_every == 0 || k + 1 == J)
      tr.samples.push_back(make_sample(double(k + 1) * eta, th, inst, p));
  }
  return tr;
}

std::vector<double> geometric_times(double t_end, int per_decade, int decades) {
  std::vector<double> ts{0.0};
  if (!(t_end > 0.0)) return ts;
  const int count = per_decade * decades;
  for (int i = 0; i <= count; ++i)
    ts.push_back(i == count ? t_end : t_end * std::pow(10.0, double(i - count) / per_decade));
  return ts;
}

double default_atol(const Hyperparams& hp, double rtol) {
  double a = std::min(1.0, hp.alpha);
  return rtol * 1e-4 * a * a;
}

FlowTrace flow_run(const RegressionInstance& inst, const Hyperparams& hp, double t_end,
                   double rtol, double atol, std::vector<double> times) {
  validate(inst);
  validate(hp);
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InvalidInput("t_end must be >= 0");
  if (!(rtol > 0.0) || !(atol > 0.0)) throw InvalidInput("tolerances must be positive");
  if (times.empty()) times = geometric_times(t_end);
  if (!std::is_sorted(times.begin(), times.end()) ||
      std::adjacent_find(times.begin(), times.end()) != times.end() || times.front() < 0.0)
    throw InvalidInput("sample times must be non-negative and strictly increasing");

  const double p = hp.p;
  const Index n = inst.A.cols();
  auto split = [n](const Eigen::VectorXd& y) {
    return DlnParams{y.head(n), y.tail(n)};
  };
  OdeSystem sys;
  sys.rhs = [&](const Eigen::VectorXd& y, Eigen::VectorXd& f) {
    DlnParams g = grad_loss(split(y), inst, p);
    f.head(n) = -g.plus;
    f.tail(n) = -g.minus;
  };
  sys.jac = [&](const Eigen::VectorXd& y, Eigen::MatrixXd& J) { J = -hess_loss(split(y), inst, p); };

  FlowTrace tr;
  Eigen::VectorXd y0 = Eigen::VectorXd::Constant(2 * n, hp.alpha);
  RadauOptions opt;
  opt.rtol = rtol;
  opt.atol = atol;
  opt.stop_if = [&](double t, const Eigen::VectorXd& y) {
    if (y.cwiseAbs().maxCoeff() <= kDivergenceLimit) return false;
    if (tr.samples.empty() || tr.samples.back().t < t)
      tr.samples.push_back(make_sample(t, split(y), inst, p));
    return true;
  };
  auto out = [&](double t, const Eigen::VectorXd& y) {
    tr.samples.push_back(make_sample(t, split(y), inst, p));
  };
  try {
    RadauStats st = radau5(sys, y0, 0.0, times, opt, out);
    tr.steps = st.steps;
    if (st.stopped) tr.status = RunStatus::diverged;
  } catch (const StepSizeUnderflow& e) {
    throw IntegrationFailure(e.what(), std::move(tr));
  }
  return tr;
}

InvariantReport flow_invariant_defect(const FlowTrace& trace, const Hyperparams& hp) {
  validate(hp);
  const double p = hp.p, a = hp.alpha, ap = std::pow(a, p);
  InvariantReport rep;
  for (const auto& s : trace.samples) {
    double worst = 0.0;
    for (Index i = 0; i < s.theta.plus.size(); ++i) {
      double tp = s.theta.plus(i), tm = s.theta.minus(i);
      double d;
      if (p == 2.0) {
        d = std::abs(tp * tm - a * a) / (a * a);
      } else {
        double target = 2.0 * std::pow(a, 2.0 - p);
        d = std::abs(std::pow(tp, 2.0 - p) + std::pow(tm, 2.0 - p) - target) / target;
      }
      if (!std::isfinite(d)) d = std::numeric_limits<double>::infinity();
      worst = std::max(worst, d);
    }
    rep.per_sample.push_back(worst);
    rep.max_defect = std::max(rep.max_defect, worst);

    double th_inf = std::max(s.theta.plus.cwiseAbs().maxCoeff(), s.theta.minus.cwiseAbs().maxCoeff());
    double rhs = s.psi.cwiseAbs().maxCoeff() + ap;
    double excess = (std::pow(th_inf, p) - rhs) / rhs;
    rep.theta_bound_excess = std::max(rep.theta_bound_excess, excess);
  }
  rep.theta_bound_ok = rep.theta_bound_excess <= 1e-9;
  return rep;
}

BoundBundle bounds(const RegressionInstance& inst, const Hyperparams& hp, double t, double eps,
                   const AssumedConstants& assumed) {
  validate(hp);
  if (!(eps > 0.0)) throw InvalidInput("eps must be positive");
  if (!(t >= 0.0)) throw InvalidInput("t must be >= 0");
  if (inst.y.size() != inst.A.rows()) throw InvalidInput("shape mismatch");
  auto sv = svd_summary<double>(inst.A);
  if (sv.rank < inst.A.rows())
    throw RankDeficient("sigma_min below tolerance; reduce the system with reduce_rank_deficient");

  const double p = hp.p, a = hp.alpha, ap = std::pow(a, p);
  BoundBundle b;
  b.N = inst.A.cols();
  b.sigma_min = sv.sigma_min;
  b.op_norm = sv.op_norm;
  b.y_norm = inst.y.norm();
  const double sN = std::sqrt(double(b.N));
  const double s = b.sigma_min, A2 = b.op_norm * b.op_norm, yn = b.y_norm;

  b.psi_inf_bound = 2.0 * sN * yn / s;
  b.K1 = ap * std::pow(b.psi_inf_bound / ap + 2.0, (3.0 * p - 2.0) / p);
  b.K2 = 2.0 * p * p * s * s * std::pow(a, 2.0 * p - 2.0);
  b.M = b.psi_inf_bound + ap;
  b.C1_grad = 40.0 * p * sN * A2 * std::pow(b.M, (2.0 * p - 1.0) / p);
  b.C2_hess = 50.0 * p * p * sN * A2 * std::pow(b.M, (2.0 * p - 2.0) / p);
  b.log_eta_max = std::log(std::min(eps, a / p)) - std::log(b.C1_grad) - b.C2_hess * t;
  b.eta_max = std::exp(b.log_eta_max);

  b.K_cap = std::pow(b.M, 1.0 / p);
  const double K = b.K_cap;
  b.eps_hat = std::min(K, eps / (std::pow(2.0, p) * p * double(b.N) * std::pow(K, p - 1.0)));
  b.log_eta_psi = std::log(std::min(b.eps_hat, a / p)) - std::log(b.C1_grad) - b.C2_hess * t;
  b.eta_psi = std::exp(b.log_eta_psi);

  b.U_alpha = std::pow(eps / (3.0 * assumed.C1 * yn), 1.0 / (p * assumed.C2)) * std::pow(yn, 1.0 / p);
  const double rate = 2.0 * p * p * s * s * std::pow(a, 2.0 * p - 2.0);
  b.L_t = std::max((std::log(24.0 * std::pow(K, 3.0 * p - 2.0)) -
                    std::log(eps * std::pow(a, 2.0 * p - 2.0))) / rate,
                   1.0);
  b.eps_hat_alg =
      std::min(K, eps / (3.0 * std::pow(2.0, p) * p * double(b.N) * std::pow(K, p - 1.0)));
  b.log_U_eta = std::log(std::min(b.eps_hat_alg, a / p)) -
                std::log(40.0 * p * sN * A2 * std::pow(K, 2.0 * p - 1.0)) -
                50.0 * p * p * sN * A2 * std::pow(K, 2.0 * p - 2.0) * t;
  b.U_eta = std::exp(b.log_U_eta);
  return b;
}

Eigen::VectorXd euler_integrate(const VectorField& f, const Eigen::VectorXd& y0, double T,
                                double eta) {
  if (!(eta > 0.0)) throw InvalidInput("eta must be positive");
  if (!(T >= 0.0)) throw InvalidInput("T must be >= 0");
  const double steps = std::floor(T / eta);
  if (steps > 1e12) throw SizeError("too many Euler steps");
  Eigen::VectorXd y = y0;
  for (long k = 0; k < static_cast<long>(steps); ++k) y += eta * f(y);
  return y;
}

GdFlowReport gd_matches_flow(const RegressionInstance& inst, const Hyperparams& hp, double t,
                             double eps, double rtol, long max_steps) {
  BoundBundle b = bounds(inst, hp, t, eps);
  GdFlowReport rep;
  rep.t = t;
  rep.eps = eps;
  rep.eta = b.eta_psi;
  if (!(rep.eta > 0.0) || t / rep.eta > double(max_steps))
    throw SizeError("the step bound needs more than the allowed number of GD steps");
  rep.J = static_cast<long>(std::floor(t / rep.eta));
  FlowTrace gd = gd_run(inst, hp, rep.eta, rep.J, std::max(1L, rep.J));
  rep.psi_gd = gd.samples.back().psi;
  if (t > 0.0) {
    FlowTrace fl = flow_run(inst, hp, t, rtol, default_atol(hp, rtol), {0.0, t});
    rep.psi_flow = fl.samples.back().psi;
  } else {
    rep.psi_flow = Eigen::VectorXd::Zero(inst.A.cols());
  }
  rep.gap = (rep.psi_gd - rep.psi_flow).norm();
  rep.within = rep.gap <= eps;
  return rep;
}

}  // namespace dln
