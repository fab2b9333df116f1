#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dln/common.hpp"

namespace dln {

struct DlnParams {
  Eigen::VectorXd plus;
  Eigen::VectorXd minus;
};

// alpha * 1 for both halves
DlnParams initial_params(Index n, double alpha);

// |theta_+|^p - |theta_-|^p
Eigen::VectorXd psi_of(const DlnParams& theta, double p);

double loss(const DlnParams& theta, const RegressionInstance& inst, double p);
DlnParams grad_loss(const DlnParams& theta, const RegressionInstance& inst, double p);
// 2N x 2N Hessian in the (theta_+, theta_-) ordering
Eigen::MatrixXd hess_loss(const DlnParams& theta, const RegressionInstance& inst, double p);

struct TraceSample {
  double t = 0.0;
  DlnParams theta;
  Eigen::VectorXd psi;
  double residual = 0.0;  // |A psi - y|_2
};

enum class RunStatus { ok, diverged };

struct FlowTrace {
  std::vector<TraceSample> samples;
  RunStatus status = RunStatus::ok;
  long steps = 0;
};

TraceSample make_sample(double t, const DlnParams& theta, const RegressionInstance& inst,
                        double p);

// |theta| above this aborts a run as diverged
constexpr double kDivergenceLimit = 1e12;

// record_every = 0 keeps about 2000 evenly spaced steps; the final step is always kept
FlowTrace gd_run(const RegressionInstance& inst, const Hyperparams& hp, double eta, long J,
                 long record_every = 0);

// 0 followed by `per_decade` points per decade over [t_end 10^-decades, t_end]
std::vector<double> geometric_times(double t_end, int per_decade = 10, int decades = 6);

struct IntegrationFailure : NumericalFailure {
  FlowTrace partial;
  IntegrationFailure(const std::string& msg, FlowTrace tr)
      : NumericalFailure(msg), partial(std::move(tr)) {}
};

// Radau IIA integration of theta' = -grad L(theta) from theta(0) = alpha 1.
// Empty `times` selects geometric_times(t_end).
FlowTrace flow_run(const RegressionInstance& inst, const Hyperparams& hp, double t_end,
                   double rtol, double atol, std::vector<double> times = {});

// atol scaled to the smallest component the flow can reach
double default_atol(const Hyperparams& hp, double rtol);

struct InvariantReport {
  double max_defect = 0.0;
  std::vector<double> per_sample;
  // max over samples of (|theta|_inf^p - |psi|_inf - alpha^p) / (|psi|_inf + alpha^p)
  double theta_bound_excess = 0.0;
  bool theta_bound_ok = true;
};

InvariantReport flow_invariant_defect(const FlowTrace& trace, const Hyperparams& hp);

struct AssumedConstants {
  double C1 = 1.0;
  double C2 = 1.0;
};

struct BoundBundle {
  double sigma_min = 0, op_norm = 0, y_norm = 0;
  Index N = 0;
  double K1 = 0, K2 = 0;
  double M = 0, C1_grad = 0, C2_hess = 0;
  double psi_inf_bound = 0;  // 2 sqrt(N) |y| / sigma_min
  double eta_max = 0;        // GD step bound for theta accuracy eps
  double log_eta_max = 0;
  double K_cap = 0;
  double eps_hat = 0;        // min{K, eps / (2^p p N K^(p-1))}
  double eta_psi = 0;        // step bound guaranteeing |psi_hat - psi(t)| <= eps
  double log_eta_psi = 0;
  double U_alpha = 0, L_t = 0, U_eta = 0, eps_hat_alg = 0;
  double log_U_eta = 0;
};

BoundBundle bounds(const RegressionInstance& inst, const Hyperparams& hp, double t, double eps,
                   const AssumedConstants& assumed = {});

using VectorField = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// floor(T / eta) forward Euler steps
Eigen::VectorXd euler_integrate(const VectorField& f, const Eigen::VectorXd& y0, double T,
                                double eta);

struct GdFlowReport {
  double t = 0, eps = 0, eta = 0;
  long J = 0;
  double gap = 0;
  bool within = false;
  Eigen::VectorXd psi_gd, psi_flow;
};

// eta from the psi-accuracy step bound, J = floor(t / eta); compares GD with the flow at t
GdFlowReport gd_matches_flow(const RegressionInstance& inst, const Hyperparams& hp, double t,
                             double eps, double rtol = 1e-10, long max_steps = 400000000);

}  // namespace dln
