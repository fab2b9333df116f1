#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "dln/common.hpp"
#include "dln/constants.hpp"
#include "dln/dynamics.hpp"

namespace dln {

// SplitMix64 (Steele, Lea, Flood 2014): state += 0x9e3779b97f4a7c15, then the
// xor-shift-multiply finalizer. Identical output on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  // uniform on [0, 1) from the top 53 bits
  double uniform();

 private:
  std::uint64_t state_;
};

// A1, A2, A3 in that order
std::vector<RegressionInstance> builtin_instances();
// A = [1, 1 - eps], y = 1
RegressionInstance shift_instance(double eps);
// m x N entries uniform in [-1.2, 1.2] rounded to 3 decimals, redrawn until rank m
RegressionInstance random_instance(Index m, Index n, std::uint64_t seed);
// {"A": [[...], ...], "y": [...]}
RegressionInstance load_instance(const std::string& path);
RegressionInstance instance_from_json(const nlohmann::json& j);

// a1 | a2 | a3 | shift:EPS | file:PATH | random:MxN (uses `seed`)
RegressionInstance resolve_instance(const std::string& id, std::uint64_t seed = 1);

struct AlphaGrid {
  double start = 1e-1;
  double stop = 3.1622776601683794e-3;  // 10^-2.5
  int count = 7;
};

// geometric from start down to stop, strictly decreasing; throws on count < 4
std::vector<double> alpha_values(const AlphaGrid& g);

struct SweepConfig {
  RegressionInstance inst;
  std::vector<double> ps{2.0};
  AlphaGrid grid;
  double rtol = 1e-10;
  int fit_skip = 1;       // largest-alpha points left out of the fit
  int jobs = 1;           // 0 uses every hardware thread
  bool cross_check = true;  // flow_run at the two extreme alphas
};

struct SweepPoint {
  double alpha = 0, p = 0;
  double error = 0;  // |q*(alpha) - W_p|_2
  double resid = 0;  // |A q* - y|_2
  bool in_fit = false;
  bool ok = true;
  std::string message;
  double flow_gap = -1;  // |psi(T) - q*|_2 when cross-checked, else -1
  double flow_t = 0;
};

struct SlopeReport {
  double p = 0;
  double slope = 0, intercept = 0, r_squared = 0;
  int fit_points = 0;
  std::vector<SweepPoint> points;  // in decreasing alpha
};

struct LineFit {
  double slope = 0, intercept = 0, r_squared = 0;
};
// least squares of log10(e) on log10(a)
LineFit loglog_fit(const std::vector<double>& a, const std::vector<double>& e);

// |q*(alpha) - W_p| for one point, both computed in quad precision
SweepPoint sweep_point(const RegressionInstance& inst, double p, double alpha);

std::vector<SlopeReport> sweep_alpha(const SweepConfig& cfg);

struct ShiftRow {
  double eps = 0;
  SlopeReport report;
};

std::vector<ShiftRow> shift_example_sweep(const std::vector<double>& eps_list,
                                          const std::vector<double>& ps, const AlphaGrid& grid,
                                          int fit_skip = 1, int jobs = 1);
// one alpha per (eps, p); no slope fit
std::vector<ShiftRow> shift_example_fixed(const std::vector<double>& eps_list,
                                          const std::vector<double>& ps, double alpha,
                                          int jobs = 1);

nlohmann::json report_constants(const RegressionInstance& inst, const Hyperparams& hp, double t,
                                double eps);

// CSV with 17 significant digits
void write_sweep_csv(std::ostream& os, const std::vector<SlopeReport>& reports);
void write_shift_csv(std::ostream& os, const std::vector<ShiftRow>& rows);
void write_trace_csv(std::ostream& os, const FlowTrace& trace);

nlohmann::json to_json(const std::vector<SlopeReport>& reports);
nlohmann::json to_json(const std::vector<ShiftRow>& rows);
nlohmann::json to_json(const FlowTrace& trace);
nlohmann::json to_json(const ConditionReport& rep);

// runs f(0) .. f(n - 1) on up to `jobs` threads
void parallel_for(int n, int jobs, const std::function<void(int)>& f);

}  // namespace dln
