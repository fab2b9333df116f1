#include "dln/experiments.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "dln/bp_oracle.hpp"
#include "dln/linalg.hpp"

namespace dln {

using nlohmann::json;

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return double(next() >> 11) * 0x1.0p-53; }

std::vector<RegressionInstance> builtin_instances() {
  Eigen::MatrixXd A1(3, 5), A2(2, 3), A3(2, 4);
  Eigen::VectorXd y1(3), y2(2), y3(2);
  A1 << -0.111, 0.120, -0.370, -0.240, -1.197,
         0.209, -0.972, -0.755, 0.324, -0.109,
         0.210, -0.391, 0.235, 0.665, 0.353;
  y1 << 0.973, -0.039, -0.886;
  A2 << 1, 1, 1,
        3, 0, 1;
  y2 << 3, 3;
  A3 << 2, -1, 0, 1,
        0, 3, 2, 0;
  y3 << 0, 6;
  return {make_instance(A1, y1, "a1"), make_instance(A2, y2, "a2"),
          make_instance(A3, y3, "a3")};
}

RegressionInstance shift_instance(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidInput("shift eps must be > 0");
  Eigen::MatrixXd A(1, 2);
  A << 1.0, 1.0 - eps;
  Eigen::VectorXd y(1);
  y << 1.0;
  std::ostringstream name;
  name << "shift:" << eps;
  return make_instance(A, y, name.str());
}

RegressionInstance random_instance(Index m, Index n, std::uint64_t seed) {
  if (m < 1 || n < m) throw InvalidInput("random instance needs 1 <= m <= N");
  SplitMix64 rng(seed);
  auto draw = [&rng] { return std::round((2.4 * rng.uniform() - 1.2) * 1000.0) / 1000.0; };
  for (int attempt = 0; attempt < 100; ++attempt) {
    Eigen::MatrixXd A(m, n);
    Eigen::VectorXd y(m);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j) A(i, j) = draw();
    for (Index i = 0; i < m; ++i) y(i) = draw();
    if (y.norm() == 0.0 || svd_summary<double>(A).rank < m) continue;
    std::ostringstream name;
    name << "random:" << m << "x" << n << "#" << seed;
    return make_instance(A, y, name.str());
  }
  throw NumericalFailure("could not draw a full-rank random instance");
}

RegressionInstance instance_from_json(const json& j) {
  if (!j.contains("A") || !j.contains("y")) throw InvalidInput("instance needs \"A\" and \"y\"");
  const json& rows = j.at("A");
  if (!rows.is_array() || rows.empty()) throw InvalidInput("\"A\" must be a non-empty array");
  const Index m = Index(rows.size());
  const Index n = Index(rows[0].size());
  Eigen::MatrixXd A(m, n);
  for (Index i = 0; i < m; ++i) {
    if (Index(rows[i].size()) != n) throw InvalidInput("\"A\" rows differ in length");
    for (Index k = 0; k < n; ++k) A(i, k) = rows[i][k].get<double>();
  }
  const json& yj = j.at("y");
  Eigen::VectorXd y(Index(yj.size()));
  for (Index i = 0; i < y.size(); ++i) y(i) = yj[i].get<double>();
  return make_instance(A, y, j.value("name", std::string("file")));
}

RegressionInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open instance file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidInput("bad instance file " + path + ": " + e.what());
  }
  RegressionInstance inst = instance_from_json(j);
  if (inst.name == "file") inst.name = "file:" + path;
  return inst;
}

RegressionInstance resolve_instance(const std::string& id, std::uint64_t seed) {
  if (id == "a1" || id == "a2" || id == "a3") return builtin_instances()[id[1] - '1'];
  auto rest = [&id](size_t n) { return id.substr(n); };
  try {
    if (id.rfind("shift:", 0) == 0) return shift_instance(std::stod(rest(6)));
    if (id.rfind("file:", 0) == 0) return load_instance(rest(5));
    if (id.rfind("random:", 0) == 0) {
      std::string dims = rest(7);
      auto x = dims.find('x');
      if (x == std::string::npos) throw InvalidInput("random instance expects random:MxN");
      return random_instance(std::stol(dims.substr(0, x)), std::stol(dims.substr(x + 1)), seed);
    }
  } catch (const std::logic_error&) {
    throw InvalidInput("cannot parse instance id '" + id + "'");
  }
  throw InvalidInput("unknown instance '" + id + "'");
}

std::vector<double> alpha_values(const AlphaGrid& g) {
  if (!(g.start > 0.0) || !(g.stop > 0.0) || !(g.start > g.stop))
    throw InvalidInput("alpha grid needs start > stop > 0");
  if (g.count < 4) throw InvalidInput("alpha grid needs at least 4 points");
  std::vector<double> a(g.count);
  const double l0 = std::log10(g.start), l1 = std::log10(g.stop);
  for (int i = 0; i < g.count; ++i)
    a[i] = i == 0 ? g.start
                  : (i == g.count - 1 ? g.stop
                                      : std::pow(10.0, l0 + (l1 - l0) * i / (g.count - 1)));
  return a;
}

LineFit loglog_fit(const std::vector<double>& a, const std::vector<double>& e) {
  if (a.size() != e.size() || a.size() < 2) throw InvalidInput("fit needs two or more points");
  const double n = double(a.size());
  double sx = 0, sy = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    sx += std::log10(a[i]);
    sy += std::log10(e[i]);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    double dx = std::log10(a[i]) - mx, dy = std::log10(e[i]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

void parallel_for(int n, int jobs, const std::function<void(int)>& f) {
  if (jobs <= 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, n);
  if (jobs <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      for (int i; (i = next++) < n;) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

SweepPoint sweep_point(const RegressionInstance& inst, double p, double alpha) {
  SweepPoint pt;
  pt.alpha = alpha;
  pt.p = p;
  try {
    Vec<quad> w = wp_select<quad>(inst, p);
    Vec<quad> q = solve_qstar<quad>(inst, Hyperparams{p, alpha});
    pt.error = double((q - w).norm());
    Vec<quad> r = inst.A.cast<quad>() * q - inst.y.cast<quad>();
    pt.resid = double(r.norm());
  } catch (const NumericalFailure& e) {
    pt.ok = false;
    pt.error = std::numeric_limits<double>::quiet_NaN();
    pt.resid = std::numeric_limits<double>::quiet_NaN();
    pt.message = e.what();
  }
  return pt;
}

namespace {

void flow_cross_check(const RegressionInstance& inst, SweepPoint& pt, double rtol) {
  if (!pt.ok) return;
  Hyperparams hp{pt.p, pt.alpha};
  BoundBundle b = bounds(inst, hp, 0.0, 1e-2);
  const double T = 5.0 / b.K2;
  try {
    FlowTrace tr = flow_run(inst, hp, T, rtol, default_atol(hp, rtol), {0.0, T});
    pt.flow_t = T;
    if (tr.status == RunStatus::diverged) {
      pt.message = "flow diverged";
      return;
    }
    Vec<quad> q = solve_qstar<quad>(inst, hp);
    pt.flow_gap = (tr.samples.back().psi - q.cast<double>()).norm();
  } catch (const NumericalFailure& e) {
    pt.message = std::string("flow cross-check failed: ") + e.what();
  }
}

void fit_report(SlopeReport& rep, int fit_skip) {
  std::vector<double> a, e;
  for (size_t i = 0; i < rep.points.size(); ++i) {
    SweepPoint& pt = rep.points[i];
    pt.in_fit = int(i) >= fit_skip && pt.ok && pt.error > 0.0;
    if (pt.in_fit) {
      a.push_back(pt.alpha);
      e.push_back(pt.error);
    }
  }
  rep.fit_points = int(a.size());
  if (a.size() >= 2) {
    LineFit f = loglog_fit(a, e);
    rep.slope = f.slope;
    rep.intercept = f.intercept;
    rep.r_squared = f.r_squared;
  } else {
    rep.slope = rep.intercept = rep.r_squared = std::numeric_limits<double>::quiet_NaN();
  }
}

std::vector<SlopeReport> run_grid(const RegressionInstance& inst, std::vector<double> ps,
                                  const std::vector<double>& alphas, int fit_skip, int jobs,
                                  bool cross_check, double rtol) {
  for (double p : ps) validate(Hyperparams{p, 1.0});
  std::sort(ps.begin(), ps.end());
  const int na = int(alphas.size());
  std::vector<SlopeReport> reps(ps.size());
  for (size_t k = 0; k < ps.size(); ++k) {
    reps[k].p = ps[k];
    reps[k].points.resize(na);
  }
  parallel_for(int(ps.size()) * na, jobs, [&](int idx) {
    SweepPoint& pt = reps[idx / na].points[idx % na];
    pt = sweep_point(inst, ps[idx / na], alphas[idx % na]);
    const int j = idx % na;
    if (cross_check && (j == 0 || j == na - 1)) flow_cross_check(inst, pt, rtol);
  });
  for (auto& r : reps) fit_report(r, fit_skip);
  return reps;
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

json num_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(num_json(v(i)));
  return a;
}

}  // namespace

std::vector<SlopeReport> sweep_alpha(const SweepConfig& cfg) {
  validate(cfg.inst);
  if (cfg.ps.empty()) throw InvalidInput("sweep needs at least one p");
  if (cfg.fit_skip < 0) throw InvalidInput("fit_skip must be >= 0");
  std::vector<double> alphas = alpha_values(cfg.grid);
  if (cfg.grid.count - cfg.fit_skip < 4) throw InvalidInput("slope fit needs at least 4 points");
  return run_grid(cfg.inst, cfg.ps, alphas, cfg.fit_skip, cfg.jobs, cfg.cross_check, cfg.rtol);
}

std::vector<ShiftRow> shift_example_sweep(const std::vector<double>& eps_list,
                                          const std::vector<double>& ps, const AlphaGrid& grid,
                                          int fit_skip, int jobs) {
  if (eps_list.empty() || ps.empty()) throw InvalidInput("shift sweep needs eps and p values");
  std::vector<double> alphas = alpha_values(grid);
  std::vector<double> eps_sorted = eps_list;
  std::sort(eps_sorted.begin(), eps_sorted.end());
  std::vector<ShiftRow> rows;
  for (double e : eps_sorted) {
    RegressionInstance inst = shift_instance(e);
    for (auto& rep : run_grid(inst, ps, alphas, fit_skip, jobs, false, 1e-10))
      rows.push_back({e, std::move(rep)});
  }
  return rows;
}

std::vector<ShiftRow> shift_example_fixed(const std::vector<double>& eps_list,
                                          const std::vector<double>& ps, double alpha,
                                          int jobs) {
  if (eps_list.empty() || ps.empty()) throw InvalidInput("shift sweep needs eps and p values");
  if (!(alpha > 0.0)) throw InvalidInput("alpha must be > 0");
  std::vector<double> eps_sorted = eps_list, ps_sorted = ps;
  std::sort(eps_sorted.begin(), eps_sorted.end());
  std::sort(ps_sorted.begin(), ps_sorted.end());
  std::vector<ShiftRow> rows;
  for (double e : eps_sorted)
    for (double p : ps_sorted) {
      ShiftRow r;
      r.eps = e;
      r.report.p = p;
      rows.push_back(r);
    }
  parallel_for(int(rows.size()), jobs, [&](int i) {
    validate(Hyperparams{rows[i].report.p, alpha});
    rows[i].report.points = {sweep_point(shift_instance(rows[i].eps), rows[i].report.p, alpha)};
    rows[i].report.slope = rows[i].report.intercept = rows[i].report.r_squared =
        std::numeric_limits<double>::quiet_NaN();
  });
  return rows;
}

json report_constants(const RegressionInstance& inst, const Hyperparams& hp, double t,
                      double eps) {
  validate(inst);
  BoundBundle b = bounds(inst, hp, t, eps);
  ConditionReport c = condition_report(inst.A);
  json out;
  out["instance"] = inst.name;
  out["p"] = hp.p;
  out["alpha"] = hp.alpha;
  out["t"] = t;
  out["eps"] = eps;
  json list = json::array();
  auto add = [&list](const char* name, const char* formula, double v) {
    list.push_back({{"name", name}, {"formula", formula}, {"value", num_json(v)}});
  };
  add("N", "number of columns of A", double(b.N));
  add("sigma_min", "smallest singular value of A", b.sigma_min);
  add("op_norm", "largest singular value of A", b.op_norm);
  add("y_norm", "|y|_2", b.y_norm);
  add("psi_inf_bound", "2 sqrt(N) |y|_2 / sigma_min", b.psi_inf_bound);
  add("K1", "alpha^p (2 sqrt(N) |y|_2 / (sigma_min alpha^p) + 2)^((3p-2)/p)", b.K1);
  add("K2", "2 p^2 sigma_min^2 alpha^(2p-2)", b.K2);
  add("M", "2 sqrt(N) |y|_2 / sigma_min + alpha^p", b.M);
  add("C1", "40 p sqrt(N) |A|^2 M^((2p-1)/p)", b.C1_grad);
  add("C2", "50 p^2 sqrt(N) |A|^2 M^((2p-2)/p)", b.C2_hess);
  add("eta_max", "min{eps, alpha/p} / C1 * exp(-C2 t)", b.eta_max);
  add("log_eta_max", "log(eta_max)", b.log_eta_max);
  add("K", "M^(1/p)", b.K_cap);
  add("eps_hat", "min{K, eps / (2^p p N K^(p-1))}", b.eps_hat);
  add("eta_psi", "min{eps_hat, alpha/p} / C1 * exp(-C2 t)", b.eta_psi);
  add("log_eta_psi", "log(eta_psi)", b.log_eta_psi);
  add("U_alpha", "(eps / (3 C1' |y|_2))^(1/(p C2')) |y|_2^(1/p), C1' = C2' = 1", b.U_alpha);
  add("L_t", "max{(ln(24 K^(3p-2)) - ln(eps alpha^(2p-2))) / (2 p^2 sigma_min^2 alpha^(2p-2)), 1}",
      b.L_t);
  add("eps_hat_alg", "min{K, eps / (3 2^p p N K^(p-1))}", b.eps_hat_alg);
  add("U_eta",
      "min{eps_hat_alg, alpha/p} / (40 p sqrt(N) |A|^2 K^(2p-1)) * "
      "exp(-50 p^2 sqrt(N) |A|^2 K^(2p-2) t)",
      b.U_eta);
  add("log_U_eta", "log(U_eta)", b.log_U_eta);
  add("chi", "max over nonsingular column bases J of |Z_J^-1 Z'|, Z' = nullspace basis", c.chi);
  add("chi_sampled", "max of |Z (Z' D Z)^-1 Z' D| over random positive diagonal D",
      c.chi_sampled);
  add("script_K", "chi + 1, or 1 for a trivial nullspace", c.script_K);
  add("c_A", "max over s of script_K([A; s']) / |P_Null(A) s|_2", c.c_A);
  out["constants"] = list;
  out["certificate"] = to_json(c)["certificate"];
  return out;
}

void write_sweep_csv(std::ostream& os, const std::vector<SlopeReport>& reports) {
  os << "alpha,p,error_l2,resid,slope_window\n";
  for (const auto& r : reports)
    for (const auto& pt : r.points)
      os << num(pt.alpha) << ',' << num(pt.p) << ',' << num(pt.error) << ',' << num(pt.resid)
         << ',' << (pt.in_fit ? 1 : 0) << '\n';
}

void write_shift_csv(std::ostream& os, const std::vector<ShiftRow>& rows) {
  os << "eps,alpha,p,error_l2,resid,slope_window\n";
  for (const auto& row : rows)
    for (const auto& pt : row.report.points)
      os << num(row.eps) << ',' << num(pt.alpha) << ',' << num(pt.p) << ',' << num(pt.error)
         << ',' << num(pt.resid) << ',' << (pt.in_fit ? 1 : 0) << '\n';
}

void write_trace_csv(std::ostream& os, const FlowTrace& trace) {
  const Index n = trace.samples.empty() ? 0 : trace.samples.front().psi.size();
  os << "t,residual";
  for (Index i = 0; i < n; ++i) os << ",psi_" << i + 1;
  os << '\n';
  for (const auto& s : trace.samples) {
    os << num(s.t) << ',' << num(s.residual);
    for (Index i = 0; i < n; ++i) os << ',' << num(s.psi(i));
    os << '\n';
  }
}

json to_json(const std::vector<SlopeReport>& reports) {
  json out = json::array();
  for (const auto& r : reports) {
    json pts = json::array();
    for (const auto& pt : r.points) {
      json j{{"alpha", pt.alpha}, {"p", pt.p},         {"error_l2", num_json(pt.error)},
             {"resid", num_json(pt.resid)}, {"in_fit", pt.in_fit}, {"ok", pt.ok}};
      if (!pt.message.empty()) j["message"] = pt.message;
      if (pt.flow_gap >= 0) {
        j["flow_gap"] = pt.flow_gap;
        j["flow_t"] = pt.flow_t;
      }
      pts.push_back(j);
    }
    out.push_back({{"p", r.p},
                   {"slope", num_json(r.slope)},
                   {"intercept", num_json(r.intercept)},
                   {"r_squared", num_json(r.r_squared)},
                   {"fit_points", r.fit_points},
                   {"points", pts}});
  }
  return out;
}

json to_json(const std::vector<ShiftRow>& rows) {
  json out = json::array();
  for (const auto& row : rows) {
    json j = to_json(std::vector<SlopeReport>{row.report})[0];
    j["eps"] = row.eps;
    out.push_back(j);
  }
  return out;
}

json to_json(const FlowTrace& trace) {
  json samples = json::array();
  for (const auto& s : trace.samples)
    samples.push_back({{"t", s.t},
                       {"residual", num_json(s.residual)},
                       {"psi", vec_json(s.psi)},
                       {"theta_plus", vec_json(s.theta.plus)},
                       {"theta_minus", vec_json(s.theta.minus)}});
  return {{"status", trace.status == RunStatus::ok ? "ok" : "diverged"},
          {"steps", trace.steps},
          {"samples", samples}};
}

json to_json(const ConditionReport& rep) {
  json cert = json::array();
  for (const auto& c : rep.certificate) cert.push_back({{"id", c.id}, {"value", c.value}});
  return {{"chi", rep.chi},
          {"chi_sampled", rep.chi_sampled},
          {"script_K", rep.script_K},
          {"c_A", rep.c_A},
          {"certificate", cert}};
}

}  // namespace dln
