#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dln/bp_oracle.hpp"
#include "dln/dynamics.hpp"
#include "dln/experiments.hpp"

using namespace dln;
using nlohmann::json;

namespace {

// Reads {"sweep": {"p": [3, 4], "alpha-count": 9}, ...}; nested objects name subcommands.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    json j;
    for (const CLI::Option* opt : app->get_options({})) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string name = opt->get_lnames()[0];
      if (opt->count() > 0)
        j[name] = opt->results();
      else if (default_also && !opt->get_default_str().empty())
        j[name] = opt->get_default_str();
    }
    return j.dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
    }
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void collect(const json& j, std::vector<std::string> parents,
                      std::vector<CLI::ConfigItem>& items) {
    if (!j.is_object()) throw CLI::ConversionError("config root must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it->is_object()) {
        auto sub = parents;
        sub.push_back(it.key());
        collect(*it, sub, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = it.key();
      if (it->is_array())
        for (const auto& v : *it) item.inputs.push_back(scalar(v));
      else
        item.inputs.push_back(scalar(*it));
      items.push_back(std::move(item));
    }
  }
};

struct Common {
  std::string instance = "a2";
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "csv";
  int jobs = 1;
};

void add_instance(CLI::App* sub, Common& c) {
  sub->add_option("--instance", c.instance, "a1 | a2 | a3 | shift:EPS | file:PATH | random:MxN")
      ->capture_default_str();
  sub->add_option("--seed", c.seed, "seed for random:MxN instances")->capture_default_str();
}

void add_output(CLI::App* sub, Common& c) {
  sub->add_option("--out", c.out, "output file (default stdout)");
  sub->add_option("--format", c.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

template <class F>
void emit(const Common& c, F&& write) {
  if (c.out.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw InvalidInput("cannot open output file " + c.out);
  write(f);
}

json vec_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

std::string csv_num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diagonal linear network experiments"};
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config file; command-line flags take precedence");
  app.require_subcommand(1);

  Common c;
  std::vector<double> ps{3.0, 4.0, 5.0};
  AlphaGrid grid{1e-1, std::pow(10.0, -2.5), 7};
  double rtol = 1e-10, atol = 0.0, t = 1.0, eps = 1e-3, alpha = 0.1, p = 2.0, eta = 0.0;
  int fit_skip = 1, per_decade = 10, decades = 6;
  long steps = -1, record_every = 0;
  bool no_cross_check = false;
  std::vector<double> eps_list{0.5, 0.1, 0.02};
  double fixed_alpha = 0.0;

  auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--alpha-start", grid.start, "largest alpha")->capture_default_str();
    sub->add_option("--alpha-stop", grid.stop, "smallest alpha")->capture_default_str();
    sub->add_option("--alpha-count", grid.count, "geometric grid size (>= 4)")
        ->capture_default_str();
    sub->add_option("--fit-skip", fit_skip, "largest-alpha points left out of the slope fit")
        ->capture_default_str();
    sub->add_option("--jobs", c.jobs, "worker threads (0 = all cores)")->capture_default_str();
  };

  auto* sweep = app.add_subcommand("sweep", "alpha sweep of |psi_alpha(inf) - W_p| with slope fit");
  add_instance(sweep, c);
  sweep->add_option("--p", ps, "one or more depths p >= 2")->capture_default_str();
  add_grid(sweep);
  sweep->add_option("--rtol", rtol, "flow cross-check tolerance")->capture_default_str();
  sweep->add_flag("--no-cross-check", no_cross_check, "skip flow_run at the extreme alphas");
  add_output(sweep, c);

  auto* shift = app.add_subcommand("shift", "A = [1, 1 - eps], y = 1 over eps, p and alpha");
  shift->add_option("--eps", eps_list, "eps values")->capture_default_str();
  shift->add_option("--p", ps, "depths")->capture_default_str();
  add_grid(shift);
  shift->add_option("--alpha", fixed_alpha, "single alpha instead of the grid (no slope fit)");
  add_output(shift, c);

  auto* flow = app.add_subcommand("flow", "integrate the gradient flow from theta(0) = alpha 1");
  add_instance(flow, c);
  flow->add_option("--p", p)->capture_default_str();
  flow->add_option("--alpha", alpha)->capture_default_str();
  flow->add_option("--t", t, "final time")->capture_default_str();
  flow->add_option("--rtol", rtol)->capture_default_str();
  flow->add_option("--atol", atol, "default scales with alpha^2");
  flow->add_option("--per-decade", per_decade, "samples per decade of t")->capture_default_str();
  flow->add_option("--decades", decades, "decades below t to sample")->capture_default_str();
  add_output(flow, c);

  auto* gd = app.add_subcommand("gd", "gradient descent with a fixed step");
  add_instance(gd, c);
  gd->add_option("--p", p)->capture_default_str();
  gd->add_option("--alpha", alpha)->capture_default_str();
  gd->add_option("--eta", eta, "step size (default: the psi-accuracy bound at --t, --eps)");
  gd->add_option("--steps", steps, "number of steps (default floor(t / eta))");
  gd->add_option("--t", t, "time horizon")->capture_default_str();
  gd->add_option("--eps", eps, "accuracy used for the step bound")->capture_default_str();
  gd->add_option("--record-every", record_every, "0 keeps about 2000 samples")
      ->capture_default_str();
  add_output(gd, c);

  auto* bp = app.add_subcommand("bp", "basis pursuit: optimal vertex and optimal face");
  add_instance(bp, c);
  add_output(bp, c);

  auto* wp = app.add_subcommand("wp", "the limit minimiser W_p(A, y)");
  add_instance(wp, c);
  wp->add_option("--p", p)->capture_default_str();
  add_output(wp, c);

  auto* cons = app.add_subcommand("constants", "bound constants and condition measures as JSON");
  add_instance(cons, c);
  cons->add_option("--p", p)->capture_default_str();
  cons->add_option("--alpha", alpha)->capture_default_str();
  cons->add_option("--t", t)->capture_default_str();
  cons->add_option("--eps", eps)->capture_default_str();
  cons->add_option("--out", c.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (sweep->parsed()) {
      SweepConfig cfg;
      cfg.inst = resolve_instance(c.instance, c.seed);
      cfg.ps = ps;
      cfg.grid = grid;
      cfg.rtol = rtol;
      cfg.fit_skip = fit_skip;
      cfg.jobs = c.jobs;
      cfg.cross_check = !no_cross_check;
      auto reps = sweep_alpha(cfg);
      for (const auto& r : reps)
        std::cerr << "p = " << r.p << ": slope " << r.slope << ", r^2 " << r.r_squared << " over "
                  << r.fit_points << " points\n";
      emit(c, [&](std::ostream& os) {
        if (c.format == "json")
          os << to_json(reps).dump(2) << '\n';
        else
          write_sweep_csv(os, reps);
      });
    } else if (shift->parsed()) {
      auto rows = fixed_alpha > 0.0 ? shift_example_fixed(eps_list, ps, fixed_alpha, c.jobs)
                                    : shift_example_sweep(eps_list, ps, grid, fit_skip, c.jobs);
      emit(c, [&](std::ostream& os) {
        if (c.format == "json")
          os << to_json(rows).dump(2) << '\n';
        else
          write_shift_csv(os, rows);
      });
    } else if (flow->parsed()) {
      RegressionInstance inst = resolve_instance(c.instance, c.seed);
      Hyperparams hp{p, alpha};
      validate(hp);
      if (atol <= 0.0) atol = default_atol(hp, rtol);
      FlowTrace tr;
      int rc = 0;
      try {
        tr = flow_run(inst, hp, t, rtol, atol, geometric_times(t, per_decade, decades));
      } catch (const IntegrationFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        tr = e.partial;
        rc = 3;
      }
      if (tr.status == RunStatus::diverged) {
        std::cerr << "error: flow diverged\n";
        rc = 3;
      }
      InvariantReport inv = flow_invariant_defect(tr, hp);
      std::cerr << "steps " << tr.steps << ", invariant defect " << inv.max_defect << "\n";
      emit(c, [&](std::ostream& os) {
        if (c.format == "json")
          os << to_json(tr).dump(2) << '\n';
        else
          write_trace_csv(os, tr);
      });
      return rc;
    } else if (gd->parsed()) {
      RegressionInstance inst = resolve_instance(c.instance, c.seed);
      Hyperparams hp{p, alpha};
      validate(hp);
      BoundBundle b = bounds(inst, hp, t, eps);
      if (eta <= 0.0) eta = b.eta_psi;
      if (!(eta > 0.0)) throw InvalidInput("the step bound underflows; pass --eta explicitly");
      if (steps < 0) steps = static_cast<long>(std::floor(t / eta));
      BoundBundle at_end = bounds(inst, hp, double(steps) * eta, eps);
      if (eta > at_end.eta_max)
        std::cerr << "warning: eta = " << eta << " exceeds the guaranteed step bound "
                  << at_end.eta_max << " for horizon " << double(steps) * eta << "\n";
      FlowTrace tr = gd_run(inst, hp, eta, steps, record_every);
      emit(c, [&](std::ostream& os) {
        if (c.format == "json")
          os << to_json(tr).dump(2) << '\n';
        else
          write_trace_csv(os, tr);
      });
      if (tr.status == RunStatus::diverged) {
        std::cerr << "error: gradient descent diverged\n";
        return 3;
      }
    } else if (bp->parsed()) {
      RegressionInstance inst = resolve_instance(c.instance, c.seed);
      BpSolution<double> sol = solve_bp<double>(inst);
      SolutionFace<double> face = optimal_face<double>(inst, inst.A.cols() <= kMaxEnumerationN);
      emit(c, [&](std::ostream& os) {
        if (c.format == "json") {
          json verts = json::array();
          for (const auto& v : face.vertices) verts.push_back(vec_to_json(v));
          json fz = json::array();
          for (Index i : face.forced_zeros) fz.push_back(i);
          json s = json::array();
          for (Index i = 0; i < face.s.size(); ++i) s.push_back(face.s(i));
          os << json{{"R", sol.R},
                     {"x", vec_to_json(sol.x)},
                     {"face", {{"s", s},
                               {"forced_zeros", fz},
                               {"vertices", verts},
                               {"interior", vec_to_json(face.interior)}}}}
                    .dump(2)
             << '\n';
        } else {
          os << "index,x,interior\n";
          for (Index i = 0; i < sol.x.size(); ++i)
            os << i << ',' << csv_num(sol.x(i)) << ',' << csv_num(face.interior(i)) << '\n';
        }
      });
    } else if (wp->parsed()) {
      RegressionInstance inst = resolve_instance(c.instance, c.seed);
      Eigen::VectorXd w = wp_select<quad>(inst, p).cast<double>();
      emit(c, [&](std::ostream& os) {
        if (c.format == "json") {
          os << json{{"p", p}, {"w", vec_to_json(w)}}.dump(2) << '\n';
        } else {
          os << "index,w\n";
          for (Index i = 0; i < w.size(); ++i) os << i << ',' << csv_num(w(i)) << '\n';
        }
      });
    } else if (cons->parsed()) {
      RegressionInstance inst = resolve_instance(c.instance, c.seed);
      json j = report_constants(inst, Hyperparams{p, alpha}, t, eps);
      emit(c, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
    }
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
