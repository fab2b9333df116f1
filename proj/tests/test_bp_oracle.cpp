#include <doctest.h>

#include <cmath>

#include "dln/bp_oracle.hpp"
#include "dln/constants.hpp"
#include "dln/experiments.hpp"
#include "dln/linalg.hpp"
#include "dln/scalar_funcs.hpp"
#include "test_util.hpp"

using namespace dln;

namespace {

RegressionInstance a2() { return builtin_instances()[1]; }
RegressionInstance a3() { return builtin_instances()[2]; }

RegressionInstance identity_instance() {
  return make_instance(Eigen::Matrix2d::Identity(), Eigen::Vector2d(3, -4), "I2");
}

double mu_closed(double p) {
  if (p == 2.0) return (4 - 6 * std::cbrt(2.0) + 9 * std::cbrt(4.0)) / 31;
  double r = std::pow(3.0, 2 / p) / (std::pow(2.0, 2 / p) + 1);
  return 1 / (1 + std::pow(r, -p / (p - 2)));
}

Eigen::Vector3d a2_point(double mu) { return {1 - mu, 2 - 2 * mu, 3 * mu}; }

// golden-section search for the minimum of f on [lo, hi]
template <class F>
double golden_min(F f, double lo, double hi, double tol) {
  const double g = (std::sqrt(5.0) - 1) / 2;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return (a + b) / 2;
}

Eigen::VectorXd to_d(const Vec<quad>& v) { return v.cast<double>(); }

}  // namespace

TEST_CASE("solve_bp examples") {
  auto s = solve_bp<double>(shift_instance(0.5));
  CHECK(s.x(0) == doctest::Approx(1.0));
  CHECK(std::abs(s.x(1)) < 1e-14);
  CHECK(s.R == doctest::Approx(1.0));

  auto id = solve_bp<double>(identity_instance());
  CHECK((id.x - Eigen::Vector2d(3, -4)).norm() < 1e-14);
  CHECK(id.R == doctest::Approx(7.0));

  auto s2 = solve_bp<quad>(a2());
  CHECK(double(s2.R) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK((a2().A * to_d(s2.x) - a2().y).norm() < 1e-13);
}

TEST_CASE("solve_bp agrees with vertex enumeration") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    Index m = 1 + seed % 3, n = m + 1 + seed % 4;
    RegressionInstance inst = random_instance(m, n, seed);
    auto bp = solve_bp<double>(inst);
    double brute = testutil::brute_force_bp(inst.A, inst.y);
    CHECK(std::abs(bp.R - brute) <= 1e-9 * std::max(1.0, brute));
    CHECK((inst.A * bp.x - inst.y).norm() < 1e-10);
  }
}

TEST_CASE("optimal_face examples") {
  auto f2 = optimal_face<double>(a2());
  CHECK(f2.s == Eigen::Vector3i(1, 1, 1));
  CHECK(f2.forced_zeros.empty());
  REQUIRE(f2.vertices.size() == 2);
  bool found_a = false, found_b = false;
  for (const auto& v : f2.vertices) {
    found_a |= (v - Eigen::Vector3d(1, 2, 0)).norm() < 1e-12;
    found_b |= (v - Eigen::Vector3d(0, 0, 3)).norm() < 1e-12;
  }
  CHECK(found_a);
  CHECK(found_b);

  auto f3 = optimal_face<double>(a3());
  CHECK(f3.forced_zeros == std::vector<Index>{3});

  auto fi = optimal_face<double>(identity_instance());
  CHECK(fi.s == Eigen::Vector2i(1, -1));
  CHECK(fi.vertices.size() == 1);

  RegressionInstance big = random_instance(2, 13, 3);
  CHECK_THROWS_AS(optimal_face<double>(big), SizeError);
  CHECK_NOTHROW(optimal_face<double>(big, false));
}

TEST_CASE("optimal_face vertex invariants") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    RegressionInstance inst = random_instance(2, 5, seed);
    auto f = optimal_face<double>(inst);
    CHECK(f.R == doctest::Approx(solve_bp<double>(inst).R).epsilon(1e-12));
    CHECK(f.augmented.rows() == 3);
    for (const auto& v : f.vertices) {
      CHECK((inst.A * v - inst.y).norm() <= 1e-9);
      CHECK(std::abs(f.s.cast<double>().dot(v) - f.R) <= 1e-9);
      CHECK(std::abs(v.lpNorm<1>() - f.R) <= 1e-9);
      for (Index j = 0; j < v.size(); ++j) CHECK(f.s(j) * v(j) >= -1e-9);
      for (Index j : f.forced_zeros) CHECK(std::abs(v(j)) <= 1e-9);
    }
  }
}

TEST_CASE("wp_select closed forms") {
  for (double p : {2.0, 3.0, 4.0, 5.0}) {
    CAPTURE(p);
    double mu = mu_closed(p);
    Eigen::VectorXd w2 = to_d(wp_select<quad>(a2(), p));
    CHECK((w2 - a2_point(mu)).norm() <= 1e-8);
    Eigen::VectorXd w3 = to_d(wp_select<quad>(a3(), p));
    Eigen::Vector4d e3(1 - mu, 2 - 2 * mu, 3 * mu, 0);
    CHECK((w3 - e3).norm() <= 1e-8);
  }
}

TEST_CASE("wp_select on a singleton face") {
  for (double p : {2.0, 3.5})
    CHECK((wp_select<double>(identity_instance(), p) - Eigen::Vector2d(3, -4)).norm() < 1e-12);
}

TEST_CASE("wp_select dominates random face points") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (double p : {2.0, 3.0}) {
    auto objective = [p](const Eigen::VectorXd& z) {
      double s = 0;
      for (Index i = 0; i < z.size(); ++i) {
        double a = std::abs(z(i));
        if (a == 0) continue;
        s += p == 2.0 ? -a * std::log(a) : std::pow(a, 2 / p);
      }
      return s;
    };
    Eigen::VectorXd w = wp_select<double>(a2(), p);
    double best = objective(w);
    for (int k = 0; k < 500; ++k) CHECK(objective(a2_point(u(rng))) <= best + 1e-12);
  }
}

TEST_CASE("solve_qstar examples") {
  Hyperparams hp{3.0, 0.3};
  Eigen::Matrix2d A;
  A << 2, 1, 1, 3;
  auto sq = make_instance(A, Eigen::Vector2d(1, -2));
  CHECK((solve_qstar<double>(sq, hp) - A.lu().solve(Eigen::Vector2d(1, -2))).norm() < 1e-13);

  Eigen::MatrixXd ones(1, 2);
  ones << 1, 1;
  Eigen::VectorXd two(1);
  two << 2;
  for (double p : {2.0, 3.0, 6.0})
    for (double alpha : {0.05, 1.0, 3.0}) {
      Eigen::VectorXd q = solve_qstar<double>(make_instance(ones, two), {p, alpha});
      CHECK((q - Eigen::Vector2d(1, 1)).norm() < 1e-10);
    }
}

TEST_CASE("solve_qstar stationarity and loose bounds") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    RegressionInstance inst = random_instance(2, 5, seed);
    for (double p : {2.0, 3.0}) {
      Hyperparams hp{p, 0.2};
      Eigen::VectorXd q = solve_qstar<double>(inst, hp);
      Eigen::MatrixXd P = nullspace_projector<double>(inst.A);
      CHECK((P * grad_Q_p<double>(q, hp)).norm() <= 1e-10);
      CHECK((inst.A * q - inst.y).norm() <= 1e-10);
      auto face = optimal_face<double>(inst, false);
      Eigen::VectorXd ms = solve_mstar<double>(face, inst, hp);
      double smin = svd_summary<double>(inst.A).sigma_min;
      CHECK(q.lpNorm<Eigen::Infinity>() <= ms.lpNorm<1>() + 1e-9);
      CHECK(ms.lpNorm<1>() <= std::sqrt(5.0) * inst.y.norm() / smin + 1e-9);
    }
  }
}

TEST_CASE("solve_mstar examples") {
  Hyperparams hp{2.0, 1.0};
  auto fi = optimal_face<double>(identity_instance());
  CHECK((solve_mstar<double>(fi, identity_instance(), hp) - Eigen::Vector2d(3, -4)).norm() < 1e-12);

  for (double alpha : {1.0, 0.7}) {
    Hyperparams h{2.0, alpha};
    auto f2 = optimal_face<double>(a2());
    Eigen::VectorXd m = solve_mstar<double>(f2, a2(), h);
    double mu = golden_min(
        [&](double t) { return Q_p<double>(Eigen::VectorXd(a2_point(t)), h); }, 0.0, 1.0, 1e-9);
    CHECK((m - a2_point(mu)).norm() <= 1e-6);
    CHECK(mu > 0.0);
    CHECK(mu < 1.0);
  }
}

TEST_CASE("solve_mstar KKT residual") {
  for (double p : {2.0, 3.0}) {
    Hyperparams hp{p, 0.3};
    auto f = optimal_face<double>(a3());
    Eigen::VectorXd m = solve_mstar<double>(f, a3(), hp);
    Eigen::MatrixXd Bin = f.s.cast<double>().asDiagonal();
    auto c = verify_kkt<double>(m, grad_Q_p<double>(m, hp), f.augmented,
                                Eigen::Vector3d(0, 6, f.R), Bin, Eigen::VectorXd::Zero(4));
    CHECK(c.stationarity_residual <= 1e-9);
    CHECK(c.complementarity_residual <= 1e-9);
    CHECK(c.primal_residual <= 1e-9);
    CHECK(c.mu.minCoeff() >= -1e-10);
  }
}

TEST_CASE("m* approaches g* like alpha^p") {
  const double p = 3.0;
  auto f = optimal_face<quad>(a2());
  std::vector<double> alphas{0.3, 0.2, 0.1, 0.05};
  std::vector<double> errs;
  for (double a : alphas) {
    Hyperparams hp{p, a};
    Vec<quad> m = solve_mstar<quad>(f, a2(), hp);
    Vec<quad> g = solve_gstar<quad>(f, a2(), hp);
    errs.push_back(double((m - g).norm()));
  }
  LineFit fit = loglog_fit(alphas, errs);
  CHECK(fit.slope >= p - 0.2);
  double ca = c_A(a2().A);
  for (size_t i = 0; i < alphas.size(); ++i)
    CHECK(errs[i] <= ca * std::pow(alphas[i], p));
}

TEST_CASE("verify_kkt") {
  Hyperparams hp{3.0, 0.5};
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
  auto c0 = verify_kkt<double>(zero, grad_Q_p<double>(zero, hp), Eigen::MatrixXd(0, 3),
                               Eigen::VectorXd(0), Eigen::MatrixXd(0, 3), Eigen::VectorXd(0));
  CHECK(c0.lambda.size() == 0);
  CHECK(c0.stationarity_residual == 0.0);
  CHECK(c0.complementarity_residual == 0.0);

  RegressionInstance inst = a2();
  Eigen::VectorXd q = solve_qstar<double>(inst, hp);
  auto c1 = verify_kkt<double>(q, grad_Q_p<double>(q, hp), inst.A, inst.y,
                               Eigen::MatrixXd(0, 3), Eigen::VectorXd(0));
  CHECK(c1.stationarity_residual <= 1e-8);
  CHECK(c1.primal_residual <= 1e-12);

  Eigen::VectorXd z = nullspace_basis<double>(inst.A).col(0);
  Eigen::VectorXd qp = q + 0.1 * z;
  auto c2 = verify_kkt<double>(qp, grad_Q_p<double>(qp, hp), inst.A, inst.y,
                               Eigen::MatrixXd(0, 3), Eigen::VectorXd(0));
  CHECK(c2.stationarity_residual > 1e-3);

  CHECK_THROWS_AS(verify_kkt<double>(q, zero.head(2), inst.A, inst.y, Eigen::MatrixXd(0, 3),
                                     Eigen::VectorXd(0)),
                  InvalidInput);
}

TEST_CASE("minimizer set invariants") {
  std::vector<RegressionInstance> insts = builtin_instances();
  insts.push_back(random_instance(2, 4, 11));
  for (const auto& inst : insts)
    for (double p : {2.0, 3.0}) {
      CAPTURE(inst.name);
      CAPTURE(p);
      Hyperparams hp{p, 0.2};
      auto ms = minimizer_set<quad>(inst, hp);
      double R = double(solve_bp<quad>(inst).R);
      Eigen::VectorXd q = to_d(ms.q_star), m = to_d(ms.m_star), g = to_d(ms.g_star);
      for (const Eigen::VectorXd* v : {&q, &m, &g})
        CHECK((inst.A * *v - inst.y).norm() <= 1e-9);
      CHECK(std::abs(m.lpNorm<1>() - R) <= 1e-9);
      CHECK(std::abs(g.lpNorm<1>() - R) <= 1e-9);
      CHECK(q.lpNorm<1>() >= R - 1e-9);
      CHECK(double((ms.w_p - ms.g_star).norm()) <= 1e-8);
      CHECK(Q_p<quad>(ms.q_star, hp) <= Q_p<quad>(ms.m_star, hp) + quad(1e-20));
      CHECK(G_p<quad>(ms.g_star, hp) <= G_p<quad>(ms.m_star, hp) + quad(1e-20));
      CHECK(double(ms.qm) == doctest::Approx((q - m).norm()));
    }
}

TEST_CASE("l2-l1 bound with the computed C_A") {
  std::vector<RegressionInstance> insts = builtin_instances();
  for (std::uint64_t seed = 1; seed <= 4; ++seed) insts.push_back(random_instance(2, 6, seed));
  for (const auto& inst : insts) {
    double ca = c_A(inst.A);
    for (double p : {2.0, 3.0})
      for (double alpha : {0.5, 0.1}) {
        Hyperparams hp{p, alpha};
        auto face = optimal_face<quad>(inst, false);
        Vec<quad> m = solve_mstar<quad>(face, inst, hp);
        Vec<quad> q = solve_qstar<quad>(inst, hp, &m);
        double lhs = double((q - m).norm());
        double gap = double(q.template lpNorm<1>() - m.template lpNorm<1>());
        CHECK(lhs <= ca * gap * (1 + 1e-9) + 1e-14);
      }
  }
}

TEST_CASE("V_p infinity bounds") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd A = testutil::random_matrix(2, 5, rng);
    Eigen::VectorXd v = testutil::random_vector(5, rng);
    Hyperparams hp{trial % 2 ? 3.0 : 2.0, 0.3};
    Eigen::VectorXd b = A * v;
    Eigen::VectorXd w = vp_map<double>(A, b, hp);
    CHECK(w.lpNorm<Eigen::Infinity>() <= v.lpNorm<1>() + 1e-9);
    double smin = svd_summary<double>(A).sigma_min;
    CHECK(w.lpNorm<Eigen::Infinity>() <= std::sqrt(5.0) * b.norm() / smin + 1e-9);
  }
}

TEST_CASE("V_p Lipschitz bound") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd A = testutil::random_matrix(2, 4, rng);
    Hyperparams hp{trial % 2 ? 4.0 : 2.0, 0.5};
    Eigen::VectorXd a = testutil::random_vector(2, rng);
    Eigen::VectorXd b = a + 0.1 * testutil::random_vector(2, rng);
    double smin = svd_summary<double>(A).sigma_min;
    double ap = std::pow(hp.alpha, hp.p);
    double C = 1 / (2 * smin) *
               std::pow(std::sqrt(4.0) / (ap * smin) * std::max(a.norm(), b.norm()) + 2,
                        (2 * hp.p - 2) / hp.p);
    double lhs = (vp_map<double>(A, a, hp) - vp_map<double>(A, b, hp)).norm();
    CHECK(lhs <= C * (a - b).norm());
  }
}

TEST_CASE("entropy difference bound") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0, std::exp(-1.0));
  auto xlogx = [](double x) { return x == 0 ? 0.0 : x * std::log(x); };
  for (int trial = 0; trial < 2000; ++trial) {
    const Index N = 1 + trial % 6;
    Eigen::VectorXd a(N), b(N);
    for (Index i = 0; i < N; ++i) {
      a(i) = trial % 7 == 0 && i == 0 ? 0.0 : u(rng);
      b(i) = trial % 3 == 0 ? a(i) + 1e-6 * u(rng) : u(rng);
      b(i) = std::min(b(i), std::exp(-1.0));
    }
    double d = (a - b).norm();
    if (d == 0) continue;
    double lhs = 0;
    for (Index i = 0; i < N; ++i) lhs += std::abs(xlogx(a(i)) - xlogx(b(i)));
    CHECK(lhs <= std::sqrt(double(N)) * d * std::log(N / d) * (1 + 1e-12));
  }
}

TEST_CASE("rank-deficient reduction") {
  Eigen::MatrixXd A(2, 2);
  A << 1, 0, 2, 0;
  auto red = reduce_rank_deficient(A, Eigen::Vector2d(1, 2));
  CHECK(red.rank == 1);
  CHECK(red.A.rows() == 1);
  RegressionInstance ri = make_instance(red.A, red.y);
  for (double p : {2.0, 3.0})
    CHECK((wp_select<double>(ri, p) - Eigen::Vector2d(1, 0)).norm() < 1e-10);

  Eigen::MatrixXd F(2, 3);
  F << 1, 2, 3, 0, 1, 1;
  auto same = reduce_rank_deficient(F, Eigen::Vector2d(1, 1));
  CHECK(same.A == F);
  CHECK(same.rank == 2);

  Eigen::MatrixXd D(2, 3);
  D << 1, -2, 0.5, 1, -2, 0.5;
  auto dup = reduce_rank_deficient(D, Eigen::Vector2d(3, 3));
  REQUIRE(dup.A.rows() == 1);
  Eigen::RowVector3d r(1, -2, 0.5);
  CHECK((dup.A.cwiseAbs() - std::sqrt(2.0) * r.cwiseAbs()).norm() < 1e-12);
  CHECK(std::abs(dup.y(0)) == doctest::Approx(3 * std::sqrt(2.0)));

  CHECK_THROWS_AS(reduce_rank_deficient(Eigen::MatrixXd::Zero(2, 2), Eigen::Vector2d(1, 1)),
                  InvalidInput);
}
