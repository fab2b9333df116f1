#include <doctest.h>

#include <cmath>

#include "dln/bp_oracle.hpp"
#include "dln/constants.hpp"
#include "dln/experiments.hpp"
#include "dln/linalg.hpp"
#include "test_util.hpp"

using namespace dln;

namespace {

Eigen::MatrixXd orthonormal_rows(Index k, Index n, std::mt19937_64& rng) {
  Eigen::MatrixXd M = testutil::random_matrix(n - k, n, rng);
  return nullspace_basis<double>(M).transpose();
}

Eigen::VectorXd log_uniform_diag(Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> e(-6, 6);
  Eigen::VectorXd d(n);
  for (Index i = 0; i < n; ++i) d(i) = std::pow(10.0, e(rng));
  return d;
}

}  // namespace

TEST_CASE("chi small examples") {
  Eigen::MatrixXd B(1, 2);
  B << 1, 0;
  CHECK(chi_constant(B) == doctest::Approx(1.0));
  CHECK(chi_constant(Eigen::MatrixXd::Identity(3, 3)) == doctest::Approx(1.0));

  // one row [1, 1]: both 1-subsets give |[1, 1]| = sqrt(2)
  B << 1, 1;
  auto r = chi_enumerate(B);
  CHECK(r.value == doctest::Approx(std::sqrt(2.0)));
  CHECK(r.subsets_checked == 2);
  CHECK(r.subsets_nonsingular == 2);

  Eigen::MatrixXd bad(2, 3);
  bad << 1, 2, 3, 2, 4, 6;
  CHECK_THROWS_AS(chi_enumerate(bad), RankDeficient);
  CHECK_THROWS_AS(chi_enumerate(Eigen::MatrixXd::Ones(3, 2)), InvalidInput);
}

TEST_CASE("chi samples never exceed the enumeration") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    Index k = 1 + trial % 2, n = k + 2;
    Eigen::MatrixXd B = orthonormal_rows(k, n, rng);
    double chi = chi_constant(B);
    for (int s = 0; s < 300; ++s) {
      Eigen::VectorXd d = log_uniform_diag(n, rng);
      CHECK(chi_sample(B, d) <= chi + 1e-9);
      CHECK(chi_sample_raw(B, d) == doctest::Approx(chi_sample(B, d)).epsilon(1e-8));
    }
    // extreme weights concentrated on the maximising subset approach chi
    auto res = chi_enumerate(B);
    Eigen::VectorXd d = Eigen::VectorXd::Constant(n, 1e-12);
    for (Index j : res.argmax) d(j) = 1.0;
    CHECK(chi_sample(B, d) == doctest::Approx(chi).epsilon(1e-7));
    CHECK(chi_sampled_max(B, 2000, 3) <= chi + 1e-9);
  }
}

TEST_CASE("chi is invariant under row operations and zero columns") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXd B = testutil::random_matrix(2, 4, rng);
    Eigen::MatrixXd T = testutil::random_matrix(2, 2, rng);
    double c = chi_constant(B);
    CHECK(chi_constant(T * B) == doctest::Approx(c).epsilon(1e-8));
    Eigen::MatrixXd Bz(2, 5);
    Bz << B, Eigen::Vector2d::Zero();
    CHECK(chi_constant(Bz) == doctest::Approx(c).epsilon(1e-10));
  }
}

TEST_CASE("script_K examples") {
  CHECK(script_K(Eigen::Matrix2d::Identity()) == 1.0);
  Eigen::MatrixXd A(1, 2);
  A << 1, 1;
  // nullspace spanned by (1, -1)/sqrt2, chi of that row is sqrt(2)
  CHECK(script_K(A) == doctest::Approx(1 + std::sqrt(2.0)));

  std::mt19937_64 rng(6);
  Eigen::MatrixXd M = testutil::random_matrix(1, 4, rng);
  Eigen::MatrixXd Z = nullspace_basis<double>(M);
  Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(testutil::random_matrix(3, 3, rng))
                          .householderQ();
  Eigen::MatrixXd Zr = (Z * Q).transpose();
  CHECK(chi_constant(Zr) + 1 == doctest::Approx(script_K(M)).epsilon(1e-9));
}

TEST_CASE("script_K bounds the constructed correction") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 6; ++trial) {
    Eigen::MatrixXd A = testutil::random_matrix(1 + trial % 2, 4, rng);
    Eigen::MatrixXd Z = nullspace_basis<double>(A);
    Eigen::MatrixXd P = Z * Z.transpose();
    double K = script_K(A);
    for (int s = 0; s < 300; ++s) {
      Eigen::VectorXd u = testutil::random_vector(4, rng);
      Eigen::VectorXd d = log_uniform_diag(4, rng);
      Eigen::MatrixXd ZDZ = Z.transpose() * d.asDiagonal() * Z;
      Eigen::VectorXd v = -Z * ZDZ.ldlt().solve(Z.transpose() * d.asDiagonal() * u);
      Eigen::VectorXd w = u + P * v;
      CHECK((P * d.asDiagonal() * w).norm() <= 1e-8 * (d.maxCoeff() * u.norm()));
      CHECK(w.norm() <= K * u.norm() * (1 + 1e-9));
    }
  }
}

TEST_CASE("c_A examples") {
  CHECK(c_A(Eigen::Matrix2d::Identity()) == 0.0);
  auto r0 = c_A_enumerate(Eigen::Matrix3d::Identity());
  CHECK(r0.argmax.size() == 0);

  // A = [1, 1]: only s = (+1, -1) has a nullspace component, |P s| = sqrt2 and
  // [A; s'] is invertible, so c_A = 1 / sqrt2
  Eigen::MatrixXd A(1, 2);
  A << 1, 1;
  auto r = c_A_enumerate(A);
  CHECK(r.value == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(r.signs_checked == 2);
  CHECK(r.argmax == Eigen::Vector2i(1, -1));

  CHECK_THROWS_AS(c_A(Eigen::MatrixXd::Ones(1, 21)), SizeError);
}

TEST_CASE("condition report") {
  auto rep = condition_report(builtin_instances()[1].A, 500, 1);
  CHECK(rep.script_K == doctest::Approx(rep.chi + 1));
  CHECK(rep.chi_sampled <= rep.chi + 1e-9);
  CHECK(rep.c_A > 0);
  REQUIRE(rep.certificate.size() == 2);
  CHECK(rep.certificate[0].id.rfind("cols{", 0) == 0);
  CHECK(rep.certificate[1].id.rfind("s=+", 0) == 0);

  auto triv = condition_report(Eigen::Matrix2d::Identity(), 10, 1);
  CHECK(triv.script_K == 1.0);
  CHECK(triv.c_A == 0.0);
  CHECK(triv.certificate.empty());
}
