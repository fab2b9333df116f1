#include "dln/constants.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "dln/linalg.hpp"

namespace dln {

namespace {

std::string subset_id(const std::vector<Index>& J) {
  std::ostringstream os;
  os << "cols{";
  for (size_t i = 0; i < J.size(); ++i) os << (i ? "," : "") << J[i];
  os << "}";
  return os.str();
}

std::string sign_id(const Eigen::VectorXi& s) {
  std::string out = "s=";
  for (Index i = 0; i < s.size(); ++i) out += s(i) > 0 ? '+' : '-';
  return out;
}

// visits every k-subset of {0..n-1} in lexicographic order
template <class F>
void for_each_subset(Index n, Index k, F&& f) {
  std::vector<Index> J(k);
  for (Index i = 0; i < k; ++i) J[i] = i;
  if (k > n) return;
  while (true) {
    f(J);
    Index i = k - 1;
    while (i >= 0 && J[i] == n - k + i) --i;
    if (i < 0) return;
    ++J[i];
    for (Index j = i + 1; j < k; ++j) J[j] = J[j - 1] + 1;
  }
}

}  // namespace

ChiResult chi_enumerate(const Eigen::MatrixXd& B) {
  if (B.rows() < 1 || B.cols() < B.rows()) throw InvalidInput("B must be k x n with k <= n");
  if (!B.allFinite()) throw InvalidInput("B must be finite");
  auto sv = svd_summary<double>(B);
  if (sv.rank < B.rows()) throw RankDeficient("B must have full row rank");
  const Index k = B.rows();
  const double tol = 1e-12 * sv.op_norm * double(B.cols());
  ChiResult res;
  for_each_subset(B.cols(), k, [&](const std::vector<Index>& J) {
    ++res.subsets_checked;
    Eigen::MatrixXd BJ(k, k);
    for (Index j = 0; j < k; ++j) BJ.col(j) = B.col(J[j]);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(BJ);
    if (svd.singularValues()(k - 1) <= tol) return;
    ++res.subsets_nonsingular;
    double v = op_norm<double>(Eigen::MatrixXd(BJ.fullPivLu().solve(B)));
    if (v > res.value) {
      res.value = v;
      res.argmax = J;
    }
  });
  return res;
}

double chi_constant(const Eigen::MatrixXd& B) { return chi_enumerate(B).value; }

double chi_sample_raw(const Eigen::MatrixXd& B, const Eigen::VectorXd& d) {
  if (d.size() != B.cols() || !(d.minCoeff() > 0)) throw InvalidInput("d must be positive");
  Eigen::MatrixXd BD = B * d.asDiagonal();
  Eigen::MatrixXd M = BD * B.transpose();
  return op_norm<double>(Eigen::MatrixXd(M.ldlt().solve(BD)));
}

double chi_sample(const Eigen::MatrixXd& B, const Eigen::VectorXd& d) {
  if (d.size() != B.cols() || !(d.minCoeff() > 0)) throw InvalidInput("d must be positive");
  Eigen::MatrixXd BD = B * d.asDiagonal();
  Eigen::MatrixXd M = BD * B.transpose();
  Eigen::MatrixXd X = M.ldlt().solve(BD);
  return op_norm<double>(Eigen::MatrixXd(B.transpose() * X));
}

double chi_sampled_max(const Eigen::MatrixXd& B, long count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> expo(-8.0, 8.0);
  Eigen::VectorXd d(B.cols());
  double best = 0.0;
  for (long i = 0; i < count; ++i) {
    for (Index j = 0; j < d.size(); ++j) d(j) = std::pow(10.0, expo(rng));
    best = std::max(best, chi_sample(B, d));
  }
  return best;
}

double script_K(const Eigen::MatrixXd& A) {
  if (!A.allFinite()) throw InvalidInput("A must be finite");
  Eigen::MatrixXd Z = nullspace_basis<double>(A);
  if (Z.cols() == 0) return 1.0;
  return chi_constant(Z.transpose()) + 1.0;
}

CAResult c_A_enumerate(const Eigen::MatrixXd& A) {
  const Index n = A.cols();
  if (!A.allFinite()) throw InvalidInput("A must be finite");
  if (n > kMaxSignEnumerationN) throw SizeError("c_A enumerates 2^N sign vectors; N is too large");
  CAResult res;
  Eigen::MatrixXd P = nullspace_projector<double>(A);
  if (P.norm() == 0.0) return res;
  Eigen::MatrixXd As(A.rows() + 1, n);
  As.topRows(A.rows()) = A;
  Eigen::VectorXi s(n);
  // s and -s give the same value, so fix s_0 = +1
  const std::uint64_t total = std::uint64_t(1) << (n - 1);
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    s(0) = 1;
    for (Index i = 1; i < n; ++i) s(i) = (mask >> (i - 1)) & 1 ? -1 : 1;
    ++res.signs_checked;
    Eigen::VectorXd sd = s.cast<double>();
    double pn = (P * sd).norm();
    if (pn <= 1e-12 * std::sqrt(double(n))) continue;
    As.row(A.rows()) = sd.transpose();
    double v = script_K(As) / pn;
    if (v > res.value) {
      res.value = v;
      res.argmax = s;
    }
  }
  return res;
}

double c_A(const Eigen::MatrixXd& A) { return c_A_enumerate(A).value; }

ConditionReport condition_report(const Eigen::MatrixXd& A, long samples, std::uint64_t seed) {
  ConditionReport rep;
  Eigen::MatrixXd Z = nullspace_basis<double>(A);
  if (Z.cols() > 0) {
    ChiResult chi = chi_enumerate(Z.transpose());
    rep.chi = chi.value;
    rep.certificate.push_back({subset_id(chi.argmax), chi.value});
    rep.chi_sampled = chi_sampled_max(Z.transpose(), samples, seed);
    rep.script_K = chi.value + 1.0;
  } else {
    rep.chi_sampled = 1.0;
  }
  CAResult ca = c_A_enumerate(A);
  rep.c_A = ca.value;
  if (ca.argmax.size() > 0) rep.certificate.push_back({sign_id(ca.argmax), ca.value});
  return rep;
}

}  // namespace dln
