#include "dln/linalg.hpp"

#include <algorithm>

namespace dln {

namespace {

template <class S>
void require_finite(const Mat<S>& A) {
  if (A.rows() < 1 || A.cols() < 1) throw InvalidInput("empty matrix");
  for (Index j = 0; j < A.cols(); ++j)
    for (Index i = 0; i < A.rows(); ++i) {
      using std::isfinite;
      using boost::multiprecision::isfinite;
      if (!isfinite(A(i, j))) throw InvalidInput("matrix has non-finite entries");
    }
}

template <class S>
Index count_rank(const Vec<S>& sv, const S& tol) {
  Index r = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++r;
  return r;
}

}  // namespace

template <class S>
S default_rank_tol(Index rows, Index cols, const S& sigma1) {
  return S(std::max(rows, cols)) * sigma1 * S(1e-12);
}

template <class S>
SvdSummary<S> svd_summary(const Mat<S>& A, S tol) {
  require_finite(A);
  Eigen::JacobiSVD<Mat<S>> svd(A);
  SvdSummary<S> out;
  out.singular_values = svd.singularValues();
  out.op_norm = out.singular_values(0);
  if (tol <= 0) tol = default_rank_tol(A.rows(), A.cols(), out.op_norm);
  out.rank = count_rank(out.singular_values, tol);
  out.sigma_min = out.singular_values(out.singular_values.size() - 1);
  return out;
}

template <class S>
ThinQR<S> thin_qr(const Mat<S>& A, S tol) {
  auto sv = svd_summary(A, tol);
  if (sv.rank == 0) throw InvalidInput("thin_qr of a zero matrix");
  Eigen::ColPivHouseholderQR<Mat<S>> qr(A);
  ThinQR<S> out;
  out.Q = qr.householderQ() * Mat<S>::Identity(A.rows(), sv.rank);
  out.R = out.Q.transpose() * A;
  return out;
}

template <class S>
Mat<S> nullspace_basis(const Mat<S>& A, S tol) {
  require_finite(A);
  Eigen::JacobiSVD<Mat<S>> svd(A, Eigen::ComputeFullV);
  const Vec<S>& sv = svd.singularValues();
  if (tol <= 0) tol = default_rank_tol(A.rows(), A.cols(), sv(0));
  Index r = count_rank(sv, tol);
  Index n = A.cols();
  return svd.matrixV().rightCols(n - r);
}

template <class S>
Mat<S> nullspace_projector(const Mat<S>& A, S tol) {
  Mat<S> B = nullspace_basis(A, tol);
  return B * B.transpose();
}

template <class S>
Vec<S> min_norm_solution(const Mat<S>& A, const Vec<S>& b, S tol) {
  require_finite(A);
  Eigen::JacobiSVD<Mat<S>> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec<S>& sv = svd.singularValues();
  if (tol <= 0) tol = default_rank_tol(A.rows(), A.cols(), sv(0));
  Index r = count_rank(sv, tol);
  Vec<S> c = svd.matrixU().leftCols(r).transpose() * b;
  for (Index i = 0; i < r; ++i) c(i) /= sv(i);
  return svd.matrixV().leftCols(r) * c;
}

template <class S>
S op_norm(const Mat<S>& A) {
  Eigen::JacobiSVD<Mat<S>> svd(A);
  return svd.singularValues()(0);
}

#define DLN_INSTANTIATE(S)                                                   \
  template S default_rank_tol<S>(Index, Index, const S&);                   \
  template SvdSummary<S> svd_summary<S>(const Mat<S>&, S);                  \
  template ThinQR<S> thin_qr<S>(const Mat<S>&, S);                          \
  template Mat<S> nullspace_basis<S>(const Mat<S>&, S);                     \
  template Mat<S> nullspace_projector<S>(const Mat<S>&, S);                 \
  template Vec<S> min_norm_solution<S>(const Mat<S>&, const Vec<S>&, S);    \
  template S op_norm<S>(const Mat<S>&);

DLN_INSTANTIATE(double)
DLN_INSTANTIATE(quad)

#undef DLN_INSTANTIATE

}  // namespace dln
