#pragma once

#include "dln/common.hpp"

namespace dln {

template <class S>
struct SvdSummary {
  Vec<S> singular_values;  // non-increasing
  Index rank = 0;
  S sigma_min = 0;  // smallest of the first min(m, N) values
  S op_norm = 0;
};

// max(m, N) * sigma_1 * 1e-12
template <class S>
S default_rank_tol(Index rows, Index cols, const S& sigma1);

// tol <= 0 selects default_rank_tol
template <class S>
SvdSummary<S> svd_summary(const Mat<S>& A, S tol = S(0));

template <class S>
struct ThinQR {
  Mat<S> Q;  // m x rank, orthonormal columns
  Mat<S> R;  // rank x N, Q * R == A
};

template <class S>
ThinQR<S> thin_qr(const Mat<S>& A, S tol = S(0));

// N x (N - rank) with orthonormal columns; N x 0 when the nullspace is trivial
template <class S>
Mat<S> nullspace_basis(const Mat<S>& A, S tol = S(0));

template <class S>
Mat<S> nullspace_projector(const Mat<S>& A, S tol = S(0));

// minimum-norm least-squares solution via the truncated SVD
template <class S>
Vec<S> min_norm_solution(const Mat<S>& A, const Vec<S>& b, S tol = S(0));

template <class S>
S op_norm(const Mat<S>& A);

}  // namespace dln
