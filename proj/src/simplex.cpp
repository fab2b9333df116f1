#include "dln/simplex.hpp"

#include <cmath>
#include <limits>

namespace dln {

namespace {

struct Tableau {
  Eigen::MatrixXd T;  // rows 0..m-1 constraints, row m objective; last column rhs
  std::vector<Index> basis;
  Index ncols;  // structural + artificial columns
  double tol;

  void pivot(Index r, Index c) {
    T.row(r) /= T(r, c);
    for (Index i = 0; i < T.rows(); ++i)
      if (i != r && T(i, c) != 0.0) T.row(i) -= T(i, c) * T.row(r);
    basis[r] = c;
  }

  // Bland's rule; columns >= allowed are never entered
  LpStatus run(Index allowed) {
    const Index m = static_cast<Index>(basis.size());
    const Index rhs = T.cols() - 1;
    for (int iter = 0; iter < 100000; ++iter) {
      Index enter = -1;
      for (Index j = 0; j < allowed; ++j)
        if (T(m, j) < -tol) {
          enter = j;
          break;
        }
      if (enter < 0) return LpStatus::optimal;
      Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < m; ++i) {
        if (T(i, enter) > tol) {
          double ratio = T(i, rhs) / T(i, enter);
          if (ratio < best - 1e-14 ||
              (std::abs(ratio - best) <= 1e-14 && basis[i] < basis[leave])) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return LpStatus::unbounded;
      pivot(leave, enter);
    }
    throw NumericalFailure("simplex iteration limit reached");
  }
};

}  // namespace

LpResult simplex(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                 const Eigen::VectorXd& c) {
  const Index m = A.rows(), n = A.cols();
  if (b.size() != m || c.size() != n) throw InvalidInput("simplex: shape mismatch");
  if (!A.allFinite() || !b.allFinite() || !c.allFinite())
    throw InvalidInput("simplex: non-finite data");

  double scale = std::max({1.0, A.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
  Tableau tab;
  tab.tol = 1e-11 * scale;
  tab.ncols = n + m;
  tab.T = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
  tab.basis.resize(m);
  for (Index i = 0; i < m; ++i) {
    double sg = b(i) < 0 ? -1.0 : 1.0;
    tab.T.row(i).head(n) = sg * A.row(i);
    tab.T(i, n + i) = 1.0;
    tab.T(i, n + m) = sg * b(i);
    tab.basis[i] = n + i;
  }

  // phase 1: minimise the sum of artificials
  for (Index i = 0; i < m; ++i) tab.T.row(m) -= tab.T.row(i);
  for (Index i = 0; i < m; ++i) tab.T(m, n + i) = 0.0;
  tab.run(n + m);

  LpResult out;
  if (-tab.T(m, n + m) > 1e-9 * scale) {
    out.status = LpStatus::infeasible;
    return out;
  }

  // drive remaining artificials out; rows with no structural pivot are redundant
  std::vector<Index> keep;
  for (Index i = 0; i < m; ++i) {
    if (tab.basis[i] >= n) {
      Index col = -1;
      for (Index j = 0; j < n; ++j)
        if (std::abs(tab.T(i, j)) > tab.tol) {
          col = j;
          break;
        }
      if (col >= 0) tab.pivot(i, col);
    }
    if (tab.basis[i] < n) keep.push_back(i);
  }
  if (static_cast<Index>(keep.size()) < m) {
    Eigen::MatrixXd T2(keep.size() + 1, tab.T.cols());
    std::vector<Index> b2;
    for (size_t k = 0; k < keep.size(); ++k) {
      T2.row(k) = tab.T.row(keep[k]);
      b2.push_back(tab.basis[keep[k]]);
    }
    tab.T = T2;
    tab.basis = b2;
  }
  const Index mk = static_cast<Index>(tab.basis.size());

  // phase 2 objective row: reduced costs c_j - c_B' B^{-1} a_j
  tab.T.row(mk).setZero();
  tab.T.row(mk).head(n) = c.transpose();
  for (Index i = 0; i < mk; ++i) tab.T.row(mk) -= c(tab.basis[i]) * tab.T.row(i);
  LpStatus st = tab.run(n);
  out.status = st;
  if (st != LpStatus::optimal) return out;

  out.x = Eigen::VectorXd::Zero(n);
  for (Index i = 0; i < mk; ++i) out.x(tab.basis[i]) = tab.T(i, tab.T.cols() - 1);
  out.value = c.dot(out.x);
  out.basis = tab.basis;
  return out;
}

}  // namespace dln
