#pragma once

#include <vector>

#include "dln/common.hpp"

namespace dln {

template <class S>
struct BpSolution {
  Vec<S> x;  // optimal vertex, recomputed in S from the simplex basis
  S R = 0;   // minimum l1 norm
  std::vector<Index> support;  // coordinates of the basic columns
};

// min |x|_1 s.t. A x = y
template <class S>
BpSolution<S> solve_bp(const RegressionInstance& inst);

// The minimiser set U(A, y) as a face of the l1 ball
template <class S>
struct SolutionFace {
  Eigen::VectorXi s;  // +1 on coordinates that vanish on the whole face
  S R = 0;
  Mat<S> augmented;                // [A; s']
  std::vector<Index> forced_zeros;
  std::vector<Vec<S>> vertices;   // filled when enumerated
  Vec<S> vertex;    // one optimal vertex
  Vec<S> interior;  // a point in the relative interior
};

constexpr Index kMaxEnumerationN = 12;

template <class S>
SolutionFace<S> optimal_face(const RegressionInstance& inst, bool enumerate_vertices = true);

// argmax of the entropy (p = 2) or of sum |z_i|^(2/p) (p > 2) over the face
template <class S>
Vec<S> wp_select(const SolutionFace<S>& face, const RegressionInstance& inst, double p);
template <class S>
Vec<S> wp_select(const RegressionInstance& inst, double p);

// V_p(A, b) = argmin Q_p(z) s.t. A z = b; `start` is an optional feasible guess
template <class S>
Vec<S> vp_map(const Mat<S>& A, const Vec<S>& b, const Hyperparams& hp,
              const Vec<S>* start = nullptr);

template <class S>
Vec<S> solve_qstar(const RegressionInstance& inst, const Hyperparams& hp,
                   const Vec<S>* start = nullptr);

// argmin Q_p over the face, log-barrier path followed by an active-set polish
template <class S>
Vec<S> solve_mstar(const SolutionFace<S>& face, const RegressionInstance& inst,
                   const Hyperparams& hp);

// argmin G_p over the face by a log-barrier path
template <class S>
Vec<S> solve_gstar(const SolutionFace<S>& face, const RegressionInstance& inst,
                   const Hyperparams& hp, double gap_tol = 1e-14);

template <class S>
struct KktCertificate {
  Vec<S> lambda;
  Vec<S> mu;
  S stationarity_residual = 0;
  S complementarity_residual = 0;
  S primal_residual = 0;
};

// min f(x) s.t. Aeq x = beq, Bin x >= zin; multipliers by least squares with
// an active-set sign repair so that mu >= -1e-10
template <class S>
KktCertificate<S> verify_kkt(const Vec<S>& x, const Vec<S>& grad, const Mat<S>& Aeq,
                             const Vec<S>& beq, const Mat<S>& Bin, const Vec<S>& zin,
                             S active_tol = S(1e-9));

template <class S>
struct MinimizerSet {
  Vec<S> q_star, m_star, g_star, w_p;
  S qm = 0, mg = 0, qg = 0;
};

template <class S>
MinimizerSet<S> minimizer_set(const RegressionInstance& inst, const Hyperparams& hp);

struct ReducedSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd y;
  Index rank = 0;
};

// (Q'A, Q'y) from a thin QR of A; full-rank input is returned unchanged
ReducedSystem reduce_rank_deficient(const Eigen::MatrixXd& A, const Eigen::VectorXd& y);

}  // namespace dln
