#include "dln/bp_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dln/linalg.hpp"
#include "dln/scalar_funcs.hpp"
#include "dln/simplex.hpp"

namespace dln {

namespace {

using std::abs;
using std::log;
using std::max;
using std::min;
using std::pow;
using std::sqrt;

template <class S>
S eps_of() {
  return std::numeric_limits<S>::epsilon();
}

template <class S>
S inf_norm(const Vec<S>& v) {
  S m = 0;
  for (Index i = 0; i < v.size(); ++i) m = max(m, S(abs(v(i))));
  return m;
}

template <class S>
S l1_norm(const Vec<S>& v) {
  S m = 0;
  for (Index i = 0; i < v.size(); ++i) m += abs(v(i));
  return m;
}

// value, gradient and Hessian diagonal of a separable objective
template <class S>
struct SepEval {
  S value = 0;
  Vec<S> grad;
  Vec<S> hess;
  bool ok = true;
};

// Damped Newton on f(w0 + B c). With `positive` the iterate stays in w > 0
// through a fraction-to-boundary rule.
template <class S, class F>
Vec<S> nullspace_newton(F&& f, Vec<S> w, const Mat<S>& B, bool positive, int max_iter,
                        const char* what) {
  if (B.cols() == 0) return w;
  SepEval<S> e = f(w);
  if (!e.ok) throw NumericalFailure(std::string(what) + ": infeasible start");
  const S tiny = 10 * eps_of<S>();
  const S noise = sqrt(eps_of<S>()) * S(1e-3);
  S prev_step = std::numeric_limits<S>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    Vec<S> g = B.transpose() * e.grad;
    Mat<S> H = B.transpose() * e.hess.asDiagonal() * B;
    Vec<S> d = H.ldlt().solve(-g);
    Vec<S> dw = B * d;
    S dec = -g.dot(d);
    S wscale = max(S(1), inf_norm(w));
    S size = inf_norm(dw);
    if (size <= tiny * wscale) return w;
    // gradient noise floor: the step stopped shrinking once tiny
    if (size <= noise * wscale && size >= S(0.5) * prev_step) return w;
    prev_step = size;

    S step = 1;
    if (positive)
      for (Index i = 0; i < w.size(); ++i)
        if (dw(i) < 0) step = min(step, S(-0.99) * w(i) / dw(i));
    bool accepted = false;
    for (int ls = 0; ls < 200; ++ls) {
      Vec<S> wn = w + step * dw;
      SepEval<S> en = f(wn);
      if (en.ok) {
        S floor = 100 * eps_of<S>() * (1 + abs(e.value));
        bool armijo = en.value <= e.value - S(1e-4) * step * dec;
        bool flat = abs(en.value - e.value) <= floor && dec <= floor;
        if (armijo || flat) {
          w = wn;
          e = en;
          accepted = true;
          break;
        }
      }
      step /= 2;
    }
    if (!accepted) {
      if (size <= noise * wscale) return w;
      std::ostringstream os;
      os << what << ": line search failed at iteration " << it << " (step size "
         << static_cast<double>(size) << ")";
      throw NumericalFailure(os.str());
    }
  }
  std::ostringstream os;
  os << what << ": no convergence in " << max_iter << " Newton iterations";
  throw NumericalFailure(os.str());
}

// z = diag(s) w on the free coordinates, zero elsewhere
template <class S>
Vec<S> scatter(const std::vector<Index>& free, const Eigen::VectorXi& s, const Vec<S>& w,
               Index n) {
  Vec<S> z = Vec<S>::Zero(n);
  for (size_t k = 0; k < free.size(); ++k) z(free[k]) = S(s(free[k])) * w(Index(k));
  return z;
}

template <class S>
struct FaceCoords {
  std::vector<Index> free;
  Mat<S> E;  // [A_F diag(s_F); 1']
  Vec<S> b;  // [y; R]
  Mat<S> B;  // orthonormal nullspace basis of E
  Vec<S> w0; // strictly positive point of the face
};

template <class S>
FaceCoords<S> face_coords(const SolutionFace<S>& face, const RegressionInstance& inst) {
  const Index m = inst.A.rows(), n = inst.A.cols();
  FaceCoords<S> fc;
  std::vector<bool> forced(n, false);
  for (Index j : face.forced_zeros) forced[j] = true;
  for (Index j = 0; j < n; ++j)
    if (!forced[j]) fc.free.push_back(j);
  const Index nf = static_cast<Index>(fc.free.size());
  if (nf == 0) throw NumericalFailure("solution face has no free coordinates");
  Mat<S> A = inst.A.cast<S>();
  fc.E.resize(m + 1, nf);
  for (Index k = 0; k < nf; ++k) {
    Index j = fc.free[k];
    fc.E.col(k).head(m) = A.col(j) * S(face.s(j));
    fc.E(m, k) = 1;
  }
  fc.b.resize(m + 1);
  fc.b.head(m) = inst.y.cast<S>();
  fc.b(m) = face.R;
  fc.B = nullspace_basis<S>(fc.E);
  Vec<S> v(nf), wi(nf);
  for (Index k = 0; k < nf; ++k) {
    Index j = fc.free[k];
    v(k) = S(face.s(j)) * face.vertex(j);
    wi(k) = S(face.s(j)) * face.interior(j);
  }
  // keep the exact affine position of the vertex, move along the face only
  fc.w0 = v + fc.B * (fc.B.transpose() * (wi - v));
  for (Index k = 0; k < nf; ++k)
    if (!(fc.w0(k) > 0))
      throw NumericalFailure("relative-interior point of the face is not interior");
  return fc;
}

// positive-domain log barrier path for a separable convex objective on the face
template <class S, class F>
Vec<S> barrier_path(F&& obj, const FaceCoords<S>& fc, S curvature_scale, S gap_tol,
                    const char* what) {
  Vec<S> w = fc.w0;
  const S nf = S(w.size());
  S tau = 1 / curvature_scale;
  for (int outer = 0; outer < 80; ++outer) {
    auto f = [&](const Vec<S>& x) {
      SepEval<S> e = obj(x);
      SepEval<S> r;
      r.ok = e.ok;
      for (Index i = 0; i < x.size(); ++i)
        if (!(x(i) > 0)) r.ok = false;
      if (!r.ok) return r;
      r.value = tau * e.value;
      r.grad = tau * e.grad;
      r.hess = tau * e.hess;
      for (Index i = 0; i < x.size(); ++i) {
        r.value -= log(x(i));
        r.grad(i) -= 1 / x(i);
        r.hess(i) += 1 / (x(i) * x(i));
      }
      return r;
    };
    w = nullspace_newton<S>(f, w, fc.B, true, 500, what);
    if (nf / tau <= gap_tol * curvature_scale) break;
    tau *= 10;
  }
  return w;
}

}  // namespace

template <class S>
BpSolution<S> solve_bp(const RegressionInstance& inst) {
  validate(inst);
  const Index m = inst.A.rows(), n = inst.A.cols();
  Eigen::MatrixXd Alp(m, 2 * n);
  Alp << inst.A, -inst.A;
  LpResult lp = simplex(Alp, inst.y, Eigen::VectorXd::Ones(2 * n));
  if (lp.status != LpStatus::optimal) throw NumericalFailure("basis pursuit LP failed");

  BpSolution<S> out;
  for (Index col : lp.basis) out.support.push_back(col % n);
  const Index k = static_cast<Index>(out.support.size());
  Mat<S> AJ(m, k);
  Mat<S> A = inst.A.cast<S>();
  for (Index i = 0; i < k; ++i) AJ.col(i) = A.col(out.support[i]);
  Vec<S> y = inst.y.cast<S>();
  Vec<S> xj = k == m ? Vec<S>(AJ.partialPivLu().solve(y)) : min_norm_solution<S>(AJ, y);
  out.x = Vec<S>::Zero(n);
  for (Index i = 0; i < k; ++i) out.x(out.support[i]) = xj(i);
  Eigen::VectorXd xlp = lp.x.head(n) - lp.x.tail(n);
  double dev = 0;
  for (Index j = 0; j < n; ++j) dev = max(dev, std::abs(double(out.x(j)) - xlp(j)));
  if (dev > 1e-7 * max(1.0, xlp.cwiseAbs().maxCoeff()))
    throw NumericalFailure("basis pursuit vertex refinement disagrees with the LP");
  out.R = l1_norm(out.x);
  return out;
}

template <class S>
SolutionFace<S> optimal_face(const RegressionInstance& inst, bool enumerate_vertices) {
  const Index m = inst.A.rows(), n = inst.A.cols();
  if (enumerate_vertices && n > kMaxEnumerationN)
    throw SizeError("vertex enumeration limited to N <= 12");
  BpSolution<S> bp = solve_bp<S>(inst);
  const double R = static_cast<double>(bp.R);

  // face of the slightly relaxed polytope {A z = y, |z|_1 <= R (1 + 1e-12)}
  Eigen::MatrixXd Af = Eigen::MatrixXd::Zero(m + 1, 2 * n + 1);
  Af.topLeftCorner(m, n) = inst.A;
  Af.block(0, n, m, n) = -inst.A;
  Af.row(m).setOnes();
  Eigen::VectorXd bf(m + 1);
  bf.head(m) = inst.y;
  bf(m) = R * (1 + 1e-12) + 1e-300;
  const double ztol = 1e-7 * max(1.0, R);

  SolutionFace<S> face;
  face.s = Eigen::VectorXi::Ones(n);
  face.R = bp.R;
  face.vertex = bp.x;
  Eigen::VectorXd interior = Eigen::VectorXd::Zero(n);
  int nfree = 0;
  for (Index j = 0; j < n; ++j) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * n + 1);
    c(j) = -1;
    c(n + j) = 1;
    LpResult up = simplex(Af, bf, c);
    LpResult dn = simplex(Af, bf, -c);
    if (up.status != LpStatus::optimal || dn.status != LpStatus::optimal)
      throw NumericalFailure("face LP failed");
    double zmax = -up.value, zmin = dn.value;
    if (zmax > ztol && zmin < -ztol)
      throw NumericalFailure("solution face is not contained in a single orthant");
    if (zmax > ztol || zmin < -ztol) {
      const LpResult& best = zmax > ztol ? up : dn;
      face.s(j) = zmax > ztol ? 1 : -1;
      interior += best.x.head(n) - best.x.segment(n, n);
      ++nfree;
    } else {
      face.forced_zeros.push_back(j);
    }
  }
  interior /= std::max(nfree, 1);
  face.interior = interior.cast<S>();

  Mat<S> A = inst.A.cast<S>();
  face.augmented.resize(m + 1, n);
  face.augmented.topRows(m) = A;
  for (Index j = 0; j < n; ++j) face.augmented(m, j) = S(face.s(j));

  if (enumerate_vertices) {
    Vec<S> y = inst.y.cast<S>();
    std::vector<Index> idx(m);
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + m, true);
    do {
      Index k = 0;
      for (Index j = 0; j < n; ++j)
        if (pick[j]) idx[k++] = j;
      Mat<S> AJ(m, m);
      for (Index i = 0; i < m; ++i) AJ.col(i) = A.col(idx[i]);
      Eigen::FullPivLU<Mat<S>> lu(AJ);
      lu.setThreshold(S(1e-10));
      if (!lu.isInvertible()) continue;
      Vec<S> zj = lu.solve(y);
      Vec<S> z = Vec<S>::Zero(n);
      for (Index i = 0; i < m; ++i) z(idx[i]) = zj(i);
      S vtol = S(1e-9) * max(S(1), inf_norm(z));
      bool ok = abs(l1_norm(z) - face.R) <= S(1e-9) * max(S(1), face.R);
      for (Index j = 0; j < n && ok; ++j)
        if (S(face.s(j)) * z(j) < -vtol) ok = false;
      for (Index j : face.forced_zeros)
        if (abs(z(j)) > vtol) ok = false;
      if (!ok) continue;
      bool dup = false;
      for (const auto& v : face.vertices)
        if (inf_norm(Vec<S>(v - z)) <= vtol) dup = true;
      if (!dup) face.vertices.push_back(z);
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  return face;
}

template <class S>
Vec<S> wp_select(const SolutionFace<S>& face, const RegressionInstance& inst, double p) {
  if (!(p >= 2.0)) throw InvalidInput("p must be >= 2");
  FaceCoords<S> fc = face_coords(face, inst);
  const S r = 2 / S(p);
  auto f = [&](const Vec<S>& w) {
    SepEval<S> e;
    e.grad.resize(w.size());
    e.hess.resize(w.size());
    for (Index i = 0; i < w.size(); ++i) {
      if (!(w(i) > 0)) {
        e.ok = false;
        return e;
      }
      if (p == 2.0) {
        S lw = log(w(i));
        e.value += w(i) * lw;
        e.grad(i) = lw + 1;
        e.hess(i) = 1 / w(i);
      } else {
        S pw = pow(w(i), r);
        e.value -= pw;
        e.grad(i) = -r * pw / w(i);
        e.hess(i) = r * (1 - r) * pw / (w(i) * w(i));
      }
    }
    return e;
  };
  Vec<S> w = nullspace_newton<S>(f, fc.w0, fc.B, true, 500, "wp_select");
  return scatter(fc.free, face.s, w, inst.A.cols());
}

template <class S>
Vec<S> wp_select(const RegressionInstance& inst, double p) {
  return wp_select<S>(optimal_face<S>(inst, false), inst, p);
}

template <class S>
Vec<S> vp_map(const Mat<S>& A, const Vec<S>& b, const Hyperparams& hp, const Vec<S>* start) {
  validate(hp);
  Mat<S> B = nullspace_basis<S>(A);
  Vec<S> z0 = min_norm_solution<S>(A, b);
  if (B.cols() == 0) return z0;

  auto run = [&](const Vec<S>& from, S ap) {
    auto f = [&](const Vec<S>& z) {
      SepEval<S> e;
      e.grad.resize(z.size());
      e.hess.resize(z.size());
      for (Index i = 0; i < z.size(); ++i) {
        S u = z(i) / ap;
        e.value += ap * q_p(u, hp.p);
        e.grad(i) = h_p_inv(u, hp.p);
        e.hess(i) = q_p_second(u, hp.p) / ap;
      }
      return e;
    };
    return nullspace_newton<S>(f, from, B, false, 300, "vp_map");
  };

  const S ap = alpha_pow<S>(hp);
  if (start) {
    // project the guess onto the affine set before polishing
    Vec<S> s0 = z0 + B * (B.transpose() * (*start - z0));
    try {
      return run(s0, ap);
    } catch (const NumericalFailure&) {
    }
  }
  // continuation in alpha^p from the nearly quadratic regime
  S ap_cur = max(ap, S(10) * max(inf_norm(z0), S(1e-300)));
  Vec<S> z = z0;
  for (;;) {
    z = run(z, ap_cur);
    if (ap_cur <= ap) break;
    ap_cur = max(ap, ap_cur / 10);
  }
  return z;
}

template <class S>
Vec<S> solve_qstar(const RegressionInstance& inst, const Hyperparams& hp, const Vec<S>* start) {
  validate(inst);
  Mat<S> A = inst.A.cast<S>();
  Vec<S> y = inst.y.cast<S>();
  return vp_map<S>(A, y, hp, start);
}

template <class S>
Vec<S> solve_gstar(const SolutionFace<S>& face, const RegressionInstance& inst,
                   const Hyperparams& hp, double gap_tol) {
  validate(hp);
  FaceCoords<S> fc = face_coords(face, inst);
  const S ap = alpha_pow<S>(hp);
  const double p = hp.p;
  // the linear part of G_p is constant on the face and left out of the value
  const S scale = p == 2.0 ? S(1) : pow(S(hp.alpha), S(p) - 2);
  auto obj = [&](const Vec<S>& w) {
    SepEval<S> e;
    e.grad.resize(w.size());
    e.hess.resize(w.size());
    for (Index i = 0; i < w.size(); ++i) {
      if (!(w(i) > 0)) {
        e.ok = false;
        return e;
      }
      S u = w(i) / ap;
      S lin = p == 2.0 ? S(-u) : u;
      e.value += ap * (g_p(u, p) - lin) / scale;
      e.grad(i) = g_p_prime(u, p) / scale;
      e.hess(i) = (p == 2.0 ? 1 / u : (1 - 2 / S(p)) * pow(u, 2 / S(p) - 2)) / (ap * scale);
    }
    return e;
  };
  Vec<S> w = barrier_path<S>(obj, fc, S(1), S(gap_tol), "solve_gstar");
  return scatter(fc.free, face.s, w, inst.A.cols());
}

template <class S>
Vec<S> solve_mstar(const SolutionFace<S>& face, const RegressionInstance& inst,
                   const Hyperparams& hp) {
  validate(hp);
  FaceCoords<S> fc = face_coords(face, inst);
  const S ap = alpha_pow<S>(hp);
  const double p = hp.p;
  auto obj = [&](const Vec<S>& w) {
    SepEval<S> e;
    e.grad.resize(w.size());
    e.hess.resize(w.size());
    for (Index i = 0; i < w.size(); ++i) {
      S u = w(i) / ap;
      e.value += ap * q_p(u, p) - w(i);
      e.grad(i) = h_p_inv(u, p) - 1;
      e.hess(i) = q_p_second(u, p) / ap;
    }
    return e;
  };
  // Q_p varies on the face at the scale of its Hessian along the face
  S curv = 0;
  {
    SepEval<S> e0 = obj(fc.w0);
    Mat<S> H = fc.B.transpose() * e0.hess.asDiagonal() * fc.B;
    curv = H.cols() ? S(H.diagonal().maxCoeff()) : S(1);
    if (!(curv > 0)) curv = 1;
  }
  Vec<S> wb = barrier_path<S>(obj, fc, curv, S(1e-14), "solve_mstar");
  const Index nf = wb.size();

  // active-set polish: pin the coordinates whose barrier multiplier dominates
  std::vector<Index> act;
  S wmax = inf_norm(wb);
  for (Index i = 0; i < nf; ++i)
    if (wb(i) < sqrt(eps_of<S>()) * wmax) act.push_back(i);
  if (act.empty() || fc.B.cols() == 0) return scatter(fc.free, face.s, wb, inst.A.cols());

  const Index me = fc.E.rows();
  Mat<S> E2 = Mat<S>::Zero(me + Index(act.size()), nf);
  Vec<S> b2 = Vec<S>::Zero(E2.rows());
  E2.topRows(me) = fc.E;
  b2.head(me) = fc.b;
  for (size_t k = 0; k < act.size(); ++k) E2(me + Index(k), act[k]) = 1;
  Mat<S> B2 = nullspace_basis<S>(E2);
  Vec<S> ws = wb;
  for (Index i : act) ws(i) = 0;
  ws -= min_norm_solution<S>(E2, Vec<S>(E2 * ws - b2));
  for (Index i : act) ws(i) = 0;
  try {
    Vec<S> wp = nullspace_newton<S>(obj, ws, B2, false, 200, "solve_mstar polish");
    bool feasible = true;
    for (Index i = 0; i < nf; ++i)
      if (wp(i) < -S(1e-14) * wmax) feasible = false;
    if (feasible) {
      for (Index i : act) wp(i) = 0;
      SepEval<S> e = obj(wp);
      Vec<S> grad = e.grad;
      grad.array() += 1;
      auto cert = verify_kkt<S>(wp, grad, fc.E, fc.b, Mat<S>::Identity(nf, nf),
                                Vec<S>::Zero(nf), S(1e-12) * max(S(1), wmax));
      if (cert.mu.size() == 0 || cert.mu.minCoeff() >= S(-1e-10))
        return scatter(fc.free, face.s, wp, inst.A.cols());
    }
  } catch (const NumericalFailure&) {
  }
  return scatter(fc.free, face.s, wb, inst.A.cols());
}

template <class S>
KktCertificate<S> verify_kkt(const Vec<S>& x, const Vec<S>& grad, const Mat<S>& Aeq,
                             const Vec<S>& beq, const Mat<S>& Bin, const Vec<S>& zin,
                             S active_tol) {
  const Index n = x.size(), m = Aeq.rows(), k = Bin.rows();
  if (grad.size() != n || (m && Aeq.cols() != n) || beq.size() != m ||
      (k && Bin.cols() != n) || zin.size() != k)
    throw InvalidInput("verify_kkt: shape mismatch");
  Vec<S> slack = k ? Vec<S>(Bin * x - zin) : Vec<S>();
  std::vector<Index> act;
  for (Index i = 0; i < k; ++i)
    if (slack(i) <= active_tol) act.push_back(i);

  KktCertificate<S> c;
  c.lambda = Vec<S>::Zero(m);
  c.mu = Vec<S>::Zero(k);
  for (;;) {
    const Index na = static_cast<Index>(act.size());
    if (m + na == 0) break;
    Mat<S> M(n, m + na);
    if (m) M.leftCols(m) = Aeq.transpose();
    for (Index j = 0; j < na; ++j) M.col(m + j) = Bin.row(act[j]).transpose();
    Vec<S> coef = min_norm_solution<S>(M, grad);
    Index worst = -1;
    S worst_val = S(-1e-10);
    for (Index j = 0; j < na; ++j)
      if (coef(m + j) < worst_val) {
        worst_val = coef(m + j);
        worst = j;
      }
    if (worst >= 0) {
      act.erase(act.begin() + worst);
      continue;
    }
    c.lambda = coef.head(m);
    c.mu.setZero();
    for (Index j = 0; j < na; ++j) c.mu(act[j]) = coef(m + j);
    break;
  }
  Vec<S> r = grad;
  if (m) r -= Aeq.transpose() * c.lambda;
  if (k) r -= Bin.transpose() * c.mu;
  c.stationarity_residual = inf_norm(r);
  for (Index i = 0; i < k; ++i)
    c.complementarity_residual = max(c.complementarity_residual, S(abs(slack(i) * c.mu(i))));
  S pr = m ? inf_norm(Vec<S>(Aeq * x - beq)) : S(0);
  for (Index i = 0; i < k; ++i) pr = max(pr, S(-slack(i)));
  c.primal_residual = pr;
  return c;
}

template <class S>
MinimizerSet<S> minimizer_set(const RegressionInstance& inst, const Hyperparams& hp) {
  SolutionFace<S> face = optimal_face<S>(inst, false);
  MinimizerSet<S> ms;
  ms.w_p = wp_select<S>(face, inst, hp.p);
  ms.g_star = solve_gstar<S>(face, inst, hp);
  ms.m_star = solve_mstar<S>(face, inst, hp);
  ms.q_star = solve_qstar<S>(inst, hp, &ms.m_star);
  ms.qm = (ms.q_star - ms.m_star).norm();
  ms.mg = (ms.m_star - ms.g_star).norm();
  ms.qg = (ms.q_star - ms.g_star).norm();
  return ms;
}

ReducedSystem reduce_rank_deficient(const Eigen::MatrixXd& A, const Eigen::VectorXd& y) {
  if (A.rows() != y.size()) throw InvalidInput("reduce_rank_deficient: shape mismatch");
  auto sv = svd_summary<double>(A);
  if (sv.rank == 0) throw InvalidInput("reduce_rank_deficient: A is zero");
  ReducedSystem out;
  out.rank = sv.rank;
  if (sv.rank == A.rows()) {
    out.A = A;
    out.y = y;
    return out;
  }
  ThinQR<double> qr = thin_qr<double>(A);
  out.A = qr.Q.transpose() * A;
  out.y = qr.Q.transpose() * y;
  return out;
}

#define DLN_INSTANTIATE(S)                                                               \
  template BpSolution<S> solve_bp<S>(const RegressionInstance&);                         \
  template SolutionFace<S> optimal_face<S>(const RegressionInstance&, bool);             \
  template Vec<S> wp_select<S>(const SolutionFace<S>&, const RegressionInstance&, double); \
  template Vec<S> wp_select<S>(const RegressionInstance&, double);                       \
  template Vec<S> vp_map<S>(const Mat<S>&, const Vec<S>&, const Hyperparams&,            \
                            const Vec<S>*);                                              \
  template Vec<S> solve_qstar<S>(const RegressionInstance&, const Hyperparams&,          \
                                 const Vec<S>*);                                         \
  template Vec<S> solve_mstar<S>(const SolutionFace<S>&, const RegressionInstance&,      \
                                 const Hyperparams&);                                    \
  template Vec<S> solve_gstar<S>(const SolutionFace<S>&, const RegressionInstance&,      \
                                 const Hyperparams&, double);                            \
  template KktCertificate<S> verify_kkt<S>(const Vec<S>&, const Vec<S>&, const Mat<S>&,  \
                                           const Vec<S>&, const Mat<S>&, const Vec<S>&,  \
                                           S);                                           \
  template MinimizerSet<S> minimizer_set<S>(const RegressionInstance&, const Hyperparams&);

DLN_INSTANTIATE(double)
DLN_INSTANTIATE(quad)

#undef DLN_INSTANTIATE

}  // namespace dln
