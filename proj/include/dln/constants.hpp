#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dln/common.hpp"

namespace dln {

struct CertificateEntry {
  std::string id;  // e.g. "cols{0,2}" or "s=+-+"
  double value = 0.0;
};

struct ChiResult {
  double value = 0.0;
  std::vector<Index> argmax;  // column subset attaining the maximum
  long subsets_checked = 0;
  long subsets_nonsingular = 0;
};

// sup over positive diagonal D of |B'(B D B')^-1 B D|, evaluated as the maximum of
// |B_J^-1 B| over nonsingular column subsets J with |J| = rank(B).
ChiResult chi_enumerate(const Eigen::MatrixXd& B);
double chi_constant(const Eigen::MatrixXd& B);

// |B'(B D B')^-1 B D| for one diagonal d > 0
double chi_sample(const Eigen::MatrixXd& B, const Eigen::VectorXd& d);
// the same without the leading B'; equals chi_sample when B has orthonormal rows
double chi_sample_raw(const Eigen::MatrixXd& B, const Eigen::VectorXd& d);

// maximum of chi_sample over `count` diagonals with log-uniform entries in [1e-8, 1e8]
double chi_sampled_max(const Eigen::MatrixXd& B, long count, std::uint64_t seed);

// chi of a transposed orthonormal nullspace basis plus one; 1 for a trivial nullspace
double script_K(const Eigen::MatrixXd& A);

constexpr Index kMaxSignEnumerationN = 20;

struct CAResult {
  double value = 0.0;
  Eigen::VectorXi argmax;  // sign vector attaining the maximum (empty when value = 0)
  long signs_checked = 0;
};

// max over s in {-1,1}^N with P_Null(A) s != 0 of script_K([A; s']) / |P_Null(A) s|
CAResult c_A_enumerate(const Eigen::MatrixXd& A);
double c_A(const Eigen::MatrixXd& A);

struct ConditionReport {
  double chi = 1.0;  // chi of the nullspace basis transpose (1 when trivial)
  double script_K = 1.0;
  double c_A = 0.0;
  double chi_sampled = 0.0;  // sampling lower estimate of chi
  std::vector<CertificateEntry> certificate;
};

ConditionReport condition_report(const Eigen::MatrixXd& A, long samples = 10000,
                                 std::uint64_t seed = 1);

}  // namespace dln
