#pragma once

#include <Eigen/Dense>
#include <vector>

#include "augsel/rng.hpp"
#include "augsel/scores.hpp"

namespace augsel {

// L-ensemble kernel L_ij = q_i phi_i^T phi_j q_j with unit-normalized feature
// directions scaled by 1000 (keeps the elementary symmetric polynomials away
// from the underflow end for high k). Eigenvalues are stored nonincreasing
// and clamped at zero.
struct DppKernel {
  Eigen::MatrixXd L;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;  // columns aligned with eigenvalues

  int size() const { return static_cast<int>(L.rows()); }
  int rank(double rel_tol = 1e-12) const;
};

DppKernel build_dpp_kernel(const Eigen::Ref<const Eigen::MatrixXd>& features,
                           const ScoreVector& qualities);

// Table of elementary symmetric polynomials e_k(lambda_1..lambda_m) for
// k <= kmax over all prefixes m <= n, via the standard recursion
//   e_k(1..m) = e_k(1..m-1) + lambda_m * e_{k-1}(1..m-1).
// Rows carry a shared power-of-two exponent so huge eigenvalues cannot
// overflow; power-of-two rescaling is exact, so small inputs reproduce the
// plain double recursion bit for bit.
class ElementarySymmetric {
 public:
  ElementarySymmetric(const Eigen::Ref<const Eigen::VectorXd>& values, int kmax);

  // e_k over the first m values; +inf if the true value overflows a double.
  double value(int k, int m) const;
  // lambda_m * e_{k-1}(1..m-1) / e_k(1..m), evaluated without overflow.
  double include_ratio(int k, int m) const;

 private:
  double scaled(int k, int m) const { return table_[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)]; }
  Eigen::VectorXd values_;
  std::vector<std::vector<double>> table_;  // [k][m]
  std::vector<int> row_exp_;                // power-of-two exponent per k row
};

// Exact k-DPP sample: phase 1 picks k eigenvectors through the elementary
// symmetric recursion, phase 2 samples items and projects the eigenvector
// span after each pick. Returns k distinct indices, ascending.
std::vector<int> sample_kdpp(const DppKernel& kernel, int k, rng::Engine& eng);

}  // namespace augsel
