#pragma once

#include <Eigen/Dense>

namespace warpdirac {

// Thin SVD of a square real matrix, A = U diag(s) W^T.
struct SvdResult {
  Eigen::MatrixXd U;
  Eigen::VectorXd s;
  Eigen::MatrixXd W;
};

// Uses LAPACK dgesdd when the linked BLAS passes a product self-check, Eigen's
// divide-and-conquer SVD otherwise.
SvdResult svd(const Eigen::MatrixXd& a);

// True when the linked BLAS computes a dense matrix product correctly. Checked once per process.
bool blas_level3_reliable();

// Full eigendecomposition of a real symmetric tridiagonal matrix,
// T = Q diag(lambda) Q^T, eigenvalues ascending.
struct SymEig {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

SymEig tridiagonal_eig(const Eigen::VectorXd& diagonal, const Eigen::VectorXd& off_diagonal);

// Dense symmetric eigensolver, eigenvalues ascending.
SymEig symmetric_eig(const Eigen::MatrixXd& a);

}  // namespace warpdirac

namespace warpdirac {

// Functional calculus for a symmetric positive definite tridiagonal matrix.
class SpectralCalculus {
 public:
  SpectralCalculus(const Eigen::VectorXd& diagonal, const Eigen::VectorXd& off_diagonal);

  [[nodiscard]] const SymEig& eig() const { return eig_; }
  [[nodiscard]] Eigen::Index size() const { return eig_.values.size(); }
  // T^e x (columnwise for matrices).
  [[nodiscard]] Eigen::MatrixXd apply_power(const Eigen::MatrixXd& x, double e) const;
  [[nodiscard]] Eigen::VectorXd apply_power(const Eigen::VectorXd& x, double e) const;
  [[nodiscard]] Eigen::MatrixXd power_matrix(double e) const;

 private:
  SymEig eig_;
};

}  // namespace warpdirac
