#include "warpdirac/linalg.hpp"

#include <lapacke.h>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cblas.h>
#include <mutex>
#include <string>
#include <vector>

#include "warpdirac/errors.hpp"

namespace warpdirac {

bool blas_level3_reliable() {
  static std::once_flag once;
  static bool reliable = false;
  std::call_once(once, [] {
    // Some optimised BLAS kernels return wrong products on CPUs they misdetect.
    // Blocked LAPACK drivers route through dgemm, so compare one product against Eigen.
    constexpr int n = 320;
    const Eigen::MatrixXd a = Eigen::MatrixXd::Random(n, n);
    const Eigen::MatrixXd b = Eigen::MatrixXd::Random(n, n);
    Eigen::MatrixXd c(n, n);
    cblas_dgemm(CblasColMajor, CblasNoTrans, CblasNoTrans, n, n, n, 1.0, a.data(), n, b.data(), n, 0.0, c.data(), n);
    const Eigen::MatrixXd ref = a * b;
    reliable = c.allFinite() && (c - ref).norm() <= 1e-10 * ref.norm();
  });
  return reliable;
}

SvdResult svd(const Eigen::MatrixXd& a) {
  require(a.rows() == a.cols() && a.rows() > 0, ErrorKind::Configuration, "svd expects a nonempty square matrix");
  if (!blas_level3_reliable()) {
    Eigen::BDCSVD<Eigen::MatrixXd> dec(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (dec.info() != Eigen::Success) fail(ErrorKind::Numerical, "SVD did not converge");
    return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
  }
  const lapack_int n = static_cast<lapack_int>(a.rows());
  Eigen::MatrixXd work = a;  // column major, overwritten
  SvdResult out;
  out.U.resize(n, n);
  out.s.resize(n);
  Eigen::MatrixXd wt(n, n);
  const lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'A', n, n, work.data(), n, out.s.data(), out.U.data(), n,
                                         wt.data(), n);
  if (info != 0) fail(ErrorKind::Numerical, "dgesdd failed with info = " + std::to_string(info));
  out.W = wt.transpose();
  return out;
}

SymEig tridiagonal_eig(const Eigen::VectorXd& diagonal, const Eigen::VectorXd& off_diagonal) {
  const lapack_int n = static_cast<lapack_int>(diagonal.size());
  require(n > 0 && off_diagonal.size() == n - 1, ErrorKind::Configuration, "inconsistent tridiagonal sizes");
  std::vector<double> d(diagonal.data(), diagonal.data() + n);
  std::vector<double> e(static_cast<std::size_t>(n), 0.0);
  for (lapack_int i = 0; i + 1 < n; ++i) e[i] = off_diagonal[i];
  SymEig out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'A', n, d.data(), e.data(), 0.0, 0.0, 0, 0, 0.0,
                                         &found, out.values.data(), out.vectors.data(), n, isuppz.data());
  if (info != 0 || found != n) fail(ErrorKind::Numerical, "dstevr failed with info = " + std::to_string(info));
  return out;
}

SymEig symmetric_eig(const Eigen::MatrixXd& a) {
  require(a.rows() == a.cols() && a.rows() > 0, ErrorKind::Configuration, "eigensolver expects a square matrix");
  if (!blas_level3_reliable()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dec(a);
    if (dec.info() != Eigen::Success) fail(ErrorKind::Numerical, "symmetric eigensolver did not converge");
    return {dec.eigenvalues(), dec.eigenvectors()};
  }
  const lapack_int n = static_cast<lapack_int>(a.rows());
  SymEig out;
  out.vectors = a;
  out.values.resize(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, out.vectors.data(), n, out.values.data());
  if (info != 0) fail(ErrorKind::Numerical, "dsyevd failed with info = " + std::to_string(info));
  return out;
}

}  // namespace warpdirac

namespace warpdirac {

SpectralCalculus::SpectralCalculus(const Eigen::VectorXd& diagonal, const Eigen::VectorXd& off_diagonal)
    : eig_(tridiagonal_eig(diagonal, off_diagonal)) {
  if (eig_.values.minCoeff() <= 0.0) {
    fail(ErrorKind::Numerical, "spectral calculus needs a positive definite matrix (min eigenvalue " +
                                   std::to_string(eig_.values.minCoeff()) + ")");
  }
}

Eigen::MatrixXd SpectralCalculus::apply_power(const Eigen::MatrixXd& x, double e) const {
  if (e == 0.0) return x;
  const Eigen::VectorXd scale = eig_.values.array().pow(e).matrix();
  Eigen::MatrixXd coeff = eig_.vectors.transpose() * x;
  coeff = scale.asDiagonal() * coeff;
  return eig_.vectors * coeff;
}

Eigen::VectorXd SpectralCalculus::apply_power(const Eigen::VectorXd& x, double e) const {
  if (e == 0.0) return x;
  const Eigen::VectorXd coeff = eig_.vectors.transpose() * x;
  return eig_.vectors * (eig_.values.array().pow(e) * coeff.array()).matrix();
}

Eigen::MatrixXd SpectralCalculus::power_matrix(double e) const {
  const Eigen::VectorXd scale = eig_.values.array().pow(e).matrix();
  return eig_.vectors * scale.asDiagonal() * eig_.vectors.transpose();
}

}  // namespace warpdirac
