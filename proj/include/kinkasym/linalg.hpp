#pragma once

// Thin LAPACK wrappers over Eigen storage. Eigen's own symmetric solver is
// roughly 6x slower than divide-and-conquer dsyevd at the two-kink sizes used
// for L = 100, so the dense work is routed through LAPACKE.

#include <lapacke.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>

#include "kinkasym/errors.hpp"

namespace kinkasym {

using cplx = std::complex<double>;
using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace linalg {

struct SymmetricEigen {
  VectorXd values;   // ascending
  MatrixXd vectors;  // columns
};

struct Svd {
  MatrixXcd U;
  VectorXd S;  // descending
  MatrixXcd Vh;
};

namespace detail {

inline SymmetricEigen eigen_symmetric(const MatrixXd& matrix) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(matrix);
  if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

inline Svd eigen_svd(const MatrixXcd& a) {
  Eigen::BDCSVD<MatrixXcd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success)
    throw NumericalError("SVD failed for a " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " matrix");
  return {svd.matrixU(), svd.singularValues(), svd.matrixV().adjoint()};
}

inline bool probe_lapack();

}  // namespace detail

/// Some OpenBLAS builds pick a GEMM kernel that silently returns wrong
/// results on newer CPUs (OPENBLAS_CORETYPE=Haswell avoids it). A small
/// decomposition is checked once against its own residual; if it fails all
/// dense work goes through Eigen instead.
inline bool lapack_usable() {
  static const bool ok = detail::probe_lapack();
  return ok;
}

inline const char* backend_name() { return lapack_usable() ? "lapacke" : "eigen"; }

inline SymmetricEigen symmetric_eigen(const MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols()) throw NumericalError("symmetric_eigen: matrix is not square");
  if (!lapack_usable()) return detail::eigen_symmetric(matrix);
  SymmetricEigen out;
  const auto n = static_cast<lapack_int>(matrix.rows());
  out.vectors = matrix;
  out.values.resize(n);
  if (n == 0) return out;
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, out.vectors.data(), n, out.values.data());
  if (info != 0) {
    std::ostringstream msg;
    msg << "dsyevd failed (info=" << info << ", n=" << n << ", |A|_F=" << matrix.norm()
        << ", asymmetry |A-A^T|_F=" << (matrix - matrix.transpose()).norm() << ")";
    throw NumericalError(msg.str());
  }
  return out;
}

/// Thin SVD, A = U diag(S) Vh. Falls back to Eigen's Jacobi SVD if gesdd
/// does not converge.
inline Svd svd(const MatrixXcd& a) {
  const auto m = static_cast<lapack_int>(a.rows());
  const auto n = static_cast<lapack_int>(a.cols());
  const lapack_int k = std::min(m, n);
  if (k > 0 && !lapack_usable()) return detail::eigen_svd(a);
  Svd out;
  if (k == 0) {
    out.U.resize(m, 0);
    out.S.resize(0);
    out.Vh.resize(0, n);
    return out;
  }
  MatrixXcd work = a;
  out.U.resize(m, k);
  out.S.resize(k);
  out.Vh.resize(k, n);
  lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', m, n, reinterpret_cast<lapack_complex_double*>(work.data()),
                                   m, out.S.data(), reinterpret_cast<lapack_complex_double*>(out.U.data()), m,
                                   reinterpret_cast<lapack_complex_double*>(out.Vh.data()), k);
  if (info == 0) return out;
  return detail::eigen_svd(a);
}

namespace detail {

inline bool probe_lapack() {
  constexpr Index n = 160;
  MatrixXd a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = std::sin(0.37 * static_cast<double>(i * n + j) + 0.11 * static_cast<double>(i));
  a = (a + a.transpose()).eval();
  MatrixXd v = a;
  VectorXd w(n);
  if (LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(n), v.data(), static_cast<lapack_int>(n),
                     w.data()) != 0)
    return false;
  const double tol = 1e-10 * a.norm();
  if ((a * v - v * w.asDiagonal()).norm() > tol) return false;
  if ((v.transpose() * v - MatrixXd::Identity(n, n)).norm() > 1e-10) return false;

  MatrixXcd b = a.leftCols(n - 40).cast<cplx>() * cplx(0.6, 0.8);
  MatrixXcd work = b;
  const auto m = static_cast<lapack_int>(n);
  const auto k = static_cast<lapack_int>(n - 40);
  MatrixXcd u(m, k), vh(k, k);
  VectorXd s(k);
  if (LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', m, k, reinterpret_cast<lapack_complex_double*>(work.data()), m, s.data(),
                     reinterpret_cast<lapack_complex_double*>(u.data()), m,
                     reinterpret_cast<lapack_complex_double*>(vh.data()), k) != 0)
    return false;
  return (u * s.cast<cplx>().asDiagonal() * vh - b).norm() <= tol;
}

}  // namespace detail

/// exp(-i H t) for real symmetric H given its eigendecomposition.
inline MatrixXcd unitary_from_eigen(const SymmetricEigen& eig, double t) {
  const VectorXcd phases = (eig.values.cast<cplx>() * cplx(0.0, -t)).array().exp().matrix();
  const MatrixXcd v = eig.vectors.cast<cplx>();
  return v * phases.asDiagonal() * v.transpose();
}

/// exp(-i H t) for a small complex Hermitian H (local gates).
inline MatrixXcd hermitian_exp(const MatrixXcd& h, cplx factor) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
  if (es.info() != Eigen::Success) throw NumericalError("local gate diagonalization failed");
  const VectorXcd phases = (es.eigenvalues().cast<cplx>() * factor).array().exp().matrix();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace linalg
}  // namespace kinkasym
