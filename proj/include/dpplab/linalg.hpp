#ifndef DPPLAB_LINALG_HPP
#define DPPLAB_LINALG_HPP

#include <cmath>
#include <complex>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "dpplab/error.hpp"

namespace dpplab {

/// log det of a Hermitian positive-definite matrix as 2·Σ log L_ii.
/// Throws NumericalError when the Cholesky factorization breaks down.
template <typename Derived>
typename Derived::RealScalar log_det_hpd(const Eigen::MatrixBase<Derived>& a) {
  using Real = typename Derived::RealScalar;
  using Matrix = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::LLT<Matrix> llt(a.derived());
  if (llt.info() != Eigen::Success) throw NumericalError("log_det_hpd: matrix is not positive definite");
  Real sum = 0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const Real pivot = std::real(llt.matrixLLT()(i, i));
    if (!(pivot > Real(0))) throw NumericalError("log_det_hpd: non-positive pivot");
    sum += std::log(pivot);
  }
  return 2 * sum;
}

/// A branch of log det for a general square matrix: Σ log(u_ii) plus iπ for an
/// odd row permutation. The imaginary part is only defined modulo 2π.
template <typename Derived>
std::complex<typename Derived::RealScalar> log_det_lu(const Eigen::MatrixBase<Derived>& a) {
  using Real = typename Derived::RealScalar;
  using Complex = std::complex<Real>;
  using Matrix = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::PartialPivLU<Matrix> lu(a.derived());
  Complex sum(0, 0);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const Complex pivot(lu.matrixLU()(i, i));
    if (pivot == Complex(0, 0)) throw NumericalError("log_det_lu: singular matrix");
    sum += std::log(pivot);
  }
  if (lu.permutationP().determinant() < 0) sum += Complex(0, std::acos(Real(-1)));
  return sum;
}

}  // namespace dpplab

#endif  // DPPLAB_LINALG_HPP
