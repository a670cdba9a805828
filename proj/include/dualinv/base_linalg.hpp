#pragma once

/**
 * @file base_linalg.hpp
 * @brief Dense real/complex linear algebra that every dual operation reduces to.
 *
 * Everything here works on ordinary (non-dual) matrices: a full SVD, the
 * Moore-Penrose inverse, numerical rank, the two orthogonal projectors onto
 * the left and right null spaces, and a Hermitian eigendecomposition.
 */

#include <Eigen/Dense>

#include "dualinv/dual_scalar.hpp"

namespace dualinv {

template <BaseField T>
using BaseMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

template <BaseField T>
using BaseVector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using RealVector = Eigen::VectorXd;

/// Thresholds used wherever a floating-point quantity must be declared zero.
struct TolerancePolicy {
    /// Relative singular-value cutoff; 0 selects max(m, n)·machine epsilon.
    double rank = 0.0;
    /// Absolute cutoff for residual and "= O" checks, scaled by the caller.
    double residual = 1e-10;

    /// Relative rank cutoff for an m×n matrix.
    [[nodiscard]] double rank_cutoff(Eigen::Index rows, Eigen::Index cols) const;
};

template <BaseField T>
struct BaseSVD {
    BaseMatrix<T> U;   ///< m×m unitary
    RealVector sigma;  ///< min(m, n) values, descending, nonnegative
    BaseMatrix<T> V;   ///< n×n unitary
};

/// Full SVD A = U·diag(sigma)·V*. Deterministic for identical input bits.
/// Throws ConvergenceFailure on non-finite input or solver failure.
template <BaseField T>
BaseSVD<T> svd(const BaseMatrix<T>& A);

/// Number of singular values strictly above rank_cutoff·sigma_max.
template <BaseField T>
Eigen::Index rank(const BaseMatrix<T>& A, const TolerancePolicy& tol = {});

/// Same count taken from an already computed SVD.
Eigen::Index rank_from_sigma(const RealVector& sigma, Eigen::Index rows, Eigen::Index cols,
                             const TolerancePolicy& tol);

template <BaseField T>
BaseMatrix<T> pinv(const BaseMatrix<T>& A, const TolerancePolicy& tol = {});

/// Pseudoinverse assembled from a precomputed SVD and rank.
template <BaseField T>
BaseMatrix<T> pinv_from_svd(const BaseSVD<T>& f, Eigen::Index r);

template <BaseField T>
struct Projectors {
    BaseMatrix<T> left;   ///< I_m − A·A⁺
    BaseMatrix<T> right;  ///< I_n − A⁺·A
};

template <BaseField T>
Projectors<T> projectors(const BaseMatrix<T>& A, const TolerancePolicy& tol = {});

template <BaseField T>
struct HermitianEigen {
    RealVector values;     ///< descending
    BaseMatrix<T> vectors; ///< columns match `values`
};

/// Eigendecomposition of the Hermitian matrix H (only its lower triangle is read).
template <BaseField T>
HermitianEigen<T> hermitian_eigen(const BaseMatrix<T>& H);

}  // namespace dualinv
