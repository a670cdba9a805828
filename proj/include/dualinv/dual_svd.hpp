#pragma once

/**
 * @file dual_svd.hpp
 * @brief Singular value decomposition of dual real and dual complex matrices.
 *
 * A = U·Σ·V* with U, V unitary dual matrices and Σ a rectangular diagonal of
 * dual reals μ_1 ≥ … ≥ μ_r (appreciable), μ_{r+1} ≥ … ≥ μ_t (positive
 * infinitesimal), then zeros. r is the appreciable rank, t the rank.
 *
 * Construction:
 *  1. base SVD A_s = U_s Σ_s V_s*, r = numerical rank;
 *  2. P = U_s* A_d V_s;
 *  3. for every cluster of equal σ, diagonalise the Hermitian part of its
 *     diagonal block of P (rotating the cluster's singular vectors); the
 *     eigenvalues are the dual parts;
 *  4. SVD of the trailing (m−r)×(n−r) block of P gives the infinitesimal
 *     singular values and rotates the null-space singular vectors;
 *  5. recompute P and solve P = GΣ_s + Σ_d − Σ_s H for skew-Hermitian
 *     G = U_s*U_d and H = V_s*V_d.
 */

#include <vector>

#include "dualinv/dual_matrix.hpp"

namespace dualinv {

template <BaseField T>
struct DualSVD {
    DualMatrix<T> U;             ///< m×m
    DualMatrix<T> V;             ///< n×n
    std::vector<DualReal> sigma; ///< length min(m, n)
    Eigen::Index r = 0;          ///< appreciable rank
    Eigen::Index t = 0;          ///< rank

    /// Σ as an m×n dual matrix in the field T.
    [[nodiscard]] DualMatrix<T> sigma_matrix() const;
    /// U·Σ·V*.
    [[nodiscard]] DualMatrix<T> reconstruct() const;
    /// U·diag(Σ_r, O)·V*.
    [[nodiscard]] DualMatrix<T> essential() const;
    /// Dual parts of the infinitesimal singular values μ_{r+1,d} … μ_{t,d}.
    [[nodiscard]] RealVector infinitesimal_parts() const;
};

template <BaseField T>
DualSVD<T> dual_svd(const DualMatrix<T>& A, const TolerancePolicy& tol = {});

/// Singular values only; skips the factor dual parts (step 5).
template <BaseField T>
std::vector<DualReal> dual_singular_values(const DualMatrix<T>& A, const TolerancePolicy& tol = {});

/// (I − A_sA_s⁺)·A_d·(I − A_s⁺A_s)·ε.
template <BaseField T>
DualMatrix<T> nonessential_part(const DualMatrix<T>& A, const TolerancePolicy& tol = {});

/// A − nonessential_part(A); the best rank-r approximation of A.
template <BaseField T>
DualMatrix<T> essential_part(const DualMatrix<T>& A, const TolerancePolicy& tol = {});

/// Cutoff below which a projected dual-part quantity counts as zero:
/// tol.residual·(1 + ‖A_d‖_F).
template <BaseField T>
double zero_threshold(const DualMatrix<T>& A, const TolerancePolicy& tol) {
    return tol.residual * (1.0 + A.dual().norm());
}

}  // namespace dualinv
