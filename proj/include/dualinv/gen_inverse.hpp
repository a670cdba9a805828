#pragma once

/**
 * @file gen_inverse.hpp
 * @brief Generalized inverses of dual matrices and the Penrose-condition checker.
 *
 *  - MPDGI  A^P = A_s⁺ − A_s⁺A_dA_s⁺·ε, defined for every A;
 *  - DMPGI  A^D, the solution of the four classical Penrose conditions, which
 *           exists only when (I − A_sA_s⁺)A_d(I − A_s⁺A_s) = O;
 *  - GMPI   A^G, the unique solution of AXA = A_e, XAX = X, (AX)* = AX,
 *           (XA)* = XA. It always exists and equals A_e^D.
 *
 * "= O" means ‖·‖_F ≤ tol.residual·(1 + ‖A_d‖_F).
 */

#include <string>

#include "dualinv/dual_svd.hpp"

namespace dualinv {

template <BaseField T>
DualMatrix<T> mpdgi(const DualMatrix<T>& A, const TolerancePolicy& tol = {});

/// True iff (I − A_sA_s⁺)A_d(I − A_s⁺A_s) = O.
template <BaseField T>
bool dmpgi_exists(const DualMatrix<T>& A, const TolerancePolicy& tol = {});

/// Throws DmpgiNotExist when `dmpgi_exists(A)` is false.
template <BaseField T>
DualMatrix<T> dmpgi(const DualMatrix<T>& A, const TolerancePolicy& tol = {});

/// Closed-form DMPGI expression evaluated without the existence check:
/// A_s⁺ − A_s⁺A_dA_s⁺ε + (A_s*A_s)⁺A_d*(I − A_sA_s⁺)ε + (I − A_s⁺A_s)A_d*(A_sA_s*)⁺ε.
template <BaseField T>
DualMatrix<T> dmpgi_formula(const DualMatrix<T>& A, const TolerancePolicy& tol = {});

/// GMPI via the closed form applied to the essential part.
template <BaseField T>
DualMatrix<T> gmpi(const DualMatrix<T>& A, const TolerancePolicy& tol = {});

/// GMPI assembled as V·diag(Σ_r⁻¹, O)·U* from the dual SVD.
template <BaseField T>
DualMatrix<T> gmpi_via_svd(const DualMatrix<T>& A, const TolerancePolicy& tol = {});

/// rank [[A_d, A_s], [A_s, O]] == 2·rank(A_s).
template <BaseField T>
bool block_rank_condition(const DualMatrix<T>& A, const TolerancePolicy& tol = {});

/// rank [A_s A_d] == rank [A_s* A_d*] == rank(A_s).
template <BaseField T>
bool range_rank_condition(const DualMatrix<T>& A, const TolerancePolicy& tol = {});

template <BaseField T>
struct Classification {
    BaseMatrix<T> M2;  ///< (A_sA_s⁺)·A_d·(I − A_s⁺A_s)
    BaseMatrix<T> M3;  ///< (I − A_sA_s⁺)·A_d·(A_s⁺A_s)
    BaseMatrix<T> M4;  ///< (I − A_sA_s⁺)·A_d·(I − A_s⁺A_s)
    bool dmpgi_exists = false;
    bool gmpi_equals_mpdgi = false;
    bool all_three_equal = false;

    /// Plain-text account of which inverses exist and which coincide.
    [[nodiscard]] std::string summary() const;
};

template <BaseField T>
Classification<T> classify(const DualMatrix<T>& A, const TolerancePolicy& tol = {});

enum class Condition { c1, c1e, c2, c3, c4 };

inline constexpr Condition kAllConditions[] = {Condition::c1, Condition::c1e, Condition::c2, Condition::c3,
                                               Condition::c4};

/// "1", "1e", "2", "3", "4".
const char* condition_name(Condition c);

struct ConditionReport {
    double residual_1 = 0.0;   ///< A − AXA
    double residual_1e = 0.0;  ///< A_e − AXA
    double residual_2 = 0.0;   ///< X − XAX
    double residual_3 = 0.0;   ///< AX − (AX)*
    double residual_4 = 0.0;   ///< XA − (XA)*
    double threshold = 0.0;    ///< tol.residual·(1 + max(‖A_s‖_F, ‖A_d‖_F))

    [[nodiscard]] double residual(Condition c) const;
    [[nodiscard]] bool passes(Condition c) const { return residual(c) <= threshold; }
};

/// Residuals are max(‖standard part‖_F, ‖dual part‖_F) of each condition's
/// defect, computed in dual arithmetic.
template <BaseField T>
ConditionReport check_conditions(const DualMatrix<T>& A, const DualMatrix<T>& X,
                                 const TolerancePolicy& tol = {});

}  // namespace dualinv
