#include "dualinv/gen_inverse.hpp"

#include <sstream>

namespace dualinv {

namespace {

// Everything derived from one SVD of A_s.
template <BaseField T>
struct StandardSpaces {
    Eigen::Index r = 0;
    RealVector sigma;
    BaseMatrix<T> pinv;        // A_s⁺
    BaseMatrix<T> col_range;   // A_sA_s⁺
    BaseMatrix<T> row_range;   // A_s⁺A_s
    BaseMatrix<T> col_null;    // I − A_sA_s⁺
    BaseMatrix<T> row_null;    // I − A_s⁺A_s
    BaseMatrix<T> gram_cols;   // (A_sA_s*)⁺
    BaseMatrix<T> gram_rows;   // (A_s*A_s)⁺
};

template <BaseField T>
StandardSpaces<T> standard_spaces(const BaseMatrix<T>& As, const TolerancePolicy& tol) {
    const Eigen::Index m = As.rows();
    const Eigen::Index n = As.cols();
    const auto f = svd(As);
    StandardSpaces<T> sp;
    sp.r = rank_from_sigma(f.sigma, m, n, tol);
    sp.sigma = f.sigma;
    const Eigen::Index r = sp.r;
    const auto Ur = f.U.leftCols(r);
    const auto Vr = f.V.leftCols(r);
    const auto Un = f.U.rightCols(m - r);
    const auto Vn = f.V.rightCols(n - r);
    const RealVector inv = f.sigma.head(r).cwiseInverse();
    const RealVector inv2 = inv.cwiseAbs2();
    sp.pinv = Vr * inv.asDiagonal() * Ur.adjoint();
    sp.col_range = Ur * Ur.adjoint();
    sp.row_range = Vr * Vr.adjoint();
    sp.col_null = Un * Un.adjoint();
    sp.row_null = Vn * Vn.adjoint();
    sp.gram_cols = Ur * inv2.asDiagonal() * Ur.adjoint();
    sp.gram_rows = Vr * inv2.asDiagonal() * Vr.adjoint();
    return sp;
}

template <BaseField T>
DualMatrix<T> closed_form(const BaseMatrix<T>& Ad, const StandardSpaces<T>& sp) {
    const BaseMatrix<T> Adh = Ad.adjoint();
    BaseMatrix<T> d = -sp.pinv * Ad * sp.pinv;
    d += sp.gram_rows * Adh * sp.col_null;
    d += sp.row_null * Adh * sp.gram_cols;
    return {sp.pinv, d};
}

template <BaseField T>
bool is_zero(const BaseMatrix<T>& M, double threshold) {
    return M.norm() <= threshold;
}

Eigen::Index count_above(const RealVector& sigma, double cutoff) {
    Eigen::Index k = 0;
    while (k < sigma.size() && sigma(k) > cutoff) {
        ++k;
    }
    return k;
}

// Numerical rank of a matrix in which A_d has been scaled by `alpha`. Values
// below either the usual relative cutoff or the scaled "= O" threshold are
// treated as zero.
template <BaseField T>
Eigen::Index scaled_rank(const BaseMatrix<T>& M, double alpha, double zero_thr, const TolerancePolicy& tol) {
    const auto f = svd(M);
    if (f.sigma.size() == 0) {
        return 0;
    }
    const double cutoff = std::max(tol.rank_cutoff(M.rows(), M.cols()) * f.sigma(0), alpha * zero_thr);
    return count_above(f.sigma, cutoff);
}

// Scale for A_d that puts it on the level of the smallest nonzero singular
// value of A_s. Rank is unchanged by this scaling and the small singular
// values of the stacked matrices stay well above the cutoff.
template <BaseField T>
double dual_scale(const DualMatrix<T>& A, const StandardSpaces<T>& sp) {
    const double dn = A.dual().norm();
    if (dn == 0.0) {
        return 1.0;
    }
    const double target = sp.r > 0 ? sp.sigma(sp.r - 1) : 1.0;
    return target / dn;
}

}  // namespace

template <BaseField T>
DualMatrix<T> mpdgi(const DualMatrix<T>& A, const TolerancePolicy& tol) {
    const BaseMatrix<T> p = pinv(A.standard(), tol);
    return {p, -p * A.dual() * p};
}

template <BaseField T>
bool dmpgi_exists(const DualMatrix<T>& A, const TolerancePolicy& tol) {
    return is_zero<T>(nonessential_part(A, tol).dual(), zero_threshold(A, tol));
}

template <BaseField T>
DualMatrix<T> dmpgi_formula(const DualMatrix<T>& A, const TolerancePolicy& tol) {
    return closed_form<T>(A.dual(), standard_spaces<T>(A.standard(), tol));
}

template <BaseField T>
DualMatrix<T> dmpgi(const DualMatrix<T>& A, const TolerancePolicy& tol) {
    const auto sp = standard_spaces<T>(A.standard(), tol);
    const BaseMatrix<T> M4 = sp.col_null * A.dual() * sp.row_null;
    if (!is_zero<T>(M4, zero_threshold(A, tol))) {
        std::ostringstream msg;
        msg << "DMPGI does not exist: (I - A_s A_s^+) A_d (I - A_s^+ A_s) != O (Frobenius norm " << M4.norm()
            << ")";
        throw DmpgiNotExist(msg.str());
    }
    return closed_form<T>(A.dual(), sp);
}

template <BaseField T>
DualMatrix<T> gmpi(const DualMatrix<T>& A, const TolerancePolicy& tol) {
    const auto sp = standard_spaces<T>(A.standard(), tol);
    const BaseMatrix<T> essential_dual = A.dual() - sp.col_null * A.dual() * sp.row_null;
    return closed_form<T>(essential_dual, sp);
}

template <BaseField T>
DualMatrix<T> gmpi_via_svd(const DualMatrix<T>& A, const TolerancePolicy& tol) {
    const auto f = dual_svd(A, tol);
    const Eigen::Index m = A.rows();
    const Eigen::Index n = A.cols();
    BaseMatrix<T> gs = BaseMatrix<T>::Zero(n, m);
    BaseMatrix<T> gd = BaseMatrix<T>::Zero(n, m);
    for (Eigen::Index i = 0; i < f.r; ++i) {
        const DualReal inv = invert(f.sigma[static_cast<std::size_t>(i)]);
        gs(i, i) = inv.standard();
        gd(i, i) = inv.dual();
    }
    return f.V * DualMatrix<T>(gs, gd) * f.U.adjoint();
}

template <BaseField T>
bool block_rank_condition(const DualMatrix<T>& A, const TolerancePolicy& tol) {
    const Eigen::Index m = A.rows();
    const Eigen::Index n = A.cols();
    const auto sp = standard_spaces<T>(A.standard(), tol);
    const double alpha = dual_scale(A, sp);
    BaseMatrix<T> block = BaseMatrix<T>::Zero(2 * m, 2 * n);
    block.topLeftCorner(m, n) = alpha * A.dual();
    block.topRightCorner(m, n) = A.standard();
    block.bottomLeftCorner(m, n) = A.standard();
    return scaled_rank<T>(block, alpha, zero_threshold(A, tol), tol) == 2 * sp.r;
}

template <BaseField T>
bool range_rank_condition(const DualMatrix<T>& A, const TolerancePolicy& tol) {
    const Eigen::Index m = A.rows();
    const Eigen::Index n = A.cols();
    const auto sp = standard_spaces<T>(A.standard(), tol);
    const double alpha = dual_scale(A, sp);
    const double thr = zero_threshold(A, tol);
    BaseMatrix<T> cols(m, 2 * n);
    cols << A.standard(), alpha * A.dual();
    BaseMatrix<T> rows(n, 2 * m);
    rows << A.standard().adjoint(), alpha * A.dual().adjoint();
    return scaled_rank<T>(cols, alpha, thr, tol) == sp.r && scaled_rank<T>(rows, alpha, thr, tol) == sp.r;
}

template <BaseField T>
std::string Classification<T>::summary() const {
    std::ostringstream out;
    if (dmpgi_exists) {
        out << "M4 = O: the matrix is essential, so DMPGI exists and equals GMPI.";
    } else {
        out << "M4 != O: DMPGI does not exist; GMPI is the DMPGI of A - M4*eps.";
    }
    out << '\n';
    if (gmpi_equals_mpdgi) {
        out << "M2 = M3 = O: GMPI equals MPDGI.";
    } else {
        out << "M2 or M3 != O: GMPI differs from MPDGI; MPDGI is the GMPI of A - (M2 + M3)*eps.";
    }
    out << '\n';
    if (all_three_equal) {
        out << "M2 = M3 = M4 = O: MPDGI, DMPGI and GMPI coincide.";
    } else {
        out << "MPDGI = DMPGI = GMPI of A - (M2 + M3 + M4)*eps.";
    }
    out << '\n';
    return out.str();
}

template <BaseField T>
Classification<T> classify(const DualMatrix<T>& A, const TolerancePolicy& tol) {
    const auto sp = standard_spaces<T>(A.standard(), tol);
    const double thr = zero_threshold(A, tol);
    Classification<T> c;
    c.M2 = sp.col_range * A.dual() * sp.row_null;
    c.M3 = sp.col_null * A.dual() * sp.row_range;
    c.M4 = sp.col_null * A.dual() * sp.row_null;
    const bool z2 = is_zero<T>(c.M2, thr);
    const bool z3 = is_zero<T>(c.M3, thr);
    const bool z4 = is_zero<T>(c.M4, thr);
    c.dmpgi_exists = z4;
    c.gmpi_equals_mpdgi = z2 && z3;
    c.all_three_equal = z2 && z3 && z4;
    return c;
}

const char* condition_name(Condition c) {
    switch (c) {
        case Condition::c1: return "1";
        case Condition::c1e: return "1e";
        case Condition::c2: return "2";
        case Condition::c3: return "3";
        case Condition::c4: return "4";
    }
    return "?";
}

double ConditionReport::residual(Condition c) const {
    switch (c) {
        case Condition::c1: return residual_1;
        case Condition::c1e: return residual_1e;
        case Condition::c2: return residual_2;
        case Condition::c3: return residual_3;
        case Condition::c4: return residual_4;
    }
    return 0.0;
}

namespace {

template <BaseField T>
double part_norm(const DualMatrix<T>& M) {
    return std::max(M.standard().norm(), M.dual().norm());
}

}  // namespace

template <BaseField T>
ConditionReport check_conditions(const DualMatrix<T>& A, const DualMatrix<T>& X, const TolerancePolicy& tol) {
    if (X.rows() != A.cols() || X.cols() != A.rows()) {
        throw ShapeMismatch("check_conditions: X must have the shape of A*");
    }
    const DualMatrix<T> AX = A * X;
    const DualMatrix<T> XA = X * A;
    const DualMatrix<T> AXA = AX * A;
    ConditionReport rep;
    rep.residual_1 = part_norm(A - AXA);
    rep.residual_1e = part_norm(essential_part(A, tol) - AXA);
    rep.residual_2 = part_norm(X - XA * X);
    rep.residual_3 = part_norm(AX - AX.adjoint());
    rep.residual_4 = part_norm(XA - XA.adjoint());
    rep.threshold = tol.residual * (1.0 + std::max(A.standard().norm(), A.dual().norm()));
    return rep;
}

#define DUALINV_INSTANTIATE(T)                                                                        \
    template DualMatrix<T> mpdgi<T>(const DualMatrix<T>&, const TolerancePolicy&);                    \
    template bool dmpgi_exists<T>(const DualMatrix<T>&, const TolerancePolicy&);                      \
    template DualMatrix<T> dmpgi<T>(const DualMatrix<T>&, const TolerancePolicy&);                    \
    template DualMatrix<T> dmpgi_formula<T>(const DualMatrix<T>&, const TolerancePolicy&);            \
    template DualMatrix<T> gmpi<T>(const DualMatrix<T>&, const TolerancePolicy&);                     \
    template DualMatrix<T> gmpi_via_svd<T>(const DualMatrix<T>&, const TolerancePolicy&);             \
    template bool block_rank_condition<T>(const DualMatrix<T>&, const TolerancePolicy&);              \
    template bool range_rank_condition<T>(const DualMatrix<T>&, const TolerancePolicy&);              \
    template struct Classification<T>;                                                                \
    template Classification<T> classify<T>(const DualMatrix<T>&, const TolerancePolicy&);             \
    template ConditionReport check_conditions<T>(const DualMatrix<T>&, const DualMatrix<T>&,          \
                                                 const TolerancePolicy&);

DUALINV_INSTANTIATE(double)
DUALINV_INSTANTIATE(Complex)

#undef DUALINV_INSTANTIATE

}  // namespace dualinv
