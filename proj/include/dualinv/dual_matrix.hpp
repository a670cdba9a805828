#pragma once

/**
 * @file dual_matrix.hpp
 * @brief Dual matrices A = A_s + A_d·ε and dual vectors.
 *
 * Products follow the scalar rule entrywise, so (AB)_s = A_s·B_s and
 * (AB)_d = A_s·B_d + A_d·B_s. Norms are dual reals. Whether the standard part
 * counts as zero in the norm formulas is decided with
 * ‖A_s‖_F > rank_cutoff·(1 + ‖A_d‖_F) rather than exact comparison.
 */

#include <utility>

#include "dualinv/base_linalg.hpp"
#include "dualinv/dual_scalar.hpp"

namespace dualinv {

template <BaseField T>
class DualMatrix {
public:
    using value_type = T;

    DualMatrix() = default;

    DualMatrix(BaseMatrix<T> standard, BaseMatrix<T> dual)
        : standard_(std::move(standard)), dual_(std::move(dual)) {
        if (standard_.rows() != dual_.rows() || standard_.cols() != dual_.cols()) {
            throw ShapeMismatch("dual matrix: standard and dual parts differ in shape");
        }
    }

    /// A purely standard matrix (dual part zero).
    explicit DualMatrix(BaseMatrix<T> standard)
        : standard_(std::move(standard)), dual_(BaseMatrix<T>::Zero(standard_.rows(), standard_.cols())) {}

    static DualMatrix zero(Eigen::Index rows, Eigen::Index cols) {
        return {BaseMatrix<T>::Zero(rows, cols), BaseMatrix<T>::Zero(rows, cols)};
    }
    static DualMatrix identity(Eigen::Index n) {
        return {BaseMatrix<T>::Identity(n, n), BaseMatrix<T>::Zero(n, n)};
    }

    [[nodiscard]] const BaseMatrix<T>& standard() const { return standard_; }
    [[nodiscard]] const BaseMatrix<T>& dual() const { return dual_; }
    [[nodiscard]] Eigen::Index rows() const { return standard_.rows(); }
    [[nodiscard]] Eigen::Index cols() const { return standard_.cols(); }

    [[nodiscard]] DualScalar<T> operator()(Eigen::Index i, Eigen::Index j) const {
        return {standard_(i, j), dual_(i, j)};
    }

    /// Conjugate transpose of both parts (plain transpose over the reals).
    [[nodiscard]] DualMatrix adjoint() const { return {standard_.adjoint(), dual_.adjoint()}; }

    friend DualMatrix operator+(const DualMatrix& a, const DualMatrix& b) {
        check_same_shape(a, b);
        return {a.standard_ + b.standard_, a.dual_ + b.dual_};
    }
    friend DualMatrix operator-(const DualMatrix& a, const DualMatrix& b) {
        check_same_shape(a, b);
        return {a.standard_ - b.standard_, a.dual_ - b.dual_};
    }
    friend DualMatrix operator-(const DualMatrix& a) { return {-a.standard_, -a.dual_}; }

    friend DualMatrix operator*(const DualMatrix& a, const DualMatrix& b) {
        if (a.cols() != b.rows()) {
            throw ShapeMismatch("dual matmul: inner dimensions differ");
        }
        return {a.standard_ * b.standard_, a.standard_ * b.dual_ + a.dual_ * b.standard_};
    }

    friend DualMatrix operator*(const DualScalar<T>& c, const DualMatrix& a) {
        return {c.standard() * a.standard_, c.standard() * a.dual_ + c.dual() * a.standard_};
    }

private:
    static void check_same_shape(const DualMatrix& a, const DualMatrix& b) {
        if (a.rows() != b.rows() || a.cols() != b.cols()) {
            throw ShapeMismatch("dual matrix shapes differ");
        }
    }

    BaseMatrix<T> standard_;
    BaseMatrix<T> dual_;
};

template <BaseField T>
DualMatrix<T> matmul(const DualMatrix<T>& a, const DualMatrix<T>& b) {
    return a * b;
}

template <BaseField T>
DualMatrix<T> conj_transpose(const DualMatrix<T>& a) {
    return a.adjoint();
}

template <BaseField T>
struct DualVector {
    BaseVector<T> standard;
    BaseVector<T> dual;
};

namespace detail {

inline bool standard_part_is_zero(double standard_norm, double dual_norm, Eigen::Index rows,
                                  Eigen::Index cols, const TolerancePolicy& tol) {
    return !(standard_norm > tol.rank_cutoff(rows, cols) * (1.0 + dual_norm));
}

}  // namespace detail

/// Dual 2-norm ‖x_s‖ + Re(x_s*·x_d)/‖x_s‖·ε, or ‖x_d‖·ε for infinitesimal x.
template <BaseField T>
DualReal vec_norm2(const DualVector<T>& x, const TolerancePolicy& tol = {}) {
    if (x.standard.size() != x.dual.size()) {
        throw ShapeMismatch("dual vector: part lengths differ");
    }
    const double s = x.standard.norm();
    const double d = x.dual.norm();
    if (detail::standard_part_is_zero(s, d, x.standard.size(), 1, tol)) {
        return {0.0, d};
    }
    // (x_s*x_d + x_d*x_s) / 2 = Re(x_s*x_d)
    return {s, real_of(x.standard.dot(x.dual)) / s};
}

/// Unit dual vector: ‖x_s‖ = 1 and x_s*·x_d = 0.
template <BaseField T>
bool is_unit(const DualVector<T>& x, double tol = 1e-12) {
    return std::abs(x.standard.norm() - 1.0) <= tol && std::abs(x.standard.dot(x.dual)) <= tol;
}

/// Dual Frobenius norm ‖A_s‖_F + Re tr(A_s*·A_d)/‖A_s‖_F·ε, or ‖A_d‖_F·ε.
template <BaseField T>
DualReal frob_norm(const DualMatrix<T>& A, const TolerancePolicy& tol = {}) {
    const double s = A.standard().norm();
    const double d = A.dual().norm();
    if (detail::standard_part_is_zero(s, d, A.rows(), A.cols(), tol)) {
        return {0.0, d};
    }
    // tr(A_s*A_d + A_d*A_s) / 2 = Re Σ conj(a_s)·a_d
    const double cross = real_of(A.standard().cwiseProduct(A.dual().conjugate()).sum());
    return {s, cross / s};
}

/// A⁻¹ = A_s⁻¹ − A_s⁻¹·A_d·A_s⁻¹·ε; requires a square, nonsingular A_s.
template <BaseField T>
DualMatrix<T> inverse(const DualMatrix<T>& A, const TolerancePolicy& tol = {}) {
    if (A.rows() != A.cols()) {
        throw ShapeMismatch("inverse: matrix is not square");
    }
    if (rank(A.standard(), tol) < A.rows()) {
        throw SingularStandardPart("inverse: standard part is singular");
    }
    const BaseMatrix<T> inv = A.standard().partialPivLu().inverse();
    return {inv, -inv * A.dual() * inv};
}

/// A*A = I + O·ε within `tol.residual` on both parts.
template <BaseField T>
bool is_unitary(const DualMatrix<T>& A, const TolerancePolicy& tol = {}) {
    if (A.rows() != A.cols()) {
        throw ShapeMismatch("is_unitary: matrix is not square");
    }
    const DualMatrix<T> gram = A.adjoint() * A;
    const auto I = BaseMatrix<T>::Identity(A.rows(), A.cols());
    return (gram.standard() - I).cwiseAbs().maxCoeff() <= tol.residual &&
           gram.dual().cwiseAbs().maxCoeff() <= tol.residual;
}

/// max(‖X_s − Y_s‖_F, ‖X_d − Y_d‖_F).
template <BaseField T>
double max_part_distance(const DualMatrix<T>& X, const DualMatrix<T>& Y) {
    return std::max((X.standard() - Y.standard()).norm(), (X.dual() - Y.dual()).norm());
}

/// Largest entrywise deviation over both parts.
template <BaseField T>
double max_abs_difference(const DualMatrix<T>& X, const DualMatrix<T>& Y) {
    if (X.rows() != Y.rows() || X.cols() != Y.cols()) {
        throw ShapeMismatch("max_abs_difference: shapes differ");
    }
    if (X.rows() == 0 || X.cols() == 0) {
        return 0.0;
    }
    return std::max((X.standard() - Y.standard()).cwiseAbs().maxCoeff(),
                    (X.dual() - Y.dual()).cwiseAbs().maxCoeff());
}

/// Real matrix promoted to the complex field.
inline DualMatrix<Complex> to_complex(const DualMatrix<double>& A) {
    return {A.standard().cast<Complex>(), A.dual().cast<Complex>()};
}

}  // namespace dualinv
