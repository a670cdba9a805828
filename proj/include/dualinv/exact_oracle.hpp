#pragma once

/**
 * @file exact_oracle.hpp
 * @brief Exact rational dual arithmetic for checking the Penrose conditions.
 *
 * Scalars are Gaussian rationals p + q·i with p, q ∈ ℚ, so one type covers
 * both base fields. Every finite double is a dyadic rational, so any
 * floating-point DualMatrix converts without loss. Residuals computed here
 * are zero only when the conditions hold exactly.
 */

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "dualinv/gen_inverse.hpp"

namespace dualinv {

using Rational = boost::multiprecision::cpp_rational;

class ExactScalar {
public:
    ExactScalar() = default;
    ExactScalar(Rational re, Rational im = 0) : re_(std::move(re)), im_(std::move(im)) {}  // NOLINT
    ExactScalar(int v) : re_(v) {}                                                           // NOLINT

    /// Exact value of a finite double; throws InexactInput otherwise.
    static ExactScalar from(double v);
    static ExactScalar from(const Complex& v);
    /// "3", "-7/4", "0.125" or "1e-3"; throws InexactInput on anything else.
    static ExactScalar parse(const std::string& re, const std::string& im = "0");

    const Rational& re() const { return re_; }
    const Rational& im() const { return im_; }
    bool is_zero() const { return re_ == 0 && im_ == 0; }

    ExactScalar conj() const { return {re_, -im_}; }
    /// |z|² as a rational.
    Rational norm2() const { return re_ * re_ + im_ * im_; }

    friend ExactScalar operator+(const ExactScalar& a, const ExactScalar& b) { return {a.re_ + b.re_, a.im_ + b.im_}; }
    friend ExactScalar operator-(const ExactScalar& a, const ExactScalar& b) { return {a.re_ - b.re_, a.im_ - b.im_}; }
    friend ExactScalar operator-(const ExactScalar& a) { return {-a.re_, -a.im_}; }
    friend ExactScalar operator*(const ExactScalar& a, const ExactScalar& b) {
        return {a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_};
    }
    /// Throws DivisionUndefined when b is zero.
    friend ExactScalar operator/(const ExactScalar& a, const ExactScalar& b);
    friend bool operator==(const ExactScalar& a, const ExactScalar& b) = default;

    /// Nearest double (complex values keep only the real part).
    double to_double() const;
    Complex to_complex() const;

private:
    Rational re_{0};
    Rational im_{0};
};

class ExactMatrix {
public:
    ExactMatrix() = default;
    ExactMatrix(Eigen::Index rows, Eigen::Index cols);
    /// Rows of equal length; throws ShapeMismatch otherwise.
    ExactMatrix(std::initializer_list<std::initializer_list<ExactScalar>> rows);

    static ExactMatrix identity(Eigen::Index n);
    template <BaseField T>
    static ExactMatrix from(const BaseMatrix<T>& M);

    Eigen::Index rows() const { return rows_; }
    Eigen::Index cols() const { return cols_; }
    ExactScalar& operator()(Eigen::Index i, Eigen::Index j) { return data_[index(i, j)]; }
    const ExactScalar& operator()(Eigen::Index i, Eigen::Index j) const { return data_[index(i, j)]; }

    ExactMatrix adjoint() const;
    bool is_zero() const;
    friend bool operator==(const ExactMatrix& a, const ExactMatrix& b) = default;

    friend ExactMatrix operator+(const ExactMatrix& a, const ExactMatrix& b);
    friend ExactMatrix operator-(const ExactMatrix& a, const ExactMatrix& b);
    friend ExactMatrix operator*(const ExactMatrix& a, const ExactMatrix& b);
    friend ExactMatrix operator*(const ExactScalar& s, const ExactMatrix& a);

    /// Rounded to the nearest doubles.
    BaseMatrix<Complex> to_complex() const;
    BaseMatrix<double> to_real() const;

private:
    std::size_t index(Eigen::Index i, Eigen::Index j) const {
        return static_cast<std::size_t>(i * cols_ + j);
    }

    Eigen::Index rows_ = 0;
    Eigen::Index cols_ = 0;
    std::vector<ExactScalar> data_;
};

/// Exact Moore-Penrose inverse via a rank factorization A = F·G:
/// A⁺ = G*(GG*)⁻¹(F*F)⁻¹F*.
ExactMatrix exact_pinv(const ExactMatrix& A);
Eigen::Index exact_rank(const ExactMatrix& A);

struct ExactDualMatrix {
    ExactMatrix standard;
    ExactMatrix dual;

    template <BaseField T>
    static ExactDualMatrix from(const DualMatrix<T>& A);

    Eigen::Index rows() const { return standard.rows(); }
    Eigen::Index cols() const { return standard.cols(); }
    ExactDualMatrix adjoint() const { return {standard.adjoint(), dual.adjoint()}; }
    bool is_zero() const { return standard.is_zero() && dual.is_zero(); }

    friend ExactDualMatrix operator+(const ExactDualMatrix& a, const ExactDualMatrix& b);
    friend ExactDualMatrix operator-(const ExactDualMatrix& a, const ExactDualMatrix& b);
    friend ExactDualMatrix operator*(const ExactDualMatrix& a, const ExactDualMatrix& b);
    friend bool operator==(const ExactDualMatrix& a, const ExactDualMatrix& b) = default;
};

/// A − (I − A_sA_s⁺)A_d(I − A_s⁺A_s)·ε, exactly.
ExactDualMatrix exact_essential_part(const ExactDualMatrix& A);
/// A_s⁺ − A_s⁺A_dA_s⁺·ε, exactly.
ExactDualMatrix exact_mpdgi(const ExactDualMatrix& A);
/// Closed-form GMPI on the essential part, exactly.
ExactDualMatrix exact_gmpi(const ExactDualMatrix& A);

struct ExactConditionReport {
    /// Defect matrices indexed like `kAllConditions`: A − AXA, A_e − AXA,
    /// X − XAX, AX − (AX)*, XA − (XA)*.
    std::array<ExactDualMatrix, 5> residuals;

    [[nodiscard]] const ExactDualMatrix& residual(Condition c) const { return residuals[static_cast<std::size_t>(c)]; }
    [[nodiscard]] bool holds(Condition c) const { return residual(c).is_zero(); }
};

/// Exact residuals of every condition for the pair (A, X). `Ae` defaults to
/// the exact essential part of A. Throws ShapeMismatch.
ExactConditionReport exact_oracle(const ExactDualMatrix& A, const ExactDualMatrix& X,
                                  const std::optional<ExactDualMatrix>& Ae = std::nullopt);

}  // namespace dualinv
