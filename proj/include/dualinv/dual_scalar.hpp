#pragma once

/**
 * @file dual_scalar.hpp
 * @brief Dual numbers a = a_s + a_d·ε (ε² = 0) over the real or complex field.
 *
 * The standard part a_s decides everything structural: a is appreciable when
 * a_s ≠ 0 and infinitesimal otherwise. Appreciable numbers have reciprocals,
 * infinitesimal ones do not. Dual reals carry a total order (lexicographic on
 * the two parts); dual complex numbers are deliberately left unordered, so
 * `compare` only accepts `DualScalar<double>`.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <ostream>

#include "dualinv/errors.hpp"

namespace dualinv {

using Complex = std::complex<double>;

template <typename T>
concept BaseField = std::same_as<T, double> || std::same_as<T, Complex>;

template <typename T>
inline constexpr bool is_complex_v = std::same_as<T, Complex>;

/// Conjugate that stays in the base field (std::conj(double) returns complex).
inline double conj_of(double x) { return x; }
inline Complex conj_of(const Complex& x) { return std::conj(x); }

inline double real_of(double x) { return x; }
inline double real_of(const Complex& x) { return x.real(); }

template <BaseField T>
class DualScalar {
public:
    using value_type = T;

    constexpr DualScalar() = default;
    constexpr DualScalar(T standard, T dual = T{}) : standard_(standard), dual_(dual) {}

    [[nodiscard]] constexpr const T& standard() const { return standard_; }
    [[nodiscard]] constexpr const T& dual() const { return dual_; }

    [[nodiscard]] bool is_appreciable() const { return standard_ != T{}; }
    [[nodiscard]] bool is_infinitesimal() const { return standard_ == T{}; }

    static constexpr DualScalar epsilon() { return {T{}, T{1}}; }

    friend constexpr DualScalar operator+(const DualScalar& a, const DualScalar& b) {
        return {a.standard_ + b.standard_, a.dual_ + b.dual_};
    }
    friend constexpr DualScalar operator-(const DualScalar& a, const DualScalar& b) {
        return {a.standard_ - b.standard_, a.dual_ - b.dual_};
    }
    friend constexpr DualScalar operator-(const DualScalar& a) { return {-a.standard_, -a.dual_}; }

    // ε² = 0: the a_d·b_d term never appears.
    friend constexpr DualScalar operator*(const DualScalar& a, const DualScalar& b) {
        return {a.standard_ * b.standard_, a.standard_ * b.dual_ + a.dual_ * b.standard_};
    }

    friend constexpr bool operator==(const DualScalar&, const DualScalar&) = default;

    friend std::ostream& operator<<(std::ostream& os, const DualScalar& a) {
        return os << a.standard_ << " + " << a.dual_ << "ε";
    }

private:
    T standard_{};
    T dual_{};
};

using DualReal = DualScalar<double>;
using DualComplex = DualScalar<Complex>;

template <BaseField T>
DualScalar<T> conj(const DualScalar<T>& a) {
    return {conj_of(a.standard()), conj_of(a.dual())};
}

/// 1 / a = a_s⁻¹ − a_s⁻²·a_d·ε.
template <BaseField T>
DualScalar<T> invert(const DualScalar<T>& a) {
    if (a.is_infinitesimal()) {
        throw NotAppreciable("infinitesimal dual number has no reciprocal");
    }
    const T inv = T{1} / a.standard();
    return {inv, -inv * inv * a.dual()};
}

/// Quotient a / b. When both operands are infinitesimal the quotient's dual
/// part is arbitrary; it is fixed to zero here.
template <BaseField T>
DualScalar<T> divide(const DualScalar<T>& a, const DualScalar<T>& b) {
    if (b.is_appreciable()) {
        const T q = a.standard() / b.standard();
        return {q, a.dual() / b.standard() - q * (b.dual() / b.standard())};
    }
    if (a.is_infinitesimal() && b.dual() != T{}) {
        return {a.dual() / b.dual(), T{}};
    }
    throw DivisionUndefined("dual division requires an appreciable divisor or two infinitesimal operands");
}

template <BaseField T>
DualScalar<T> operator/(const DualScalar<T>& a, const DualScalar<T>& b) {
    return divide(a, b);
}

/// Nonnegative dual-real magnitude. For complex a_s the dual part is
/// Re(conj(a_s)·a_d)/|a_s|, which is the one-dimensional vector 2-norm and
/// reduces to sgn(a_s)·a_d on the reals.
template <BaseField T>
DualReal magnitude(const DualScalar<T>& a) {
    if (a.is_appreciable()) {
        const double s = std::abs(a.standard());
        return {s, real_of(conj_of(a.standard()) * a.dual()) / s};
    }
    return {0.0, std::abs(a.dual())};
}

enum class Ordering { less, equal, greater };

/// Total order on dual reals: standard parts first, dual parts break ties.
inline Ordering compare(const DualReal& a, const DualReal& b) {
    if (a.standard() != b.standard()) {
        return a.standard() < b.standard() ? Ordering::less : Ordering::greater;
    }
    if (a.dual() != b.dual()) {
        return a.dual() < b.dual() ? Ordering::less : Ordering::greater;
    }
    return Ordering::equal;
}

/// `compare` with floating-point slack: parts within `tol` count as equal.
inline Ordering compare(const DualReal& a, const DualReal& b, double tol) {
    if (std::abs(a.standard() - b.standard()) > tol) {
        return a.standard() < b.standard() ? Ordering::less : Ordering::greater;
    }
    if (std::abs(a.dual() - b.dual()) > tol) {
        return a.dual() < b.dual() ? Ordering::less : Ordering::greater;
    }
    return Ordering::equal;
}

inline bool operator<(const DualReal& a, const DualReal& b) { return compare(a, b) == Ordering::less; }
inline bool operator>(const DualReal& a, const DualReal& b) { return compare(a, b) == Ordering::greater; }
inline bool operator<=(const DualReal& a, const DualReal& b) { return compare(a, b) != Ordering::greater; }
inline bool operator>=(const DualReal& a, const DualReal& b) { return compare(a, b) != Ordering::less; }

/// Componentwise closeness: |x − y| ≤ abs_tol + rel_tol·max(|x|, |y|) on each part.
template <BaseField T>
bool approx_equal(const DualScalar<T>& a, const DualScalar<T>& b, double abs_tol = 1e-12,
                  double rel_tol = 1e-12) {
    auto close = [&](const T& x, const T& y) {
        return std::abs(x - y) <= abs_tol + rel_tol * std::max(std::abs(x), std::abs(y));
    };
    return close(a.standard(), b.standard()) && close(a.dual(), b.dual());
}

}  // namespace dualinv
