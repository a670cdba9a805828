#include "dualinv/exact_oracle.hpp"

#include <cmath>
#include <regex>

namespace dualinv {

namespace {

using boost::multiprecision::cpp_int;

Rational rational_from_double(double v) {
    if (!std::isfinite(v)) {
        throw InexactInput("non-finite value has no rational representation");
    }
    if (v == 0.0) {
        return 0;
    }
    int exp = 0;
    const double frac = std::frexp(v, &exp);
    // frac·2^53 is an integer for every double.
    const auto mant = static_cast<long long>(std::ldexp(frac, 53));
    exp -= 53;
    Rational r = Rational(cpp_int(mant));
    const cpp_int pow2 = cpp_int(1) << std::abs(exp);
    if (exp >= 0) {
        return r * Rational(pow2);
    }
    return r / Rational(pow2);
}

std::string strip_zeros(std::string digits) {
    digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size()));
    return digits.empty() ? "0" : digits;
}

Rational parse_rational(const std::string& text) {
    static const std::regex fraction(R"(\s*([+-]?\d+)\s*/\s*(\d+)\s*)");
    static const std::regex decimal(R"(\s*([+-]?)(\d*)(?:\.(\d*))?(?:[eE]([+-]?\d+))?\s*)");
    std::smatch m;
    if (std::regex_match(text, m, fraction)) {
        const cpp_int den(strip_zeros(m[2].str()));
        if (den == 0) {
            throw InexactInput("zero denominator in '" + text + "'");
        }
        std::string num = m[1].str();
        const bool negative = !num.empty() && num[0] == '-';
        if (!num.empty() && (num[0] == '-' || num[0] == '+')) {
            num.erase(0, 1);
        }
        const cpp_int n(strip_zeros(num));
        return Rational(negative ? cpp_int(-n) : n, den);
    }
    if (std::regex_match(text, m, decimal) && (m[2].length() > 0 || m[3].length() > 0)) {
        // cpp_int reads a leading 0 as an octal prefix.
        Rational r = Rational(cpp_int(strip_zeros(m[2].str() + m[3].str())));
        long exp = -static_cast<long>(m[3].length());
        if (m[4].matched) {
            exp += std::stol(m[4].str());
        }
        if (std::abs(exp) > 4096) {
            throw InexactInput("exponent out of range in '" + text + "'");
        }
        const Rational scale = Rational(boost::multiprecision::pow(cpp_int(10), static_cast<unsigned>(std::abs(exp))));
        if (exp >= 0) {
            r *= scale;
        } else {
            r /= scale;
        }
        if (m[1].str() == "-") {
            r = -r;
        }
        return r;
    }
    throw InexactInput("not a rational number: '" + text + "'");
}

// Gauss-Jordan inverse of a square nonsingular matrix.
ExactMatrix exact_inverse(ExactMatrix a) {
    const Eigen::Index n = a.rows();
    ExactMatrix inv = ExactMatrix::identity(n);
    for (Eigen::Index c = 0; c < n; ++c) {
        Eigen::Index p = c;
        while (p < n && a(p, c).is_zero()) {
            ++p;
        }
        if (p == n) {
            throw SingularStandardPart("exact inverse of a singular matrix");
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            std::swap(a(c, j), a(p, j));
            std::swap(inv(c, j), inv(p, j));
        }
        const ExactScalar piv = a(c, c);
        for (Eigen::Index j = 0; j < n; ++j) {
            a(c, j) = a(c, j) / piv;
            inv(c, j) = inv(c, j) / piv;
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            if (i == c || a(i, c).is_zero()) continue;
            const ExactScalar f = a(i, c);
            for (Eigen::Index j = 0; j < n; ++j) {
                a(i, j) = a(i, j) - f * a(c, j);
                inv(i, j) = inv(i, j) - f * inv(c, j);
            }
        }
    }
    return inv;
}

// Reduced row echelon form; returns pivot columns.
std::vector<Eigen::Index> rref(ExactMatrix& a) {
    std::vector<Eigen::Index> pivots;
    Eigen::Index row = 0;
    for (Eigen::Index c = 0; c < a.cols() && row < a.rows(); ++c) {
        Eigen::Index p = row;
        while (p < a.rows() && a(p, c).is_zero()) {
            ++p;
        }
        if (p == a.rows()) continue;
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            std::swap(a(row, j), a(p, j));
        }
        const ExactScalar piv = a(row, c);
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            a(row, j) = a(row, j) / piv;
        }
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            if (i == row || a(i, c).is_zero()) continue;
            const ExactScalar f = a(i, c);
            for (Eigen::Index j = 0; j < a.cols(); ++j) {
                a(i, j) = a(i, j) - f * a(row, j);
            }
        }
        pivots.push_back(c);
        ++row;
    }
    return pivots;
}

void require_same_shape(const ExactMatrix& a, const ExactMatrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeMismatch(std::string(what) + ": operand shapes differ");
    }
}

}  // namespace

ExactScalar ExactScalar::from(double v) { return {rational_from_double(v)}; }

ExactScalar ExactScalar::from(const Complex& v) {
    return {rational_from_double(v.real()), rational_from_double(v.imag())};
}

ExactScalar ExactScalar::parse(const std::string& re, const std::string& im) {
    return {parse_rational(re), parse_rational(im)};
}

ExactScalar operator/(const ExactScalar& a, const ExactScalar& b) {
    if (b.is_zero()) {
        throw DivisionUndefined("exact division by zero");
    }
    const Rational d = b.norm2();
    const ExactScalar num = a * b.conj();
    return {num.re_ / d, num.im_ / d};
}

double ExactScalar::to_double() const { return re_.convert_to<double>(); }

Complex ExactScalar::to_complex() const { return {re_.convert_to<double>(), im_.convert_to<double>()}; }

ExactMatrix::ExactMatrix(Eigen::Index rows, Eigen::Index cols)
    : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols)) {}

ExactMatrix::ExactMatrix(std::initializer_list<std::initializer_list<ExactScalar>> rows)
    : rows_(static_cast<Eigen::Index>(rows.size())), cols_(rows.size() ? static_cast<Eigen::Index>(rows.begin()->size()) : 0) {
    for (const auto& row : rows) {
        if (static_cast<Eigen::Index>(row.size()) != cols_) {
            throw ShapeMismatch("ExactMatrix: ragged rows");
        }
        data_.insert(data_.end(), row.begin(), row.end());
    }
}

ExactMatrix ExactMatrix::identity(Eigen::Index n) {
    ExactMatrix I(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        I(i, i) = 1;
    }
    return I;
}

template <BaseField T>
ExactMatrix ExactMatrix::from(const BaseMatrix<T>& M) {
    ExactMatrix out(M.rows(), M.cols());
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            out(i, j) = ExactScalar::from(M(i, j));
        }
    }
    return out;
}

ExactMatrix ExactMatrix::adjoint() const {
    ExactMatrix out(cols_, rows_);
    for (Eigen::Index i = 0; i < rows_; ++i) {
        for (Eigen::Index j = 0; j < cols_; ++j) {
            out(j, i) = (*this)(i, j).conj();
        }
    }
    return out;
}

bool ExactMatrix::is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const ExactScalar& s) { return s.is_zero(); });
}

ExactMatrix operator+(const ExactMatrix& a, const ExactMatrix& b) {
    require_same_shape(a, b, "ExactMatrix +");
    ExactMatrix out = a;
    for (std::size_t k = 0; k < out.data_.size(); ++k) {
        out.data_[k] = a.data_[k] + b.data_[k];
    }
    return out;
}

ExactMatrix operator-(const ExactMatrix& a, const ExactMatrix& b) {
    require_same_shape(a, b, "ExactMatrix -");
    ExactMatrix out = a;
    for (std::size_t k = 0; k < out.data_.size(); ++k) {
        out.data_[k] = a.data_[k] - b.data_[k];
    }
    return out;
}

ExactMatrix operator*(const ExactMatrix& a, const ExactMatrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeMismatch("ExactMatrix *: inner dimensions differ");
    }
    ExactMatrix out(a.rows(), b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index k = 0; k < a.cols(); ++k) {
            const ExactScalar& aik = a(i, k);
            if (aik.is_zero()) continue;
            for (Eigen::Index j = 0; j < b.cols(); ++j) {
                out(i, j) = out(i, j) + aik * b(k, j);
            }
        }
    }
    return out;
}

ExactMatrix operator*(const ExactScalar& s, const ExactMatrix& a) {
    ExactMatrix out = a;
    for (auto& v : out.data_) {
        v = s * v;
    }
    return out;
}

BaseMatrix<Complex> ExactMatrix::to_complex() const {
    BaseMatrix<Complex> out(rows_, cols_);
    for (Eigen::Index i = 0; i < rows_; ++i) {
        for (Eigen::Index j = 0; j < cols_; ++j) {
            out(i, j) = (*this)(i, j).to_complex();
        }
    }
    return out;
}

BaseMatrix<double> ExactMatrix::to_real() const {
    BaseMatrix<double> out(rows_, cols_);
    for (Eigen::Index i = 0; i < rows_; ++i) {
        for (Eigen::Index j = 0; j < cols_; ++j) {
            out(i, j) = (*this)(i, j).to_double();
        }
    }
    return out;
}

Eigen::Index exact_rank(const ExactMatrix& A) {
    ExactMatrix r = A;
    return static_cast<Eigen::Index>(rref(r).size());
}

ExactMatrix exact_pinv(const ExactMatrix& A) {
    ExactMatrix R = A;
    const auto pivots = rref(R);
    const auto r = static_cast<Eigen::Index>(pivots.size());
    if (r == 0) {
        return ExactMatrix(A.cols(), A.rows());
    }
    ExactMatrix F(A.rows(), r);
    ExactMatrix G(r, A.cols());
    for (Eigen::Index k = 0; k < r; ++k) {
        for (Eigen::Index i = 0; i < A.rows(); ++i) {
            F(i, k) = A(i, pivots[static_cast<std::size_t>(k)]);
        }
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            G(k, j) = R(k, j);
        }
    }
    const ExactMatrix Fh = F.adjoint();
    const ExactMatrix Gh = G.adjoint();
    return Gh * exact_inverse(G * Gh) * exact_inverse(Fh * F) * Fh;
}

template <BaseField T>
ExactDualMatrix ExactDualMatrix::from(const DualMatrix<T>& A) {
    return {ExactMatrix::from<T>(A.standard()), ExactMatrix::from<T>(A.dual())};
}

ExactDualMatrix operator+(const ExactDualMatrix& a, const ExactDualMatrix& b) {
    return {a.standard + b.standard, a.dual + b.dual};
}

ExactDualMatrix operator-(const ExactDualMatrix& a, const ExactDualMatrix& b) {
    return {a.standard - b.standard, a.dual - b.dual};
}

ExactDualMatrix operator*(const ExactDualMatrix& a, const ExactDualMatrix& b) {
    return {a.standard * b.standard, a.standard * b.dual + a.dual * b.standard};
}

ExactDualMatrix exact_essential_part(const ExactDualMatrix& A) {
    const ExactMatrix P = exact_pinv(A.standard);
    const ExactMatrix left = ExactMatrix::identity(A.rows()) - A.standard * P;
    const ExactMatrix right = ExactMatrix::identity(A.cols()) - P * A.standard;
    return {A.standard, A.dual - left * A.dual * right};
}

ExactDualMatrix exact_mpdgi(const ExactDualMatrix& A) {
    const ExactMatrix P = exact_pinv(A.standard);
    return {P, ExactScalar(-1) * (P * A.dual * P)};
}

ExactDualMatrix exact_gmpi(const ExactDualMatrix& A) {
    const ExactDualMatrix Ae = exact_essential_part(A);
    const ExactMatrix& As = A.standard;
    const ExactMatrix Ash = As.adjoint();
    const ExactMatrix P = exact_pinv(As);
    const ExactMatrix Adh = Ae.dual.adjoint();
    const ExactMatrix col_null = ExactMatrix::identity(A.rows()) - As * P;
    const ExactMatrix row_null = ExactMatrix::identity(A.cols()) - P * As;
    ExactMatrix d = ExactScalar(-1) * (P * Ae.dual * P);
    d = d + exact_pinv(Ash * As) * Adh * col_null;
    d = d + row_null * Adh * exact_pinv(As * Ash);
    return {P, d};
}

ExactConditionReport exact_oracle(const ExactDualMatrix& A, const ExactDualMatrix& X,
                                  const std::optional<ExactDualMatrix>& Ae) {
    if (A.standard.rows() != A.dual.rows() || A.standard.cols() != A.dual.cols() ||
        X.standard.rows() != X.dual.rows() || X.standard.cols() != X.dual.cols()) {
        throw ShapeMismatch("exact_oracle: standard and dual parts differ in shape");
    }
    if (X.rows() != A.cols() || X.cols() != A.rows()) {
        throw ShapeMismatch("exact_oracle: X must have the shape of A*");
    }
    if (Ae && (Ae->rows() != A.rows() || Ae->cols() != A.cols())) {
        throw ShapeMismatch("exact_oracle: A_e must have the shape of A");
    }
    const ExactDualMatrix AX = A * X;
    const ExactDualMatrix XA = X * A;
    const ExactDualMatrix AXA = AX * A;
    ExactConditionReport rep;
    rep.residuals[0] = A - AXA;
    rep.residuals[1] = (Ae ? *Ae : exact_essential_part(A)) - AXA;
    rep.residuals[2] = X - XA * X;
    rep.residuals[3] = AX - AX.adjoint();
    rep.residuals[4] = XA - XA.adjoint();
    return rep;
}

template ExactMatrix ExactMatrix::from<double>(const BaseMatrix<double>&);
template ExactMatrix ExactMatrix::from<Complex>(const BaseMatrix<Complex>&);
template ExactDualMatrix ExactDualMatrix::from<double>(const DualMatrix<double>&);
template ExactDualMatrix ExactDualMatrix::from<Complex>(const DualMatrix<Complex>&);

}  // namespace dualinv
