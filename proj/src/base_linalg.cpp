#include "dualinv/base_linalg.hpp"

#include <algorithm>
#include <limits>

namespace dualinv {

double TolerancePolicy::rank_cutoff(Eigen::Index rows, Eigen::Index cols) const {
    if (rank > 0.0) {
        return rank;
    }
    return static_cast<double>(std::max<Eigen::Index>({rows, cols, 1})) *
           std::numeric_limits<double>::epsilon();
}

template <BaseField T>
BaseSVD<T> svd(const BaseMatrix<T>& A) {
    const Eigen::Index m = A.rows();
    const Eigen::Index n = A.cols();
    if (!A.allFinite()) {
        throw ConvergenceFailure("svd: input contains non-finite entries");
    }
    if (m == 0 || n == 0) {
        return {BaseMatrix<T>::Identity(m, m), RealVector(0), BaseMatrix<T>::Identity(n, n)};
    }
    Eigen::JacobiSVD<BaseMatrix<T>> solver(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceFailure("svd: Jacobi sweeps did not converge");
    }
    if (!solver.singularValues().allFinite() || !solver.matrixU().allFinite() || !solver.matrixV().allFinite()) {
        throw ConvergenceFailure("svd: singular values overflow the double range");
    }
    return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

Eigen::Index rank_from_sigma(const RealVector& sigma, Eigen::Index rows, Eigen::Index cols,
                             const TolerancePolicy& tol) {
    if (sigma.size() == 0) {
        return 0;
    }
    const double cutoff = tol.rank_cutoff(rows, cols) * sigma(0);
    Eigen::Index r = 0;
    while (r < sigma.size() && sigma(r) > cutoff && sigma(r) > 0.0) {
        ++r;
    }
    return r;
}

template <BaseField T>
Eigen::Index rank(const BaseMatrix<T>& A, const TolerancePolicy& tol) {
    return rank_from_sigma(svd(A).sigma, A.rows(), A.cols(), tol);
}

template <BaseField T>
BaseMatrix<T> pinv_from_svd(const BaseSVD<T>& f, Eigen::Index r) {
    const Eigen::Index m = f.U.rows();
    const Eigen::Index n = f.V.rows();
    if (r == 0) {
        return BaseMatrix<T>::Zero(n, m);
    }
    const RealVector inv = f.sigma.head(r).cwiseInverse();
    return f.V.leftCols(r) * inv.asDiagonal() * f.U.leftCols(r).adjoint();
}

template <BaseField T>
BaseMatrix<T> pinv(const BaseMatrix<T>& A, const TolerancePolicy& tol) {
    const auto f = svd(A);
    return pinv_from_svd(f, rank_from_sigma(f.sigma, A.rows(), A.cols(), tol));
}

template <BaseField T>
Projectors<T> projectors(const BaseMatrix<T>& A, const TolerancePolicy& tol) {
    const auto f = svd(A);
    const Eigen::Index r = rank_from_sigma(f.sigma, A.rows(), A.cols(), tol);
    // Built from the trailing singular vectors so both are exactly Hermitian.
    const auto Ul = f.U.rightCols(A.rows() - r);
    const auto Vr = f.V.rightCols(A.cols() - r);
    return {Ul * Ul.adjoint(), Vr * Vr.adjoint()};
}

template <BaseField T>
HermitianEigen<T> hermitian_eigen(const BaseMatrix<T>& H) {
    if (!H.allFinite()) {
        throw ConvergenceFailure("hermitian_eigen: input contains non-finite entries");
    }
    Eigen::SelfAdjointEigenSolver<BaseMatrix<T>> solver(H);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceFailure("hermitian_eigen: solver did not converge");
    }
    if (!solver.eigenvalues().allFinite()) {
        throw ConvergenceFailure("hermitian_eigen: eigenvalues overflow the double range");
    }
    // Eigen sorts ascending.
    return {solver.eigenvalues().reverse(), solver.eigenvectors().rowwise().reverse()};
}

#define DUALINV_INSTANTIATE(T)                                                             \
    template BaseSVD<T> svd<T>(const BaseMatrix<T>&);                                      \
    template Eigen::Index rank<T>(const BaseMatrix<T>&, const TolerancePolicy&);           \
    template BaseMatrix<T> pinv<T>(const BaseMatrix<T>&, const TolerancePolicy&);          \
    template BaseMatrix<T> pinv_from_svd<T>(const BaseSVD<T>&, Eigen::Index);              \
    template Projectors<T> projectors<T>(const BaseMatrix<T>&, const TolerancePolicy&);    \
    template HermitianEigen<T> hermitian_eigen<T>(const BaseMatrix<T>&);

DUALINV_INSTANTIATE(double)
DUALINV_INSTANTIATE(Complex)

#undef DUALINV_INSTANTIATE

}  // namespace dualinv
