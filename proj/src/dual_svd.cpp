#include "dualinv/dual_svd.hpp"

namespace dualinv {

namespace {

// Singular values closer than this (relative) are treated as one cluster.
constexpr double kClusterGap = 1e-8;

template <BaseField T>
struct StandardFrame {
    BaseMatrix<T> Us;
    BaseMatrix<T> Vs;
    RealVector sigma_s;    // min(m, n)
    RealVector sigma_d;    // min(m, n)
    std::vector<int> cluster;  // cluster id of each appreciable index
    Eigen::Index r = 0;
    Eigen::Index t = 0;
};

// Steps 1-4: rotate the base singular vectors until U_s*·A_d·V_s has the
// dual singular values on its diagonal blocks.
template <BaseField T>
StandardFrame<T> build_frame(const DualMatrix<T>& A, const TolerancePolicy& tol) {
    const Eigen::Index m = A.rows();
    const Eigen::Index n = A.cols();
    const Eigen::Index k = std::min(m, n);

    auto f = svd(A.standard());
    StandardFrame<T> fr;
    fr.Us = std::move(f.U);
    fr.Vs = std::move(f.V);
    fr.sigma_s = f.sigma;
    fr.sigma_d = RealVector::Zero(k);
    fr.r = rank_from_sigma(fr.sigma_s, m, n, tol);
    const Eigen::Index r = fr.r;
    fr.sigma_s.tail(k - r).setZero();

    const BaseMatrix<T> P = fr.Us.adjoint() * A.dual() * fr.Vs;

    fr.cluster.assign(static_cast<std::size_t>(r), 0);
    Eigen::Index begin = 0;
    int id = 0;
    while (begin < r) {
        Eigen::Index end = begin + 1;
        while (end < r && fr.sigma_s(end - 1) - fr.sigma_s(end) <= kClusterGap * fr.sigma_s(end - 1)) {
            ++end;
        }
        const Eigen::Index size = end - begin;
        for (Eigen::Index i = begin; i < end; ++i) {
            fr.cluster[static_cast<std::size_t>(i)] = id;
        }
        if (size == 1) {
            fr.sigma_d(begin) = real_of(P(begin, begin));
        } else {
            const BaseMatrix<T> B = P.block(begin, begin, size, size);
            const BaseMatrix<T> hermitian = (B + B.adjoint()) / 2.0;
            const auto eig = hermitian_eigen<T>(hermitian);
            fr.Us.middleCols(begin, size) = fr.Us.middleCols(begin, size) * eig.vectors;
            fr.Vs.middleCols(begin, size) = fr.Vs.middleCols(begin, size) * eig.vectors;
            fr.sigma_d.segment(begin, size) = eig.values;
        }
        begin = end;
        ++id;
    }

    fr.t = r;
    if (r < m && r < n) {
        const BaseMatrix<T> N = P.bottomRightCorner(m - r, n - r);
        const auto g = svd<T>(N);
        const double cutoff = zero_threshold(A, tol);
        Eigen::Index nt = 0;
        while (nt < g.sigma.size() && g.sigma(nt) > cutoff) {
            fr.sigma_d(r + nt) = g.sigma(nt);
            ++nt;
        }
        fr.t = r + nt;
        fr.Us.rightCols(m - r) = fr.Us.rightCols(m - r) * g.U;
        fr.Vs.rightCols(n - r) = fr.Vs.rightCols(n - r) * g.V;
    }
    return fr;
}

template <BaseField T>
std::vector<DualReal> collect_sigma(const StandardFrame<T>& fr) {
    std::vector<DualReal> out;
    out.reserve(static_cast<std::size_t>(fr.sigma_s.size()));
    for (Eigen::Index i = 0; i < fr.sigma_s.size(); ++i) {
        out.emplace_back(i < fr.r ? fr.sigma_s(i) : 0.0, i < fr.t ? fr.sigma_d(i) : 0.0);
    }
    return out;
}

}  // namespace

template <BaseField T>
DualMatrix<T> DualSVD<T>::sigma_matrix() const {
    const Eigen::Index m = U.rows();
    const Eigen::Index n = V.rows();
    BaseMatrix<T> s = BaseMatrix<T>::Zero(m, n);
    BaseMatrix<T> d = BaseMatrix<T>::Zero(m, n);
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        s(ii, ii) = sigma[i].standard();
        d(ii, ii) = sigma[i].dual();
    }
    return {s, d};
}

template <BaseField T>
DualMatrix<T> DualSVD<T>::reconstruct() const {
    return U * sigma_matrix() * V.adjoint();
}

template <BaseField T>
DualMatrix<T> DualSVD<T>::essential() const {
    DualMatrix<T> S = sigma_matrix();
    BaseMatrix<T> d = S.dual();
    for (Eigen::Index i = r; i < static_cast<Eigen::Index>(sigma.size()); ++i) {
        d(i, i) = T{};
    }
    return U * DualMatrix<T>(S.standard(), d) * V.adjoint();
}

template <BaseField T>
RealVector DualSVD<T>::infinitesimal_parts() const {
    RealVector out(t - r);
    for (Eigen::Index i = r; i < t; ++i) {
        out(i - r) = sigma[static_cast<std::size_t>(i)].dual();
    }
    return out;
}

template <BaseField T>
DualSVD<T> dual_svd(const DualMatrix<T>& A, const TolerancePolicy& tol) {
    const Eigen::Index m = A.rows();
    const Eigen::Index n = A.cols();
    StandardFrame<T> fr = build_frame(A, tol);
    const Eigen::Index r = fr.r;
    const RealVector& s = fr.sigma_s;

    // Step 5: P = GΣ_s + Σ_d − Σ_s H with G, H skew-Hermitian.
    const BaseMatrix<T> P = fr.Us.adjoint() * A.dual() * fr.Vs;
    BaseMatrix<T> G = BaseMatrix<T>::Zero(m, m);
    BaseMatrix<T> H = BaseMatrix<T>::Zero(n, n);

    for (Eigen::Index i = 0; i < r; ++i) {
        if constexpr (is_complex_v<T>) {
            G(i, i) = T(0.0, P(i, i).imag() / s(i));
        }
        for (Eigen::Index j = i + 1; j < r; ++j) {
            // (i, j) and (j, i) entries give
            //   g − h = (P_ij − conj P_ji) / (σ_i + σ_j)
            //   g + h = (P_ij + conj P_ji) / (σ_j − σ_i)
            // and inside a cluster the Hermitian part is already diagonal.
            const T sum = (P(i, j) - conj_of(P(j, i))) / (s(i) + s(j));
            T diff{};
            if (fr.cluster[static_cast<std::size_t>(i)] != fr.cluster[static_cast<std::size_t>(j)]) {
                diff = (P(i, j) + conj_of(P(j, i))) / (s(j) - s(i));
            }
            G(i, j) = (sum + diff) / 2.0;
            H(i, j) = (diff - sum) / 2.0;
            G(j, i) = -conj_of(G(i, j));
            H(j, i) = -conj_of(H(i, j));
        }
        for (Eigen::Index j = r; j < n; ++j) {
            H(i, j) = -P(i, j) / s(i);
            H(j, i) = -conj_of(H(i, j));
        }
        for (Eigen::Index j = r; j < m; ++j) {
            G(j, i) = P(j, i) / s(i);
            G(i, j) = -conj_of(G(j, i));
        }
    }

    DualSVD<T> out;
    out.sigma = collect_sigma(fr);
    out.r = fr.r;
    out.t = fr.t;
    out.U = DualMatrix<T>(fr.Us, fr.Us * G);
    out.V = DualMatrix<T>(fr.Vs, fr.Vs * H);
    return out;
}

template <BaseField T>
std::vector<DualReal> dual_singular_values(const DualMatrix<T>& A, const TolerancePolicy& tol) {
    return collect_sigma(build_frame(A, tol));
}

template <BaseField T>
DualMatrix<T> nonessential_part(const DualMatrix<T>& A, const TolerancePolicy& tol) {
    const auto proj = projectors<T>(A.standard(), tol);
    return {BaseMatrix<T>::Zero(A.rows(), A.cols()), proj.left * A.dual() * proj.right};
}

template <BaseField T>
DualMatrix<T> essential_part(const DualMatrix<T>& A, const TolerancePolicy& tol) {
    return A - nonessential_part(A, tol);
}

#define DUALINV_INSTANTIATE(T)                                                                  \
    template struct DualSVD<T>;                                                                 \
    template DualSVD<T> dual_svd<T>(const DualMatrix<T>&, const TolerancePolicy&);              \
    template std::vector<DualReal> dual_singular_values<T>(const DualMatrix<T>&,                \
                                                           const TolerancePolicy&);             \
    template DualMatrix<T> nonessential_part<T>(const DualMatrix<T>&, const TolerancePolicy&); \
    template DualMatrix<T> essential_part<T>(const DualMatrix<T>&, const TolerancePolicy&);

DUALINV_INSTANTIATE(double)
DUALINV_INSTANTIATE(Complex)

#undef DUALINV_INSTANTIATE

}  // namespace dualinv
