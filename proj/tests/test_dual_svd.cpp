#include <gtest/gtest.h>

#include <algorithm>

#include "dualinv/dual_svd.hpp"
#include "test_support.hpp"

using namespace dualinv;
using testing_support::dual;
using testing_support::random_dual;

namespace {

void expect_sigma(const std::vector<DualReal>& got, const std::vector<DualReal>& want, double tol = 1e-12) {
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
        EXPECT_NEAR(got[i].standard(), want[i].standard(), tol) << "index " << i;
        EXPECT_NEAR(got[i].dual(), want[i].dual(), tol) << "index " << i;
    }
}

template <BaseField T>
double unitarity_defect(const DualMatrix<T>& U) {
    const DualMatrix<T> g = U.adjoint() * U;
    return max_abs_difference(g, DualMatrix<T>::identity(U.cols()));
}

}  // namespace

TEST(DualSvd, Example51) {
    const auto A = testing_support::example_51();
    const auto f = dual_svd(A);
    EXPECT_EQ(f.r, 1);
    EXPECT_EQ(f.t, 2);
    expect_sigma(f.sigma, {DualReal(1, 0), DualReal(0, 1)});
    EXPECT_LE(max_abs_difference(f.reconstruct(), A), 1e-12);
    EXPECT_LE(max_abs_difference(f.essential(), dual({{1, 0}, {0, 0}}, {{0, 1}, {1, 0}})), 1e-12);
}

TEST(DualSvd, Example52) {
    const auto A = testing_support::example_52();
    const auto f = dual_svd(A);
    EXPECT_EQ(f.r, 1);
    EXPECT_EQ(f.t, 2);
    expect_sigma(f.sigma, {DualReal(1, 1), DualReal(0, 1)});
    expect_sigma(dual_singular_values(A), {DualReal(1, 1), DualReal(0, 1)});
    EXPECT_LE(max_abs_difference(f.reconstruct(), A), 1e-12);
}

TEST(DualSvd, StandardDiagonal) {
    const auto f = dual_svd(dual({{3, 0}, {0, 2}}, {{0, 0}, {0, 0}}));
    EXPECT_EQ(f.r, 2);
    EXPECT_EQ(f.t, 2);
    expect_sigma(f.sigma, {DualReal(3, 0), DualReal(2, 0)});
}

TEST(DualSvd, ZeroMatrix) {
    const auto f = dual_svd(DualMatrix<double>::zero(2, 3));
    EXPECT_EQ(f.r, 0);
    EXPECT_EQ(f.t, 0);
    expect_sigma(f.sigma, {DualReal(0, 0), DualReal(0, 0)}, 0.0);
}

TEST(DualSvd, ScalarCase) {
    // 1×1 a with a_s > 0 has singular value a itself; negative a flips sign.
    expect_sigma(dual_singular_values(dual({{2}}, {{-5}})), {DualReal(2, -5)});
    expect_sigma(dual_singular_values(dual({{-2}}, {{-5}})), {DualReal(2, 5)});
    expect_sigma(dual_singular_values(dual({{0}}, {{-5}})), {DualReal(0, 5)});
    const DualMatrix<Complex> c(BaseMatrix<Complex>{{Complex(0, 2)}}, BaseMatrix<Complex>{{Complex(1, 3)}});
    // |2i + (1+3i)ε| = 2 + Re(conj(2i)(1+3i))/2 ε = 2 + 3ε.
    expect_sigma(dual_singular_values(c), {DualReal(2, 3)});
}

TEST(DualSvd, ShiftOfHermitian) {
    // diag(3, 1) + μI with μ = 0.5 + 2ε: values shift by μ.
    const auto A = dual({{3.5, 0}, {0, 1.5}}, {{2, 0}, {0, 2}});
    expect_sigma(dual_singular_values(A), {DualReal(3.5, 2), DualReal(1.5, 2)});
}

TEST(DualSvd, RepeatedSingularValues) {
    // A_s = I₃: every value sits in one cluster and the dual parts are the
    // eigenvalues of the Hermitian part of A_d.
    const auto A = dual({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {{0, 2, 0}, {0, 0, 0}, {0, 0, 3}});
    const auto f = dual_svd(A);
    // Hermitian part [[0,1,0],[1,0,0],[0,0,3]] has eigenvalues 3, 1, −1.
    expect_sigma(f.sigma, {DualReal(1, 3), DualReal(1, 1), DualReal(1, -1)});
    EXPECT_LE(max_abs_difference(f.reconstruct(), A), 1e-12);
    EXPECT_LE(unitarity_defect(f.U), 1e-12);
    EXPECT_LE(unitarity_defect(f.V), 1e-12);
}

TEST(DualSvd, EssentialAndNonessentialExamples) {
    const auto A = testing_support::example_51();
    EXPECT_LE(max_abs_difference(essential_part(A), dual({{1, 0}, {0, 0}}, {{0, 1}, {1, 0}})), 1e-15);
    EXPECT_LE(max_abs_difference(nonessential_part(A), dual({{0, 0}, {0, 0}}, {{0, 0}, {0, 1}})), 1e-15);

    const auto B = dual({{1, 0}, {0, 0}}, {{0, 1}, {1, 0}});
    EXPECT_LE(max_abs_difference(essential_part(B), B), 1e-15);

    const auto C = dual({{0, 0}, {0, 0}}, {{1, 2}, {3, 4}});
    EXPECT_LE(max_abs_difference(essential_part(C), DualMatrix<double>::zero(2, 2)), 1e-15);

    std::mt19937_64 rng(41);
    const auto D = random_dual<double>(3, 3, 3, rng);
    EXPECT_LE(max_abs_difference(nonessential_part(D), DualMatrix<double>::zero(3, 3)), 1e-12);
    const DualMatrix<double> E(D.standard());
    EXPECT_EQ(max_abs_difference(nonessential_part(E), DualMatrix<double>::zero(3, 3)), 0.0);
}

template <typename T>
class DualSvdTyped : public ::testing::Test {};
using Fields = ::testing::Types<double, Complex>;
TYPED_TEST_SUITE(DualSvdTyped, Fields);

TYPED_TEST(DualSvdTyped, StructuralInvariants) {
    using T = TypeParam;
    std::mt19937_64 rng(42);
    const std::pair<int, int> shapes[] = {{1, 1}, {2, 2}, {3, 2}, {2, 5}, {10, 7}, {7, 10}, {30, 20}};
    for (const auto& [m, n] : shapes) {
        for (int k = 0; k <= std::min(m, n); k += std::max(1, std::min(m, n) / 4)) {
            const auto A = random_dual<T>(m, n, k, rng);
            const auto f = dual_svd(A);
            const double scale = 1.0 + A.dual().norm();
            EXPECT_LE(max_part_distance(f.reconstruct(), A), 1e-9 * scale) << m << "x" << n << " k=" << k;
            EXPECT_LE(unitarity_defect(f.U), 1e-9);
            EXPECT_LE(unitarity_defect(f.V), 1e-9);

            // r = rank(A_s); t − r = rank(M4); infinitesimal parts = σ(M4).
            EXPECT_EQ(f.r, rank(A.standard()));
            const BaseMatrix<T> M4 = nonessential_part(A).dual();
            const RealVector s4 = svd<T>(M4).sigma;
            const Eigen::Index t4 = (s4.array() > zero_threshold(A, TolerancePolicy{})).count();
            EXPECT_EQ(f.t - f.r, t4);
            const RealVector inf = f.infinitesimal_parts();
            for (Eigen::Index i = 0; i < inf.size(); ++i) {
                EXPECT_NEAR(inf(i), s4(i), 1e-9 * scale);
            }

            // A_e is formed as A − A_n, so adding A_n back only rounds.
            EXPECT_LE(max_abs_difference(essential_part(A) + nonessential_part(A), A), 1e-14 * scale);
        }
    }
}

TYPED_TEST(DualSvdTyped, SigmaUnderColumnPermutation) {
    using T = TypeParam;
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 40; ++trial) {
        const int m = 2 + trial % 5, n = 2 + trial % 4;
        const auto A = random_dual<T>(m, n, trial % (std::min(m, n) + 1), rng);
        Eigen::PermutationMatrix<Eigen::Dynamic> p(n);
        p.setIdentity();
        std::shuffle(p.indices().data(), p.indices().data() + n, rng);
        const DualMatrix<T> B(A.standard() * p, A.dual() * p);
        expect_sigma(dual_singular_values(B), dual_singular_values(A), 1e-9 * (1 + A.dual().norm()));
    }
}

TEST(DualSvd, FastPathMatchesFullDecomposition) {
    std::mt19937_64 rng(44);
    for (int trial = 0; trial < 20; ++trial) {
        const auto A = random_dual<Complex>(4, 6, trial % 5, rng);
        EXPECT_EQ(dual_singular_values(A), dual_svd(A).sigma);
    }
}

TEST(DualSvd, EssentialPartIsBestRankRApproximation) {
    std::mt19937_64 rng(45);
    for (int trial = 0; trial < 1000; ++trial) {
        const int m = 3 + trial % 3, n = 2 + trial % 4;
        const int r = 1 + trial % std::min(m, n);
        const auto A = random_dual<double>(m, n, r, rng);
        const DualReal best = frob_norm(A - essential_part(A));

        DualMatrix<double> B;
        if (trial % 2 == 0) {
            // Generic rank-r product of dual factors.
            const DualMatrix<double> F(random_gaussian<double>(m, r, rng), random_gaussian<double>(m, r, rng));
            const DualMatrix<double> G(random_gaussian<double>(r, n, rng), random_gaussian<double>(r, n, rng));
            B = F * G;
        } else {
            // Same standard part as A, so only the dual parts compete.
            const auto f = svd(A.standard());
            BaseMatrix<double> S = f.sigma.head(r).asDiagonal();
            const DualMatrix<double> F(f.U.leftCols(r), random_gaussian<double>(m, r, rng));
            const DualMatrix<double> D(S, random_gaussian<double>(r, r, rng));
            const DualMatrix<double> G(f.V.leftCols(r).adjoint(), random_gaussian<double>(r, n, rng));
            B = F * D * G;
        }
        EXPECT_GE(frob_norm(A - B), best) << "trial " << trial;
    }
}
