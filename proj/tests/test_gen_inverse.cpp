#include <gtest/gtest.h>

#include "dualinv/gen_inverse.hpp"
#include "test_support.hpp"

using namespace dualinv;
using testing_support::dual;
using testing_support::random_dual;

namespace {

constexpr double kGolden = 1e-12;

template <BaseField T>
EnsembleSpec moderate(Eigen::Index m, Eigen::Index n, Structure s, std::uint64_t seed) {
    EnsembleSpec e;
    e.rows = m;
    e.cols = n;
    e.field = is_complex_v<T> ? Field::complex : Field::real;
    e.structure = s;
    e.seed = seed;
    e.sigma_min = 0.1;
    e.sigma_max = 10.0;
    return e;
}

// Every structure and a spread of shapes, moderate conditioning.
template <BaseField T, typename F>
void for_each_sample(int trials_per_case, F&& body) {
    const std::pair<int, int> shapes[] = {{1, 1}, {2, 2}, {3, 2}, {2, 5}, {10, 7}};
    const Structure structures[] = {Structure::generic, Structure::force_M4_zero, Structure::force_M2_M3_zero,
                                    Structure::force_all_zero, Structure::infinitesimal_only};
    std::uint64_t seed = 100;
    for (const auto& [m, n] : shapes) {
        for (Structure s : structures) {
            const auto spec = moderate<T>(m, n, s, seed++);
            for (int t = 0; t < trials_per_case; ++t) {
                body(generate_trial<T>(spec, static_cast<std::uint64_t>(t)), s);
            }
        }
    }
}

}  // namespace

TEST(GenInverse, Example51) {
    const auto A = testing_support::example_51();
    EXPECT_LE(max_abs_difference(mpdgi(A), dual({{1, 0}, {0, 0}}, {{0, 0}, {0, 0}})), kGolden);
    EXPECT_FALSE(dmpgi_exists(A));
    EXPECT_FALSE(block_rank_condition(A));
    const auto G = dual({{1, 0}, {0, 0}}, {{0, 1}, {1, 0}});
    EXPECT_LE(max_abs_difference(gmpi(A), G), kGolden);
    EXPECT_LE(max_abs_difference(gmpi_via_svd(A), G), kGolden);
    try {
        (void)dmpgi(A);
        FAIL() << "dmpgi should not exist";
    } catch (const DmpgiNotExist& e) {
        EXPECT_NE(std::string(e.what()).find("(I - A_s A_s^+) A_d (I - A_s^+ A_s) != O"), std::string::npos);
    }
}

TEST(GenInverse, Example52) {
    const auto A = testing_support::example_52();
    EXPECT_LE(max_abs_difference(gmpi(A), dual({{1, 0}, {0, 0}}, {{-1, 1}, {1, 0}})), kGolden);
    EXPECT_LE(max_abs_difference(gmpi_via_svd(A), dual({{1, 0}, {0, 0}}, {{-1, 1}, {1, 0}})), kGolden);
    EXPECT_LE(max_abs_difference(mpdgi(A), dual({{1, 0}, {0, 0}}, {{-1, 0}, {0, 0}})), kGolden);
    const auto c = classify(A);
    EXPECT_LE((c.M2 - BaseMatrix<double>{{0, 1}, {0, 0}}).norm(), kGolden);
    EXPECT_LE((c.M3 - BaseMatrix<double>{{0, 0}, {1, 0}}).norm(), kGolden);
    EXPECT_LE((c.M4 - BaseMatrix<double>{{0, 0}, {0, 1}}).norm(), kGolden);
    EXPECT_FALSE(c.dmpgi_exists);
    EXPECT_FALSE(c.gmpi_equals_mpdgi);
    EXPECT_FALSE(c.all_three_equal);
    EXPECT_NE(c.summary().find("DMPGI does not exist"), std::string::npos);
}

TEST(GenInverse, PureInfinitesimalScalar) {
    const auto eps = dual({{0}}, {{1}});
    EXPECT_LE(max_abs_difference(mpdgi(eps), DualMatrix<double>::zero(1, 1)), 0.0);
    EXPECT_LE(max_abs_difference(gmpi(eps), DualMatrix<double>::zero(1, 1)), 0.0);
    EXPECT_FALSE(dmpgi_exists(eps));
    EXPECT_THROW(dmpgi(eps), DmpgiNotExist);
}

TEST(GenInverse, NonsingularStandardPart) {
    std::mt19937_64 rng(51);
    const auto A = random_dual<Complex>(4, 4, 4, rng);
    EXPECT_TRUE(dmpgi_exists(A));
    const auto c = classify(A);
    EXPECT_TRUE(c.all_three_equal);
    EXPECT_LE(c.M2.norm() + c.M3.norm() + c.M4.norm(), 1e-12);
    EXPECT_LE(max_abs_difference(dmpgi(A), inverse(A)), 1e-10);
    EXPECT_LE(max_abs_difference(gmpi(A), inverse(A)), 1e-10);
}

TEST(GenInverse, DmpgiExamples) {
    const BaseMatrix<double> As{{2, 0, 0}, {0, 0, 0}};
    const DualMatrix<double> A(As);
    EXPECT_LE(max_abs_difference(dmpgi(A), DualMatrix<double>(pinv(As))), 1e-15);

    // M4 = O; the closed form gives [[1,ε],[ε,0]].
    const auto B = dual({{1, 0}, {0, 0}}, {{0, 1}, {1, 0}});
    const auto D = dmpgi(B);
    EXPECT_LE(max_abs_difference(D, dual({{1, 0}, {0, 0}}, {{0, 1}, {1, 0}})), kGolden);
    // All four Penrose conditions by direct multiplication.
    EXPECT_LE(max_abs_difference(B * D * B, B), kGolden);
    EXPECT_LE(max_abs_difference(D * B * D, D), kGolden);
    EXPECT_LE(max_abs_difference(B * D, (B * D).adjoint()), kGolden);
    EXPECT_LE(max_abs_difference(D * B, (D * B).adjoint()), kGolden);
}

TEST(GenInverse, DiagonalAppreciable) {
    const auto A = dual({{2, 0}, {0, -4}, {0, 0}}, {{1, 0}, {0, 3}, {0, 0}});
    const auto G = gmpi_via_svd(A);
    // (2+ε)⁻¹ = 1/2 − ε/4, (−4+3ε)⁻¹ = −1/4 − 3ε/16.
    const auto expected = dual({{0.5, 0, 0}, {0, -0.25, 0}}, {{-0.25, 0, 0}, {0, -3.0 / 16, 0}});
    EXPECT_LE(max_abs_difference(G, expected), kGolden);
    EXPECT_LE(max_abs_difference(gmpi(A), expected), kGolden);
}

TEST(GenInverse, ZeroDualPart) {
    std::mt19937_64 rng(52);
    const DualMatrix<double> A(random_gaussian<double>(3, 2, rng) * random_gaussian<double>(2, 4, rng));
    const auto c = classify(A);
    EXPECT_TRUE(c.dmpgi_exists && c.gmpi_equals_mpdgi && c.all_three_equal);
    EXPECT_EQ(c.M2.norm() + c.M3.norm() + c.M4.norm(), 0.0);
    const auto G = gmpi(A);
    EXPECT_LE((G.standard() - pinv(A.standard())).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE(G.dual().cwiseAbs().maxCoeff(), 1e-12);
}

TEST(GenInverse, CheckConditionsExamples) {
    const auto A = testing_support::example_51();
    const auto rep = check_conditions(A, gmpi(A));
    EXPECT_TRUE(rep.passes(Condition::c1e));
    EXPECT_TRUE(rep.passes(Condition::c2));
    EXPECT_TRUE(rep.passes(Condition::c3));
    EXPECT_TRUE(rep.passes(Condition::c4));
    EXPECT_FALSE(rep.passes(Condition::c1));
    // ‖Σ₂d‖_F = 1: the single infinitesimal singular value ε.
    EXPECT_NEAR(rep.residual_1, dual_svd(A).infinitesimal_parts().norm(), 1e-12);

    std::mt19937_64 rng(53);
    const BaseMatrix<double> As = random_gaussian<double>(4, 2, rng) * random_gaussian<double>(2, 3, rng);
    const auto classical = check_conditions(DualMatrix<double>(As), DualMatrix<double>(pinv(As)));
    for (Condition c : kAllConditions) {
        EXPECT_TRUE(classical.passes(c)) << condition_name(c);
    }

    const auto B = testing_support::example_52();
    const auto repP = check_conditions(B, mpdgi(B));
    EXPECT_FALSE(repP.passes(Condition::c1e) && repP.passes(Condition::c3) && repP.passes(Condition::c4));

    EXPECT_THROW(check_conditions(B, DualMatrix<double>::zero(3, 2)), ShapeMismatch);
}

TEST(GenInverse, RankConditionExamples) {
    // M4 = O but M2 ≠ O.
    const auto B = dual({{1, 0}, {0, 0}}, {{0, 1}, {1, 0}});
    EXPECT_TRUE(block_rank_condition(B));
    EXPECT_FALSE(range_rank_condition(B));
    EXPECT_FALSE(range_rank_condition(testing_support::example_51()));
    const auto C = dual({{1, 0}, {0, 0}}, {{5, 0}, {0, 0}});
    EXPECT_TRUE(block_rank_condition(C));
    EXPECT_TRUE(range_rank_condition(C));
}

TEST(GenInverse, GmpiIsTotal) {
    std::mt19937_64 rng(54);
    for (int m = 1; m <= 5; ++m) {
        for (int n = 1; n <= 5; ++n) {
            for (int k = 0; k <= std::min(m, n); ++k) {
                EXPECT_NO_THROW((void)gmpi(random_dual<Complex>(m, n, k, rng)));
            }
            EXPECT_NO_THROW((void)gmpi(DualMatrix<double>::zero(m, n)));
        }
    }
}

template <typename T>
class GenInverseTyped : public ::testing::Test {};
using Fields = ::testing::Types<double, Complex>;
TYPED_TEST_SUITE(GenInverseTyped, Fields);

TYPED_TEST(GenInverseTyped, SvdAndClosedFormAgree) {
    for_each_sample<TypeParam>(8, [](const auto& A, Structure) {
        EXPECT_LE(max_abs_difference(gmpi(A), gmpi_via_svd(A)), 1e-8);
    });
}

TYPED_TEST(GenInverseTyped, ExistenceEquivalence) {
    for_each_sample<TypeParam>(8, [](const auto& A, Structure s) {
        const bool m4 = dmpgi_exists(A);
        const auto f = dual_svd(A);
        EXPECT_EQ(block_rank_condition(A), m4);
        EXPECT_EQ(f.t == f.r, m4);
        EXPECT_EQ(check_conditions(A, dmpgi_formula(A)).passes(Condition::c1), m4);
        if (s == Structure::force_M4_zero || s == Structure::force_all_zero) {
            EXPECT_TRUE(m4);
        }
    });
}

TYPED_TEST(GenInverseTyped, DmpgiEqualsGmpiWhenItExists) {
    for_each_sample<TypeParam>(8, [](const auto& A, Structure) {
        if (!dmpgi_exists(A)) return;
        EXPECT_LE(max_abs_difference(dmpgi(A), gmpi(A)), 1e-10);
        EXPECT_LE(max_abs_difference(gmpi(A), gmpi(essential_part(A))), 1e-10);
    });
}

TYPED_TEST(GenInverseTyped, MpdgiIsGmpiOfProjectedMatrix) {
    using T = TypeParam;
    for_each_sample<T>(8, [](const auto& A, Structure) {
        const auto c = classify(A);
        const DualMatrix<T> A1(A.standard(), A.dual() - c.M2 - c.M3 - c.M4);
        EXPECT_LE(max_abs_difference(mpdgi(A), gmpi(A1)), 1e-10);
        const DualMatrix<T> A2(A.standard(), A.dual() - c.M2 - c.M3);
        EXPECT_LE(max_abs_difference(mpdgi(A), gmpi(A2)), 1e-10);
        if (c.gmpi_equals_mpdgi) {
            EXPECT_LE(max_abs_difference(mpdgi(A), gmpi(A)), 1e-10);
        } else {
            EXPECT_GT(max_abs_difference(mpdgi(A), gmpi(A)), 1e-10);
        }
    });
}

TYPED_TEST(GenInverseTyped, RangeRankEquivalence) {
    for_each_sample<TypeParam>(8, [](const auto& A, Structure) {
        const bool lhs = dmpgi_exists(A) && max_abs_difference(dmpgi(A), mpdgi(A)) <= 1e-10;
        EXPECT_EQ(lhs, range_rank_condition(A));
    });
}

TYPED_TEST(GenInverseTyped, FullRankIdentities) {
    using T = TypeParam;
    std::mt19937_64 rng(55);
    for (int trial = 0; trial < 30; ++trial) {
        const auto tall = random_dual<T>(5, 3, 3, rng);
        EXPECT_LE(max_abs_difference(mpdgi(tall) * tall, DualMatrix<T>::identity(3)), 1e-10);
        const auto wide = random_dual<T>(2, 6, 2, rng);
        EXPECT_LE(max_abs_difference(wide * mpdgi(wide), DualMatrix<T>::identity(2)), 1e-10);
    }
}

TYPED_TEST(GenInverseTyped, Involution) {
    for_each_sample<TypeParam>(8, [](const auto& A, Structure) {
        EXPECT_LE(max_abs_difference(gmpi(gmpi(A)), essential_part(A)), 1e-8);
    });
}

TYPED_TEST(GenInverseTyped, PenroseConditions) {
    for_each_sample<TypeParam>(8, [](const auto& A, Structure) {
        TolerancePolicy tol;
        tol.residual = 1e-9;
        const auto rep = check_conditions(A, gmpi(A), tol);
        EXPECT_TRUE(rep.passes(Condition::c1e));
        EXPECT_TRUE(rep.passes(Condition::c2));
        EXPECT_TRUE(rep.passes(Condition::c3));
        EXPECT_TRUE(rep.passes(Condition::c4));
        EXPECT_EQ(rep.passes(Condition::c1), dmpgi_exists(A));
    });
}

TYPED_TEST(GenInverseTyped, MinimumResidualAndNorm) {
    std::mt19937_64 rng(56);
    std::size_t optimal = 0;
    for_each_sample<TypeParam>(2, [&](const auto& A, Structure) {
        const double tol = 1e-9 * (1.0 + A.dual().norm());
        const auto r = check_optimality(A, 40, rng, tol);
        EXPECT_LE(r.optimum_gap, tol);
        EXPECT_EQ(r.beat_residual, 0U);
        EXPECT_EQ(r.beat_norm, 0U);
        optimal += r.optimal;
    });
    // The structured candidates really do reach the optimum.
    EXPECT_GT(optimal, 0U);
}
