#include <cmath>

#include <gtest/gtest.h>

#include "qrv/instances.hpp"
#include "qrv/majorization.hpp"

using namespace qrv;

TEST(Subsets, LexicographicCount) {
    const auto s = detail::k_subsets(4, 2);
    ASSERT_EQ(s.size(), 6u);
    EXPECT_EQ(s.front(), (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(s.back(), (std::vector<std::size_t>{2, 3}));
}

TEST(JoeVerducci, Verdicts) {
    const auto ex = instances::joe_verducci();
    const auto b = majorizes_B(ex.f, ex.g);
    EXPECT_EQ(b.verdict, Verdict::Fails);
    EXPECT_GT(b.farkas_pairing, 1e-8);
    const auto t = majorizes_T(ex.f, ex.g);
    EXPECT_EQ(t.verdict, Verdict::Fails);
    ASSERT_TRUE(t.refuting_t.has_value());
    EXPECT_NEAR(t.margin, std::sqrt(2.0), 1e-9);
    // The refuting direction is +-diag(1, -1)/sqrt 2 up to normalization.
    const auto &r = t.refuting_t->matrix();
    EXPECT_NEAR(std::abs(r(0, 0) + r(1, 1)), 0.0, 1e-9);
    EXPECT_NEAR(std::abs(r(0, 1)), 0.0, 1e-9);
    const auto s = majorizes_S(ex.f, ex.g);
    EXPECT_EQ(s.verdict, Verdict::Holds);
    EXPECT_EQ(s.sample_refutations, 0u);
}

TEST(Malamud, Verdicts) {
    const auto ex = instances::malamud();
    EXPECT_EQ(majorizes_T(ex.f, ex.g).verdict, Verdict::Holds);
    const auto b = majorizes_B(ex.f, ex.g);
    EXPECT_EQ(b.verdict, Verdict::Fails);
    EXPECT_LE(b.farkas_dual_residual, 1e-8);
    const auto sep = komiya_separate(ex.f, ex.g);
    EXPECT_TRUE(sep.separated);
    EXPECT_GT(sep.margin, 1e-6);
}

TEST(Orders, EveryFunctionMajorizesItself) {
    const auto ex = instances::malamud();
    for (auto c : {majorizes_B(ex.g, ex.g), majorizes_T(ex.g, ex.g), majorizes_S(ex.g, ex.g)}) {
        EXPECT_EQ(c.verdict, Verdict::Holds) << to_string(c.order);
    }
}

TEST(Orders, AveragingIsAlwaysMajorized) {
    const auto ex = instances::malamud();
    const auto avg = apply_bistochastic(BistochasticMatrix::averaging(ex.g.space()), ex.g);
    const auto b = majorizes_B(avg, ex.g);
    ASSERT_EQ(b.verdict, Verdict::Holds);
    ASSERT_TRUE(b.witness.has_value());
    EXPECT_LE(b.witness_residual, 1e-9);
    EXPECT_FALSE(komiya_separate(avg, ex.g).separated);
}

TEST(Orders, ScalarCaseMatchesPartialSums) {
    const auto s = FiniteMeasureSpace::uniform(3, 1.0 / 3);
    const auto f = instances::diagonal_qrv(s, {{2}, {2}, {2}});
    const auto g = instances::diagonal_qrv(s, {{0}, {2}, {4}});
    EXPECT_EQ(majorizes_B(f, g).verdict, Verdict::Holds);
    EXPECT_EQ(majorizes_B(g, f).verdict, Verdict::Fails);
    EXPECT_EQ(majorizes_T(g, f).verdict, Verdict::Fails);
}

TEST(Orders, ApplyBistochasticEntrywise) {
    const auto s = FiniteMeasureSpace::uniform(2);
    Eigen::MatrixXd m(2, 2);
    m << 0.25, 0.75, 0.75, 0.25;
    const auto f = instances::diagonal_qrv(s, {{4, 0}, {0, 8}});
    const auto bf = apply_bistochastic(BistochasticMatrix(s, m), f);
    EXPECT_NEAR(bf[0](0, 0).real(), 1.0, 1e-15);
    EXPECT_NEAR(bf[0](1, 1).real(), 6.0, 1e-15);
}

TEST(Psi, ForwardMonotone) {
    const auto ex = instances::malamud();
    SeparatingFunctional phi{{HermitianOperator::diagonal({1, 0}), HermitianOperator::diagonal({0, 1}),
                              HermitianOperator::diagonal({-1, 1}), HermitianOperator::diagonal({1, 1})}};
    const auto avg = apply_bistochastic(BistochasticMatrix::averaging(ex.g.space()), ex.g);
    EXPECT_LE(psi_phi(phi, avg).value, psi_phi(phi, ex.g).value + 1e-9);
}

TEST(Orders, MismatchedSpacesRejected) {
    const auto ex = instances::malamud();
    const auto other = instances::joe_verducci();
    EXPECT_THROW(majorizes_B(ex.f, other.g), Error);
}
