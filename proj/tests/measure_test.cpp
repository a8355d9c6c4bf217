#include <gtest/gtest.h>

#include "qrv/measure.hpp"

using namespace qrv;

namespace {

ErrorKind kind_of(const std::function<void()> &fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.kind();
    }
    return ErrorKind::Validation;
}

Eigen::MatrixXd perm(const std::vector<std::size_t> &p) { return detail::permutation_matrix(p); }

} // namespace

TEST(Space, Validation) {
    EXPECT_EQ(kind_of([] { FiniteMeasureSpace({}, {}); }), ErrorKind::InvalidSpace);
    EXPECT_EQ(kind_of([] { FiniteMeasureSpace({"a", "b"}, {1.0, 0.0}); }), ErrorKind::InvalidSpace);
    EXPECT_EQ(kind_of([] { FiniteMeasureSpace({"a", "a"}, {1.0, 1.0}); }), ErrorKind::InvalidSpace);
    EXPECT_EQ(kind_of([] { FiniteMeasureSpace({"a"}, {1.0, 2.0}); }), ErrorKind::InvalidSpace);
    const FiniteMeasureSpace s({"a", "b"}, {0.25, 0.75});
    EXPECT_DOUBLE_EQ(s.total_mass(), 1.0);
    EXPECT_EQ(s.index_of("b"), std::optional<std::size_t>(1));
    EXPECT_FALSE(s.index_of("c"));
}

TEST(Rearrangement, MergesTiesAndSortsDown) {
    const auto s = FiniteMeasureSpace::indexed({0.1, 0.2, 0.3, 0.4});
    const auto f = ClassicalFunction::real(s, {1, 3, 3, 2});
    const auto r = decreasing_rearrangement(f);
    ASSERT_EQ(r.steps.size(), 3u);
    EXPECT_NEAR(r.steps[0].first, 0.5, 1e-15);
    EXPECT_EQ(r.steps[0].second, 3.0);
    EXPECT_NEAR(r.steps[1].first, 0.4, 1e-15);
    EXPECT_EQ(r.steps[2].second, 1.0);
    EXPECT_NEAR(distribution_function(f, 1.5), 0.9, 1e-15);
    EXPECT_NEAR(r.integral_to(0.6), 0.5 * 3 + 0.1 * 2, 1e-15);
}

TEST(PartialSums, HoldsForFlattening) {
    const auto s = FiniteMeasureSpace::uniform(2, 0.5);
    const auto flat = ClassicalFunction::real(s, {2, 2});
    const auto spread = ClassicalFunction::real(s, {1, 3});
    EXPECT_TRUE(classical_majorizes(flat, spread));
    const auto c = compare_partial_sums(spread, flat);
    EXPECT_FALSE(c.majorized);
    EXPECT_NEAR(c.max_violation, 0.5, 1e-15);
    EXPECT_NEAR(c.violation_at, 0.5, 1e-15);
    EXPECT_TRUE(convex_function_test(flat, spread));
    EXPECT_FALSE(convex_function_test(spread, flat));
}

TEST(PartialSums, UnequalTotalsFail) {
    const auto s = FiniteMeasureSpace::uniform(2, 0.5);
    const auto c = compare_partial_sums(ClassicalFunction::real(s, {0, 0}), ClassicalFunction::real(s, {1, 1}));
    EXPECT_FALSE(c.majorized);
    EXPECT_NEAR(c.total_difference, 1.0, 1e-15);
}

TEST(Bistochastic, RejectsBrokenConditions) {
    const auto s = FiniteMeasureSpace::uniform(2);
    Eigen::MatrixXd rows(2, 2);
    rows << 1, 0, 1, 0; // unit row sums, column condition broken
    EXPECT_EQ(kind_of([&] { BistochasticMatrix(s, rows); }), ErrorKind::NotBistochastic);
    Eigen::MatrixXd neg(2, 2);
    neg << 1.5, -0.5, -0.5, 1.5;
    EXPECT_EQ(kind_of([&] { BistochasticMatrix(s, neg); }), ErrorKind::NotBistochastic);
}

TEST(Bistochastic, WeightedAveragingPreservesIntegral) {
    const auto s = FiniteMeasureSpace::indexed({0.2, 0.3, 0.5});
    const auto b = BistochasticMatrix::averaging(s);
    EXPECT_LT(b.defect(), 1e-15);
    const auto g = ClassicalFunction::real(s, {1, -2, 4});
    const auto bg = b.apply(g);
    const double mean = (0.2 * 1 - 0.3 * 2 + 0.5 * 4) / 1.0;
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_NEAR(bg[i].real(), mean, 1e-15);
    }
    EXPECT_NEAR(std::abs(bg.integral() - g.integral()), 0.0, 1e-15);
}

TEST(Witness, FoundOrRefuted) {
    const auto s = FiniteMeasureSpace::uniform(2, 0.5);
    const auto flat = ClassicalFunction::real(s, {2, 2});
    const auto spread = ClassicalFunction::real(s, {1, 3});
    const auto yes = bistochastic_witness(flat, spread);
    ASSERT_TRUE(yes.witness.has_value());
    EXPECT_LE(yes.residual, 1e-12);
    const auto no = bistochastic_witness(spread, flat);
    EXPECT_FALSE(no.witness.has_value());
    EXPECT_TRUE(verify_farkas(no.problem, no.farkas));
}

TEST(Birkhoff, RecoversKnownMixture) {
    const auto s = FiniteMeasureSpace::uniform(3, 1.0 / 3);
    const Eigen::MatrixXd a = 0.5 * perm({0, 1, 2}) + 0.3 * perm({1, 2, 0}) + 0.2 * perm({2, 0, 1});
    const auto terms = birkhoff_decompose(BistochasticMatrix(s, a));
    EXPECT_LE(terms.size(), 5u);
    double total = 0.0;
    for (const auto &t : terms) {
        EXPECT_GT(t.weight, 0.0);
        total += t.weight;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_LT((birkhoff_reconstruct(terms, 3) - a).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Birkhoff, NeedsUniformMasses) {
    const auto s = FiniteMeasureSpace::indexed({0.4, 0.6});
    EXPECT_EQ(kind_of([&] { birkhoff_decompose(BistochasticMatrix::identity(s)); }), ErrorKind::NotUniform);
}
