#include <cmath>

#include <gtest/gtest.h>

#include "qrv/instances.hpp"
#include "qrv/l1norm.hpp"

using namespace qrv;

namespace {

const cplx I1(0.0, 1.0);

double max_diff(const CMatrix &a, const CMatrix &b) { return (a - b).cwiseAbs().maxCoeff(); }

QuantumRandomVariable scalar_qrv(const FiniteMeasureSpace &s, const std::vector<cplx> &v) {
    std::vector<ComplexOperator> out;
    for (auto z : v) {
        out.push_back(ComplexOperator({{z}}));
    }
    return {s, 1, out};
}

} // namespace

TEST(L1, NineExampleValueAndCertificate) {
    const auto ex = instances::nine_vs_eleven();
    const auto c = l1_seminorm(ex.f, ex.nu);
    ASSERT_TRUE(c.converged);
    EXPECT_NEAR(c.value, 9.0, 1e-6);
    EXPECT_GE(c.dual_lower_bound, 9.0 - 1e-6);
    EXPECT_LE(c.dual_lower_bound, c.value + 1e-12);
    for (std::size_t i = 0; i < 2; ++i) {
        const CMatrix rebuilt = (c.f1[i] - c.f2[i]).matrix() + I1 * (c.f3[i] - c.f4[i]).matrix();
        EXPECT_LT(max_diff(rebuilt, ex.f[i].matrix()), 1e-9);
        for (const auto *part : {&c.f1[i], &c.f2[i], &c.f3[i], &c.f4[i]}) {
            EXPECT_TRUE(is_psd(*part));
        }
    }
    EXPECT_NEAR(l1_upper_abs(ex.f, ex.nu), 11.0, 1e-12);
}

TEST(L1, PositiveFunctionGivesNormOfIntegral) {
    const auto s = FiniteMeasureSpace::indexed({0.5, 2.0});
    const Povm nu = Povm::scalar(s, 2);
    const QuantumRandomVariable f(s, 2, {ComplexOperator({{2, 1}, {1, 1}}), ComplexOperator({{1, 0}, {0, 3}})});
    const auto c = l1_seminorm(f, nu);
    EXPECT_NEAR(c.value, operator_norm(integrate(f, nu)), 1e-12);
    EXPECT_NEAR(c.gap, 0.0, 1e-9);
}

TEST(L1, OneDimensionalIsSumOfAbsoluteParts) {
    // ||f||_1 = sum mu (|Re f| + |Im f|) = 0.5 * 3 + 2 * 3.
    const auto s = FiniteMeasureSpace::indexed({0.5, 2.0});
    const auto c = l1_seminorm(scalar_qrv(s, {1.0 + 2.0 * I1, -3.0}), Povm::scalar(s, 1));
    EXPECT_NEAR(c.value, 7.5, 1e-7);
}

TEST(L1, HomogeneousOnlyForRealScalars) {
    const auto s = FiniteMeasureSpace::uniform(1);
    const Povm nu = Povm::scalar(s, 1);
    const auto unit = l1_seminorm(scalar_qrv(s, {1.0}), nu).value;
    const auto minus = l1_seminorm(scalar_qrv(s, {-2.0}), nu).value;
    const auto rotated = l1_seminorm(scalar_qrv(s, {(1.0 + I1) / std::sqrt(2.0)}), nu).value;
    EXPECT_NEAR(unit, 1.0, 1e-8);
    EXPECT_NEAR(minus, 2.0, 1e-8);
    EXPECT_NEAR(rotated, std::sqrt(2.0), 1e-7); // |z| = 1 but the value grows by sqrt 2
}

TEST(L1, ZeroFunction) {
    const auto s = FiniteMeasureSpace::uniform(2);
    const QuantumRandomVariable f(s, 2, {ComplexOperator::zero(2), ComplexOperator::zero(2)});
    const auto c = l1_seminorm(f, Povm::scalar(s, 2));
    EXPECT_TRUE(c.converged);
    EXPECT_EQ(c.value, 0.0);
}

TEST(L1, NullAtomsDoNotCount) {
    const auto s = FiniteMeasureSpace::uniform(2);
    const Povm nu(s, 2, {HermitianOperator::identity(2), HermitianOperator::zero(2)});
    const QuantumRandomVariable f(s, 2, {ComplexOperator({{1, 0}, {0, -1}}), ComplexOperator({{50, 0}, {0, -50}})});
    EXPECT_NEAR(l1_seminorm(f, nu).value, 1.0, 1e-7);
}

TEST(L1, StallIsReported) {
    const auto ex = instances::nine_vs_eleven();
    L1Options opt;
    opt.max_iterations = 1;
    const auto c = l1_seminorm(ex.f, ex.nu, opt);
    EXPECT_FALSE(c.converged);
    try {
        require_converged(c);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::SolverStall);
    }
}

TEST(L1, UpperBoundNeedsSelfAdjoint) {
    const auto s = FiniteMeasureSpace::uniform(1);
    EXPECT_THROW(l1_upper_abs(scalar_qrv(s, {I1}), Povm::scalar(s, 1)), Error);
}

TEST(Bracket, NineExampleAgainstScalar) {
    const auto ex = instances::nine_vs_eleven();
    const ClassicalFunction g = ClassicalFunction::real(ex.f.space(), {1, -2});
    const auto b = bracket(ex.f, g, ex.nu);
    EXPECT_LT(max_diff(b.matrix(), ComplexOperator({{-2, 4}, {4, 10}}).matrix()), 1e-14);
}

TEST(Multipliers, LeftAndRight) {
    const auto s = FiniteMeasureSpace::uniform(1);
    const QuantumRandomVariable f(s, 2, {ComplexOperator({{1, 2}, {3, 4}})});
    const ComplexOperator e12({{0, 1}, {0, 0}});
    EXPECT_LT(max_diff(mult_operator(e12, f, Side::Left)[0].matrix(), ComplexOperator({{3, 4}, {0, 0}}).matrix()),
              1e-15);
    EXPECT_LT(max_diff(mult_operator(e12, f, Side::Right)[0].matrix(), ComplexOperator({{0, 1}, {0, 3}}).matrix()),
              1e-15);
}

TEST(Positivity, DetectsNegativeDirection) {
    const auto ex = instances::nine_vs_eleven();
    const auto w = detect_positive(ex.f, ex.nu);
    EXPECT_FALSE(w.positive);
    EXPECT_EQ(w.atom, 1u);
    EXPECT_NEAR(w.value, -3.0, 1e-12);
    const auto abs = pointwise_abs(ex.f);
    EXPECT_TRUE(detect_positive(abs, ex.nu).positive);
}

TEST(Positivity, BracketSeparatesNonzero) {
    const auto ex = instances::nine_vs_eleven();
    const auto sep = bracket_separation(ex.f, ex.nu);
    EXPECT_TRUE(sep.found);
    EXPECT_NEAR(std::abs(sep.value), 8.0, 1e-12); // top eigenvalue of f(0)
    const QuantumRandomVariable zero(ex.f.space(), 2, {ComplexOperator::zero(2), ComplexOperator::zero(2)});
    EXPECT_FALSE(bracket_separation(zero, ex.nu).found);
}
