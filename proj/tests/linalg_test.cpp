#include <cmath>

#include <gtest/gtest.h>

#include "qrv/linalg.hpp"

using namespace qrv;

namespace {

const cplx I1(0.0, 1.0);

double max_diff(const CMatrix &a, const CMatrix &b) { return (a - b).cwiseAbs().maxCoeff(); }

} // namespace

TEST(Eigen, PauliYHasEigenvaluesPlusMinusOne) {
    const auto y = HermitianOperator::from(ComplexOperator({{0, -I1}, {I1, 0}}));
    const auto e = hermitian_eigen(y);
    ASSERT_EQ(e.values.size(), 2u);
    EXPECT_NEAR(e.values[0], 1.0, 1e-14);
    EXPECT_NEAR(e.values[1], -1.0, 1e-14);
    // Residual of each eigenpair.
    for (int k = 0; k < 2; ++k) {
        const CVector v = e.vectors.col(k);
        EXPECT_LT((y.matrix() * v - e.values[static_cast<std::size_t>(k)] * v).norm(), 1e-13);
    }
}

TEST(Eigen, ValuesDescendAndVectorsAreOrthonormal) {
    const auto h = HermitianOperator::from(ComplexOperator({{2, 1.0 + I1, 0}, {1.0 - I1, 3, -I1}, {0, I1, 1}}));
    const auto e = hermitian_eigen(h);
    EXPECT_GE(e.values[0], e.values[1]);
    EXPECT_GE(e.values[1], e.values[2]);
    EXPECT_NEAR(e.values[0] + e.values[1] + e.values[2], 6.0, 1e-13);
    EXPECT_LT(max_diff(e.vectors.adjoint() * e.vectors, CMatrix::Identity(3, 3)), 1e-13);
}

TEST(Norms, OperatorNormOfMatrixUnitIsOne) {
    EXPECT_NEAR(operator_norm(ComplexOperator({{0, 1}, {0, 0}})), 1.0, 1e-15);
    // [[1,1],[0,1]] has singular values golden-ratio based: sqrt((3 + sqrt 5) / 2).
    EXPECT_NEAR(operator_norm(ComplexOperator({{1, 1}, {0, 1}})), std::sqrt((3 + std::sqrt(5.0)) / 2), 1e-13);
}

TEST(Sqrt, OfTwoByTwoClosedForm) {
    // [[2,1],[1,2]] = U diag(3,1) U*, root = [[a,b],[b,a]] with a = (sqrt3+1)/2, b = (sqrt3-1)/2.
    const auto r = psd_sqrt(HermitianOperator::from(ComplexOperator({{2, 1}, {1, 2}})));
    const double a = (std::sqrt(3.0) + 1) / 2;
    const double b = (std::sqrt(3.0) - 1) / 2;
    EXPECT_LT(max_diff(r.matrix(), ComplexOperator({{a, b}, {b, a}}).matrix()), 1e-14);
}

TEST(Sqrt, RejectsIndefinite) {
    EXPECT_THROW(psd_sqrt(HermitianOperator::diagonal({1, -1})), Error);
}

TEST(Abs, OfNilpotentUnit) {
    // |e12| = (e21 e12)^(1/2) = e22.
    const auto a = abs_operator(ComplexOperator({{0, 1}, {0, 0}}));
    EXPECT_LT(max_diff(a.matrix(), ComplexOperator({{0, 0}, {0, 1}}).matrix()), 1e-15);
}

TEST(PositiveParts, SplitDiagonal) {
    const auto p = positive_parts(HermitianOperator::diagonal({3, -2, 0}));
    EXPECT_LT(max_diff(p.positive.matrix(), HermitianOperator::diagonal({3, 0, 0}).matrix()), 1e-15);
    EXPECT_LT(max_diff(p.negative.matrix(), HermitianOperator::diagonal({0, 2, 0}).matrix()), 1e-15);
}

TEST(Psd, TestUsesRelativeTolerance) {
    EXPECT_TRUE(is_psd(HermitianOperator::diagonal({1e6, -1e-6})));
    EXPECT_FALSE(is_psd(HermitianOperator::diagonal({1, -1e-6})));
}

TEST(Hermitian, FromRejectsNonHermitian) {
    try {
        (void)HermitianOperator::from(ComplexOperator({{0, 1}, {0, 0}}));
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotHermitian);
    }
}

TEST(Hermitian, RealAndImaginaryParts) {
    const ComplexOperator a({{1.0 + I1, 2}, {0, 3.0 * I1}});
    const auto re = HermitianOperator::real_part(a);
    const auto im = HermitianOperator::imag_part(a);
    EXPECT_LT(max_diff((re + I1 * im).matrix(), a.matrix()), 1e-15);
    EXPECT_LT(max_diff(re.matrix(), ComplexOperator({{1, 1}, {1, 0}}).matrix()), 1e-15);
}

TEST(State, RejectsWrongTraceAndNegative) {
    EXPECT_THROW(State(HermitianOperator::diagonal({0.5, 0.6})), Error);
    EXPECT_THROW(State(HermitianOperator::diagonal({1.5, -0.5})), Error);
    EXPECT_NO_THROW(State(HermitianOperator::diagonal({0.25, 0.75})));
    EXPECT_FALSE(State::pure(CVector::Unit(2, 0)).is_full_rank());
    EXPECT_TRUE(State::maximally_mixed(3).is_full_rank());
}

TEST(Coordinates, RoundTripAndPairing) {
    const auto h = HermitianOperator::from(ComplexOperator({{1, 2.0 - I1}, {2.0 + I1, -3}}));
    const auto c = hermitian_coords(h);
    ASSERT_EQ(c.size(), 4);
    EXPECT_LT(max_diff(hermitian_from_coords(c, 2).matrix(), h.matrix()), 1e-15);
    // tr(h k) = sum_c w_c h_c k_c.
    const auto k = HermitianOperator::from(ComplexOperator({{0, I1}, {-I1, 5}}));
    const double direct = (h.matrix() * k.matrix()).trace().real();
    EXPECT_NEAR(direct, hermitian_coord_weights(2).cwiseProduct(c).dot(hermitian_coords(k)), 1e-13);
}
