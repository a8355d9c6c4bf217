#include <gtest/gtest.h>

#include "qrv/instances.hpp"
#include "qrv/povm.hpp"

using namespace qrv;

namespace {

const cplx I1(0.0, 1.0);

double max_diff(const CMatrix &a, const CMatrix &b) { return (a - b).cwiseAbs().maxCoeff(); }

// Two atoms, nu(a) = diag(1/2, 1/4) + offdiag, nu(b) = I - nu(a).
Povm qubit_povm() {
    const auto s = FiniteMeasureSpace({"a", "b"}, {1.0, 1.0});
    const auto ea = HermitianOperator::from(ComplexOperator({{0.5, 0.1 * I1}, {-0.1 * I1, 0.25}}));
    return {s, 2, {ea, HermitianOperator::identity(2) - ea}};
}

} // namespace

TEST(Povm, RejectsNonPositiveEffect) {
    const auto s = FiniteMeasureSpace::uniform(2);
    try {
        Povm(s, 2, {HermitianOperator::diagonal({1, -1}), HermitianOperator::identity(2)});
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::MatrixNotPsd);
    }
}

TEST(Povm, QuantumProbability) {
    EXPECT_TRUE(qubit_povm().is_quantum_probability());
    EXPECT_FALSE(Povm::scalar(FiniteMeasureSpace::uniform(2), 2).is_quantum_probability());
}

TEST(Integrate, NineExample) {
    const auto ex = instances::nine_vs_eleven();
    const auto v = integrate(ex.f, ex.nu);
    EXPECT_LT(max_diff(v.matrix(), ComplexOperator({{7, 4}, {4, 1}}).matrix()), 1e-14);
    EXPECT_NEAR(operator_norm(v), 9.0, 1e-13);
}

TEST(Integrate, IndicatorTimesIdentityGivesTotalEffect) {
    const auto nu = qubit_povm();
    const auto one = QuantumRandomVariable::constant(nu.space(), ComplexOperator::identity(2));
    EXPECT_LT(max_diff(integrate(one, nu).matrix(), nu.total().matrix()), 1e-14);
}

TEST(Integrate, ThroughDensityMatchesDirect) {
    const auto nu = qubit_povm();
    const QuantumRandomVariable f(nu.space(), 2,
                                  {ComplexOperator({{1, 2.0 * I1}, {3, -1}}), ComplexOperator({{0, 1}, {I1, 2}})});
    const State rho(HermitianOperator::from(ComplexOperator({{0.7, 0.1}, {0.1, 0.3}})));
    EXPECT_LT(max_diff(integrate(f, nu, rho).matrix(), integrate(f, nu).matrix()), 1e-13);
}

TEST(Rn, DensityIsEffectOverInducedMass) {
    const auto nu = qubit_povm();
    const State rho(HermitianOperator::diagonal({0.5, 0.5}));
    const auto d = rn_derivative(nu, rho);
    // tr(rho nu(a)) = (0.5 + 0.25) / 2.
    EXPECT_NEAR(d.induced()[0], 0.375, 1e-15);
    EXPECT_NEAR(d.induced()[1], 0.625, 1e-15);
    EXPECT_LT(max_diff(d[0].matrix(), (nu.effect(0).matrix() / 0.375)), 1e-14);
    EXPECT_TRUE(d.invertible());
}

TEST(Rn, NeedsFullRankState) {
    try {
        rn_derivative(qubit_povm(), State::pure(CVector::Unit(2, 0)));
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::FullRankRequired);
    }
}

TEST(Scalarize, IntegratesToTracePairing) {
    const auto nu = qubit_povm();
    const QuantumRandomVariable f(nu.space(), 2, {ComplexOperator({{1, I1}, {0, 2}}), ComplexOperator({{-1, 0}, {4, 1}})});
    const State rho(HermitianOperator::diagonal({0.6, 0.4}));
    const State s(HermitianOperator::from(ComplexOperator({{0.3, 0.2}, {0.2, 0.7}})));
    const auto fs = scalarize(f, nu, rho, s);
    const auto d = rn_derivative(nu, rho);
    cplx lhs = 0.0;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        lhs += fs[i] * d.induced()[i];
    }
    const cplx rhs = (s.op().matrix() * integrate(f, nu).matrix()).trace();
    EXPECT_LT(std::abs(lhs - rhs), 1e-13);
}

TEST(Qrv, DimensionAndSpaceChecks) {
    const auto nu = qubit_povm();
    const QuantumRandomVariable f3(nu.space(), 3, {ComplexOperator::identity(3), ComplexOperator::identity(3)});
    EXPECT_THROW(integrate(f3, nu), Error);
    const auto other = FiniteMeasureSpace::uniform(2);
    const QuantumRandomVariable g(other, 2, {ComplexOperator::identity(2), ComplexOperator::identity(2)});
    EXPECT_THROW(integrate(g, nu), Error);
}

TEST(Norms, SupNormIgnoresNullAtoms) {
    const auto s = FiniteMeasureSpace::uniform(2);
    const Povm nu(s, 1, {HermitianOperator::diagonal({1}), HermitianOperator::diagonal({0})});
    const QuantumRandomVariable f(s, 1, {ComplexOperator({{2}}), ComplexOperator({{100}})});
    EXPECT_NEAR(linf_norm(f, nu), 2.0, 1e-15);
}
