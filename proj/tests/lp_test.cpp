#include <gtest/gtest.h>

#include "qrv/lp.hpp"

using namespace qrv;

TEST(Lp, TextbookOptimum) {
    // max x + y s.t. x + 2y <= 4, 3x + y <= 6: optimum (8/5, 6/5), value 14/5.
    LpBuilder lp;
    const auto x = lp.add_var(LpBuilder::Var::NonNeg, -1.0);
    const auto y = lp.add_var(LpBuilder::Var::NonNeg, -1.0);
    lp.add_row({{x, 1}, {y, 2}}, LpBuilder::Row::Le, 4);
    lp.add_row({{x, 3}, {y, 1}}, LpBuilder::Row::Le, 6);
    const auto s = lp.minimize();
    ASSERT_EQ(s.status, LpStatus::Optimal);
    EXPECT_NEAR(s.x(x), 1.6, 1e-12);
    EXPECT_NEAR(s.x(y), 1.2, 1e-12);
    EXPECT_NEAR(s.objective, -2.8, 1e-12);
}

TEST(Lp, FreeVariablesAndEqualities) {
    // min |shift| style: x free, x = -3, cost x -> -3.
    LpBuilder lp;
    const auto x = lp.add_var(LpBuilder::Var::Free, 1.0);
    lp.add_row({{x, 1}}, LpBuilder::Row::Eq, -3);
    const auto s = lp.minimize();
    ASSERT_EQ(s.status, LpStatus::Optimal);
    EXPECT_NEAR(s.x(x), -3.0, 1e-12);
}

TEST(Lp, InfeasibleHasVerifiedFarkasVector) {
    // x1 + x2 = 1 and x1 + x2 = 2 cannot both hold.
    LpProblem p;
    p.A = Eigen::MatrixXd::Ones(2, 2);
    p.b = Eigen::Vector2d(1, 2);
    p.c = Eigen::Vector2d::Zero();
    const auto r = lp_solve(p);
    ASSERT_EQ(r.status, LpStatus::Infeasible);
    EXPECT_TRUE(verify_farkas(p, r.y));
    EXPECT_GT(p.b.dot(r.y), 1e-8);
    EXPECT_LE((p.A.transpose() * r.y).maxCoeff(), 1e-9);
}

TEST(Lp, UnboundedReportsRay) {
    LpBuilder lp;
    const auto x = lp.add_var(LpBuilder::Var::NonNeg, -1.0);
    lp.add_row({{x, 1}}, LpBuilder::Row::Ge, 1);
    EXPECT_EQ(lp.minimize().status, LpStatus::Unbounded);
}

TEST(Lp, OptimalDualSatisfiesComplementarity) {
    LpProblem p;
    p.A.resize(2, 4);
    p.A << 1, 2, 1, 0, 3, 1, 0, 1;
    p.b = Eigen::Vector2d(4, 6);
    p.c = Eigen::Vector4d(-1, -1, 0, 0);
    const auto r = lp_solve(p);
    ASSERT_EQ(r.status, LpStatus::Optimal);
    EXPECT_NEAR(p.b.dot(r.y), r.objective, 1e-12);
    EXPECT_LE(r.dual_residual, 1e-12);
}

// Regression: with linearly dependent equality rows phase one leaves
// artificial variables basic at zero; dropping the wrong original row used to
// return "optimal" points that violated the kept constraints.
TEST(Lp, RedundantRowsKeepPrimalFeasibility) {
    LpProblem p;
    p.A.resize(4, 4);
    p.A << 1, 1, 0, 0,  //
        0, 0, 1, 1,     //
        1, 0, 1, 0,     //
        0, 1, 0, 1;     // sum of rows 0 and 1 minus row 2
    p.b = Eigen::Vector4d(0.3, 0.7, 0.4, 0.6);
    p.c = Eigen::Vector4d(1, 2, 3, 4);
    const auto r = lp_solve(p);
    ASSERT_EQ(r.status, LpStatus::Optimal);
    EXPECT_LE((p.A * r.x - p.b).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE(r.primal_residual, 1e-12);
    // Optimum: x = (0, 0.3, 0.4, 0.3), cost 0.6 + 1.2 + 1.2 = 3.0.
    EXPECT_NEAR(r.objective, 3.0, 1e-12);
}

TEST(Lp, RejectsNonFinite) {
    LpProblem p;
    p.A = Eigen::MatrixXd::Ones(1, 1);
    p.b = Eigen::VectorXd::Constant(1, std::numeric_limits<double>::quiet_NaN());
    p.c = Eigen::VectorXd::Zero(1);
    EXPECT_THROW(lp_solve(p), Error);
}
