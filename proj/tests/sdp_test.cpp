#include <gtest/gtest.h>

#include "qrv/sdp.hpp"

using namespace qrv;

// max -t s.t. t I - A >= 0 has value -lambda_max(A).
TEST(Sdp, LargestEigenvalueOfDiagonal) {
    SdpProblem p;
    CMatrix a = CMatrix::Zero(3, 3);
    a.diagonal() << 2.0, 5.0, -1.0;
    p.add_block(-a);
    p.A.push_back({SdpTerm{0, -CMatrix::Identity(3, 3)}});
    p.b = Eigen::VectorXd::Constant(1, -1.0);
    const auto r = sdp_solve(p);
    ASSERT_TRUE(r.converged);
    EXPECT_NEAR(r.y(0), 5.0, 1e-8);
    // Primal X is the projector on the top eigenvector.
    EXPECT_NEAR(r.X[0](1, 1).real(), 1.0, 1e-6);
}

TEST(Sdp, ComplexHermitianData) {
    // [[0, i],[-i, 0]] has top eigenvalue 1.
    SdpProblem p;
    CMatrix a(2, 2);
    a << 0.0, cplx(0, 1), cplx(0, -1), 0.0;
    p.add_block(-a);
    p.A.push_back({SdpTerm{0, -CMatrix::Identity(2, 2)}});
    p.b = Eigen::VectorXd::Constant(1, -1.0);
    const auto r = sdp_solve(p);
    ASSERT_TRUE(r.converged);
    EXPECT_NEAR(r.y(0), 1.0, 1e-8);
}

TEST(Sdp, TwoBlocks) {
    // max y s.t. 1 - y >= 0 (1x1) and [[2 - y, 0],[0, 3]] >= 0: y = 1.
    SdpProblem p;
    p.add_block(CMatrix::Identity(1, 1));
    CMatrix c2 = CMatrix::Zero(2, 2);
    c2.diagonal() << 2.0, 3.0;
    p.add_block(c2);
    CMatrix e11 = CMatrix::Zero(2, 2);
    e11(0, 0) = 1.0;
    p.A.push_back({SdpTerm{0, CMatrix::Identity(1, 1)}, SdpTerm{1, e11}});
    p.b = Eigen::VectorXd::Constant(1, 1.0);
    const auto r = sdp_solve(p);
    ASSERT_TRUE(r.converged);
    EXPECT_NEAR(r.y(0), 1.0, 1e-8);
}

TEST(Sdp, RejectsInconsistentShapes) {
    SdpProblem p;
    p.add_block(CMatrix::Identity(1, 1));
    p.A.push_back({});
    EXPECT_THROW(sdp_solve(p), Error);
}
