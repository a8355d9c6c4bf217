#include <gtest/gtest.h>

#include "qrv/property_suite.hpp"

using namespace qrv;

TEST(Suite, SmallRunHasNoViolations) {
    suite::Options opt;
    opt.trials = 8;
    const auto r = suite::run(opt);
    EXPECT_EQ(r.violations(), 0u) << suite::format(r);
    EXPECT_GT(r.tallies.size(), 20u);
}

TEST(Suite, SeedsDeriveIndependently) {
    EXPECT_NE(suite::derive_seed(42, 0), suite::derive_seed(42, 1));
    EXPECT_EQ(suite::derive_seed(42, 5), suite::derive_seed(42, 5));
}

TEST(Suite, ZeroTrialsIsEmpty) {
    suite::Options opt;
    opt.trials = 0;
    const auto r = suite::run(opt);
    EXPECT_EQ(r.violations(), 0u);
    for (const auto &t : r.tallies) {
        EXPECT_EQ(t.checks, 0u);
    }
}

TEST(Random, BistochasticSamplerMeetsConstraints) {
    Rng rng(3);
    const auto space = FiniteMeasureSpace::indexed(rng.masses(6));
    const auto b = rng.bistochastic(space);
    EXPECT_LT(b.defect(), 1e-12);
    EXPECT_GT(b.matrix().minCoeff(), 0.0);
}
