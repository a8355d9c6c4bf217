#pragma once

// Worked instances: small closed-form examples and finite truncations of
// infinite families.

#include <cmath>
#include <string>
#include <vector>

#include "qrv/linalg.hpp"
#include "qrv/measure.hpp"
#include "qrv/povm.hpp"

namespace qrv::instances {

struct PovmInstance {
    Povm nu;
    QuantumRandomVariable f;
};

struct PairInstance {
    QuantumRandomVariable f;
    QuantumRandomVariable g;
};

/// Two atoms of mass 1, nu = I_2 at each, f(0) = [[4,4],[4,4]], f(1) = diag(3,-3).
inline PovmInstance nine_vs_eleven() {
    const auto space = FiniteMeasureSpace::uniform(2, 1.0);
    return {Povm::scalar(space, 2),
            QuantumRandomVariable(space, 2, {ComplexOperator({{4, 4}, {4, 4}}), ComplexOperator({{3, 0}, {0, -3}})})};
}

/// Explicit decomposition of f(1) = f1(1) - f2(1) with value 9.
inline std::vector<HermitianOperator> nine_vs_eleven_reference_parts() {
    return {HermitianOperator::from(ComplexOperator({{4, -2}, {-2, 1}})),
            HermitianOperator::from(ComplexOperator({{1, -2}, {-2, 4}}))};
}

/// A = e11, B = e12.
inline std::pair<ComplexOperator, ComplexOperator> triangle_pair() {
    return {ComplexOperator({{1, 0}, {0, 0}}), ComplexOperator({{0, 1}, {0, 0}})};
}

/// Atoms i = 1..k of mass 2^-i, nu = mu I_k, f(i) = 2^i e_ii.
inline PovmInstance dyadic_truncation(int k) {
    std::vector<double> masses;
    std::vector<ComplexOperator> values;
    for (int i = 1; i <= k; ++i) {
        masses.push_back(std::ldexp(1.0, -i));
        CMatrix v = CMatrix::Zero(k, k);
        v(i - 1, i - 1) = std::ldexp(1.0, i);
        values.emplace_back(v);
    }
    const auto space = FiniteMeasureSpace::indexed(masses);
    return {Povm::scalar(space, k), QuantumRandomVariable(space, k, values)};
}

/// Atoms i = 1..k of mass 2^-i, nu(i) = diag(2^-i, 2^-i/2), f(i) = 2^(i/2) e11.
inline PovmInstance swap_truncation(int k) {
    std::vector<double> masses;
    std::vector<HermitianOperator> effects;
    std::vector<ComplexOperator> values;
    for (int i = 1; i <= k; ++i) {
        const double w = std::ldexp(1.0, -i);
        masses.push_back(w);
        effects.push_back(HermitianOperator::diagonal({w, std::sqrt(w)}));
        values.push_back(ComplexOperator(std::pow(2.0, 0.5 * i) * CMatrix(Eigen::Vector2cd(1.0, 0.0).asDiagonal())));
    }
    const auto space = FiniteMeasureSpace::indexed(masses);
    return {Povm(space, 2, effects), QuantumRandomVariable(space, 2, values)};
}

inline ComplexOperator swap_unitary() { return ComplexOperator({{0, 1}, {1, 0}}); }

inline QuantumRandomVariable diagonal_qrv(const FiniteMeasureSpace &space,
                                          const std::vector<std::vector<double>> &diags) {
    std::vector<ComplexOperator> v;
    for (const auto &d : diags) {
        v.push_back(HermitianOperator::diagonal(d));
    }
    const Eigen::Index dim = diags.empty() ? 0 : static_cast<Eigen::Index>(diags.front().size());
    return {space, dim, v};
}

/// Two atoms of mass 1/2.
inline PairInstance joe_verducci() {
    const auto space = FiniteMeasureSpace::uniform(2, 0.5);
    return {diagonal_qrv(space, {{1, 4}, {3, 2}}), diagonal_qrv(space, {{1, 2}, {3, 4}})};
}

/// Four atoms of mass 1/4.
inline PairInstance malamud() {
    const auto space = FiniteMeasureSpace::uniform(4, 0.25);
    return {diagonal_qrv(space, {{12, 12}, {12, 12}, {5, 3}, {3, 5}}),
            diagonal_qrv(space, {{8, 16}, {16, 8}, {0, 0}, {8, 8}})};
}

} // namespace qrv::instances
