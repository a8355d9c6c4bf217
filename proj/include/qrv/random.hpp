#pragma once

// Seeded generators for test instances. All draws go through one
// std::mt19937_64 so a seed fixes the whole stream.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "qrv/linalg.hpp"
#include "qrv/measure.hpp"
#include "qrv/povm.hpp"

namespace qrv {

class Rng {
  public:
    explicit Rng(std::uint64_t seed = 42) : engine_(seed) {}

    double normal() { return normal_(engine_); }
    double uniform(double lo = 0.0, double hi = 1.0) {
        return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
    }
    std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }
    std::uint64_t next() { return engine_(); }

    CMatrix complex_gaussian(Eigen::Index rows, Eigen::Index cols) {
        CMatrix m(rows, cols);
        for (Eigen::Index j = 0; j < cols; ++j) {
            for (Eigen::Index i = 0; i < rows; ++i) {
                const double re = normal();
                m(i, j) = cplx(re, normal());
            }
        }
        return m;
    }

    ComplexOperator complex_operator(Eigen::Index d) { return ComplexOperator(complex_gaussian(d, d)); }

    /// GUE-like: (G + G*)/2.
    HermitianOperator hermitian(Eigen::Index d) { return HermitianOperator::real_part(complex_operator(d)); }

    HermitianOperator psd(Eigen::Index d) {
        const CMatrix g = complex_gaussian(d, d);
        return HermitianOperator::unchecked(g * g.adjoint());
    }

    /// Haar-random pure state.
    State pure_state(Eigen::Index d) { return State::pure(complex_gaussian(d, 1).col(0)); }

    /// Hilbert-Schmidt random mixed state (full rank almost surely).
    State mixed_state(Eigen::Index d) { return State::normalized(psd(d)); }

    /// Mixed state with smallest eigenvalue bounded away from zero.
    State full_rank_state(Eigen::Index d) {
        return State::normalized(psd(d) + 0.1 * static_cast<double>(d) * HermitianOperator::identity(d));
    }

    std::vector<std::size_t> permutation(std::size_t m) {
        std::vector<std::size_t> p(m);
        std::iota(p.begin(), p.end(), 0);
        for (std::size_t i = m; i > 1; --i) {
            std::swap(p[i - 1], p[index(i)]);
        }
        return p;
    }

    /// Random convex combination of `terms` permutation matrices.
    Eigen::MatrixXd doubly_stochastic(std::size_t m, std::size_t terms) {
        Eigen::VectorXd w(static_cast<Eigen::Index>(terms));
        for (Eigen::Index k = 0; k < w.size(); ++k) {
            w(k) = uniform(0.05, 1.0);
        }
        w /= w.sum();
        const auto mm = static_cast<Eigen::Index>(m);
        Eigen::MatrixXd b = Eigen::MatrixXd::Zero(mm, mm);
        for (Eigen::Index k = 0; k < w.size(); ++k) {
            const auto p = permutation(m);
            for (Eigen::Index i = 0; i < mm; ++i) {
                b(i, static_cast<Eigen::Index>(p[static_cast<std::size_t>(i)])) += w(k);
            }
        }
        return b;
    }

    /// B = diag(mu)^-1 pi for a random coupling pi with both marginals mu (Sinkhorn scaling).
    BistochasticMatrix bistochastic(const FiniteMeasureSpace &space) {
        const auto m = static_cast<Eigen::Index>(space.size());
        Eigen::VectorXd mu(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            mu(i) = space.mass(static_cast<std::size_t>(i));
        }
        Eigen::MatrixXd pi(m, m);
        for (Eigen::Index j = 0; j < m; ++j) {
            for (Eigen::Index i = 0; i < m; ++i) {
                const double u = uniform();
                pi(i, j) = u * u * u + 1e-3;
            }
        }
        for (int it = 0; it < 5000; ++it) {
            pi = (mu.cwiseQuotient(pi.rowwise().sum())).asDiagonal() * pi;
            pi = pi * (mu.cwiseQuotient(pi.colwise().sum().transpose())).asDiagonal();
            if ((pi.rowwise().sum() - mu).cwiseAbs().maxCoeff() < 1e-15 * mu.maxCoeff()) {
                break;
            }
        }
        Eigen::MatrixXd b = mu.cwiseInverse().asDiagonal() * pi;
        // Fold the last row-sum rounding into the diagonal.
        for (Eigen::Index i = 0; i < m; ++i) {
            b(i, i) += 1.0 - b.row(i).sum();
        }
        return {space, b};
    }

    std::vector<double> masses(std::size_t m) {
        std::vector<double> out;
        for (std::size_t i = 0; i < m; ++i) {
            out.push_back(uniform(0.2, 1.5));
        }
        return out;
    }

    QuantumRandomVariable qrv(const FiniteMeasureSpace &space, Eigen::Index d) {
        std::vector<ComplexOperator> v;
        for (std::size_t i = 0; i < space.size(); ++i) {
            v.push_back(complex_operator(d));
        }
        return {space, d, v};
    }

    QuantumRandomVariable hermitian_qrv(const FiniteMeasureSpace &space, Eigen::Index d) {
        std::vector<ComplexOperator> v;
        for (std::size_t i = 0; i < space.size(); ++i) {
            v.push_back(hermitian(d));
        }
        return {space, d, v};
    }

    ClassicalFunction real_function(const FiniteMeasureSpace &space, double scale = 1.0) {
        std::vector<double> v;
        for (std::size_t i = 0; i < space.size(); ++i) {
            v.push_back(scale * normal());
        }
        return ClassicalFunction::real(space, v);
    }

    /// Small-integer real function; ties make majorization boundary cases frequent.
    ClassicalFunction integer_function(const FiniteMeasureSpace &space, int lo, int hi) {
        std::vector<double> v;
        for (std::size_t i = 0; i < space.size(); ++i) {
            v.push_back(static_cast<double>(lo + static_cast<int>(index(static_cast<std::size_t>(hi - lo + 1)))));
        }
        return ClassicalFunction::real(space, v);
    }

    /// POVM with full-rank random effects.
    Povm povm(const FiniteMeasureSpace &space, Eigen::Index d) {
        std::vector<HermitianOperator> effects;
        for (std::size_t i = 0; i < space.size(); ++i) {
            effects.push_back(space.mass(i) *
                              (psd(d) + 0.2 * HermitianOperator::identity(d)));
        }
        return {space, d, effects};
    }

  private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace qrv
