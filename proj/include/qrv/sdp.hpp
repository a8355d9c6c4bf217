#pragma once

// Small dense semidefinite programs over block-diagonal Hermitian matrices.
//
//   primal:  minimize  tr(C X)   s.t.  tr(A_i X) = b_i,  X >= 0
//   dual:    maximize  b^T y     s.t.  Z = C - sum_i y_i A_i >= 0
//
// Infeasible-start primal-dual path following with the HKM search direction
// and a Mehrotra predictor-corrector step. The solver reports raw iterates and
// residuals; callers assemble and re-verify their own certificates.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "qrv/linalg.hpp"

namespace qrv {

struct SdpTerm {
    int block = 0;
    CMatrix mat; // Hermitian
};

struct SdpProblem {
    std::vector<Eigen::Index> block_dims;
    std::vector<CMatrix> C;                  // one Hermitian matrix per block
    std::vector<std::vector<SdpTerm>> A;     // per variable, sparse over blocks
    Eigen::VectorXd b;

    [[nodiscard]] Eigen::Index num_vars() const { return static_cast<Eigen::Index>(A.size()); }

    /// Adds a block and returns its index.
    int add_block(CMatrix c) {
        block_dims.push_back(c.rows());
        C.push_back(std::move(c));
        return static_cast<int>(C.size()) - 1;
    }
};

struct SdpOptions {
    double tol = 1e-10;
    int max_iterations = 120;
    double step_fraction = 0.97;
};

struct SdpResult {
    bool converged = false;
    int iterations = 0;
    Eigen::VectorXd y;
    std::vector<CMatrix> X;
    std::vector<CMatrix> Z;
    double primal_objective = 0.0; // tr(C X)
    double dual_objective = 0.0;   // b^T y
    double primal_infeasibility = 0.0;
    double dual_infeasibility = 0.0;
};

namespace detail {

inline CMatrix herm(const CMatrix &m) { return 0.5 * (m + m.adjoint()); }

inline double re_trace_product(const CMatrix &a, const CMatrix &b) {
    // Re tr(A B) without forming the product.
    return (a.transpose().cwiseProduct(b)).sum().real();
}

// Largest alpha such that X + alpha dX stays PSD (infinity if unrestricted).
inline double max_step(const CMatrix &x, const CMatrix &dx) {
    Eigen::LLT<CMatrix> llt(x);
    if (llt.info() != Eigen::Success) {
        return 0.0;
    }
    const CMatrix linv = llt.matrixL().solve(CMatrix::Identity(x.rows(), x.cols()));
    const CMatrix s = herm(linv * dx * linv.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(s, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    return lmin >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
}

} // namespace detail

inline SdpResult sdp_solve(const SdpProblem &p, const SdpOptions &opt = {},
                           const std::optional<Eigen::VectorXd> &y_start = std::nullopt) {
    using detail::herm;
    using detail::re_trace_product;
    const auto nb = p.C.size();
    const Eigen::Index nv = p.num_vars();
    if (p.b.size() != nv || p.block_dims.size() != nb) {
        throw Error(ErrorKind::DimMismatch, "SDP problem dimensions are inconsistent");
    }

    Eigen::Index total_dim = 0;
    double cnorm = 0.0;
    for (std::size_t k = 0; k < nb; ++k) {
        total_dim += p.block_dims[k];
        cnorm = std::max(cnorm, p.C[k].cwiseAbs().maxCoeff());
    }
    double anorm = 1.0;
    for (const auto &terms : p.A) {
        for (const auto &t : terms) {
            anorm = std::max(anorm, t.mat.cwiseAbs().maxCoeff());
        }
    }
    const double bnorm = p.b.size() ? p.b.cwiseAbs().maxCoeff() : 0.0;

    auto apply_dual = [&](const Eigen::VectorXd &y) {
        std::vector<CMatrix> z = p.C;
        for (Eigen::Index i = 0; i < nv; ++i) {
            for (const auto &t : p.A[static_cast<std::size_t>(i)]) {
                z[static_cast<std::size_t>(t.block)] -= y(i) * t.mat;
            }
        }
        return z;
    };
    auto apply_primal = [&](const std::vector<CMatrix> &x) {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(nv);
        for (Eigen::Index i = 0; i < nv; ++i) {
            for (const auto &t : p.A[static_cast<std::size_t>(i)]) {
                out(i) += re_trace_product(t.mat, x[static_cast<std::size_t>(t.block)]);
            }
        }
        return out;
    };

    SdpResult res;
    const double gamma = 10.0 * std::max({1.0, cnorm, bnorm * anorm});
    res.y = Eigen::VectorXd::Zero(nv);
    res.X.resize(nb);
    res.Z.resize(nb);
    for (std::size_t k = 0; k < nb; ++k) {
        res.X[k] = gamma * CMatrix::Identity(p.block_dims[k], p.block_dims[k]);
        res.Z[k] = gamma * CMatrix::Identity(p.block_dims[k], p.block_dims[k]);
    }
    if (y_start && y_start->size() == nv) {
        auto z = apply_dual(*y_start);
        bool pd = true;
        for (auto &zk : z) {
            zk = herm(zk);
            if (Eigen::LLT<CMatrix>(zk).info() != Eigen::Success) {
                pd = false;
            }
        }
        if (pd) {
            res.y = *y_start;
            res.Z = z;
        }
    }

    // Near the optimum rounding can push the primal residual back up; keep the best iterate seen.
    SdpResult best;
    double best_score = std::numeric_limits<double>::infinity();
    auto finish = [&]() {
        if (!res.converged && best_score < std::numeric_limits<double>::infinity()) {
            best.iterations = res.iterations;
            res = std::move(best);
        }
        return res;
    };

    for (res.iterations = 0; res.iterations < opt.max_iterations; ++res.iterations) {
        double xz = 0.0;
        double pobj = 0.0;
        for (std::size_t k = 0; k < nb; ++k) {
            xz += re_trace_product(res.X[k], res.Z[k]);
            pobj += re_trace_product(p.C[k], res.X[k]);
        }
        const double mu = xz / static_cast<double>(std::max<Eigen::Index>(total_dim, 1));
        const double dobj = p.b.dot(res.y);
        const Eigen::VectorXd rp = p.b - apply_primal(res.X);
        std::vector<CMatrix> rd = apply_dual(res.y);
        double rd_norm = 0.0;
        for (std::size_t k = 0; k < nb; ++k) {
            rd[k] = herm(rd[k] - res.Z[k]);
            rd_norm = std::max(rd_norm, rd[k].cwiseAbs().maxCoeff());
        }
        res.primal_objective = pobj;
        res.dual_objective = dobj;
        res.primal_infeasibility = (rp.size() ? rp.cwiseAbs().maxCoeff() : 0.0) / (1.0 + bnorm);
        res.dual_infeasibility = rd_norm / (1.0 + cnorm);
        const double rel_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
        if (rel_gap < opt.tol && res.primal_infeasibility < opt.tol &&
            res.dual_infeasibility < opt.tol) {
            res.converged = true;
            break;
        }
        if (const double score = std::max({rel_gap, res.primal_infeasibility, res.dual_infeasibility});
            score < best_score) {
            best_score = score;
            best = res;
        }

        // Schur complement M_ij = Re tr(A_i X A_j Z^-1).
        std::vector<CMatrix> zinv(nb);
        bool ok = true;
        for (std::size_t k = 0; k < nb; ++k) {
            Eigen::LLT<CMatrix> llt(res.Z[k]);
            if (llt.info() != Eigen::Success) {
                ok = false;
                break;
            }
            zinv[k] = herm(llt.solve(CMatrix::Identity(res.Z[k].rows(), res.Z[k].cols())));
        }
        if (!ok) {
            break;
        }
        std::vector<std::vector<std::pair<Eigen::Index, const CMatrix *>>> touch(nb);
        for (Eigen::Index i = 0; i < nv; ++i) {
            for (const auto &t : p.A[static_cast<std::size_t>(i)]) {
                touch[static_cast<std::size_t>(t.block)].emplace_back(i, &t.mat);
            }
        }
        Eigen::MatrixXd schur = Eigen::MatrixXd::Zero(nv, nv);
        for (std::size_t k = 0; k < nb; ++k) {
            const auto &list = touch[k];
            for (std::size_t a = 0; a < list.size(); ++a) {
                const CMatrix g = res.X[k] * (*list[a].second) * zinv[k];
                for (std::size_t c = a; c < list.size(); ++c) {
                    const double v = re_trace_product(*list[c].second, g);
                    schur(list[a].first, list[c].first) += v;
                    if (c != a) {
                        schur(list[c].first, list[a].first) += v;
                    }
                }
            }
        }
        const double reg = 1e-14 * (1.0 + schur.diagonal().cwiseAbs().maxCoeff());
        schur.diagonal().array() += reg;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(schur);
        if (ldlt.info() != Eigen::Success) {
            break;
        }

        // Direction for complementarity target sigma*mu, optional second-order term.
        auto direction = [&](double sigma_mu, const std::vector<CMatrix> *corr,
                             Eigen::VectorXd &dy, std::vector<CMatrix> &dx,
                             std::vector<CMatrix> &dz) {
            std::vector<CMatrix> base(nb);
            for (std::size_t k = 0; k < nb; ++k) {
                base[k] = sigma_mu * zinv[k] - res.X[k] - res.X[k] * rd[k] * zinv[k];
                if (corr) {
                    base[k] -= (*corr)[k] * zinv[k];
                }
            }
            dy = ldlt.solve(rp - apply_primal(base));
            dz = rd;
            for (Eigen::Index i = 0; i < nv; ++i) {
                for (const auto &t : p.A[static_cast<std::size_t>(i)]) {
                    dz[static_cast<std::size_t>(t.block)] -= dy(i) * t.mat;
                }
            }
            dx.resize(nb);
            for (std::size_t k = 0; k < nb; ++k) {
                dz[k] = herm(dz[k]);
                CMatrix t = sigma_mu * zinv[k] - res.X[k] - res.X[k] * dz[k] * zinv[k];
                if (corr) {
                    t -= (*corr)[k] * zinv[k];
                }
                dx[k] = herm(t);
            }
        };
        auto step_lengths = [&](const std::vector<CMatrix> &dx, const std::vector<CMatrix> &dz,
                                double &ap, double &ad) {
            ap = 1.0;
            ad = 1.0;
            for (std::size_t k = 0; k < nb; ++k) {
                ap = std::min(ap, opt.step_fraction * detail::max_step(res.X[k], dx[k]));
                ad = std::min(ad, opt.step_fraction * detail::max_step(res.Z[k], dz[k]));
            }
        };

        Eigen::VectorXd dy;
        std::vector<CMatrix> dx;
        std::vector<CMatrix> dz;
        direction(0.0, nullptr, dy, dx, dz);
        double ap = 0.0;
        double ad = 0.0;
        step_lengths(dx, dz, ap, ad);
        double xz_aff = 0.0;
        for (std::size_t k = 0; k < nb; ++k) {
            xz_aff += re_trace_product(res.X[k] + ap * dx[k], res.Z[k] + ad * dz[k]);
        }
        const double mu_aff = xz_aff / static_cast<double>(std::max<Eigen::Index>(total_dim, 1));
        const double sigma = std::clamp(std::pow(mu_aff / std::max(mu, 1e-300), 3.0), 0.0, 1.0);
        std::vector<CMatrix> corr(nb);
        for (std::size_t k = 0; k < nb; ++k) {
            corr[k] = dx[k] * dz[k];
        }
        direction(sigma * mu, &corr, dy, dx, dz);
        step_lengths(dx, dz, ap, ad);

        for (std::size_t k = 0; k < nb; ++k) {
            res.X[k] = herm(res.X[k] + ap * dx[k]);
            res.Z[k] = herm(res.Z[k] + ad * dz[k]);
        }
        res.y += ad * dy;
    }
    return finish();
}

} // namespace qrv
