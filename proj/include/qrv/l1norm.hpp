#pragma once

// The L1 seminorm of an operator-valued function, its certificates, the
// scalar bracket <f, g I> and the multiplier operations.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "qrv/error.hpp"
#include "qrv/linalg.hpp"
#include "qrv/measure.hpp"
#include "qrv/povm.hpp"
#include "qrv/sdp.hpp"

namespace qrv {

struct L1Certificate {
    double value = 0.0;            // ||int (f1+f2+f3+f4) dnu||
    double dual_lower_bound = 0.0; // sum_x tr(W R) + tr(V J)
    double gap = 0.0;
    bool converged = false;
    int iterations = 0;
    std::vector<HermitianOperator> f1, f2, f3, f4;
    HermitianOperator state;            // s
    std::vector<HermitianOperator> W;   // -K s K <= W <= K s K
    std::vector<HermitianOperator> V;
};

struct L1Options {
    double tol = 1e-6; // relative gap target
    int max_iterations = 150;
};

namespace detail {

inline std::vector<HermitianOperator> effect_roots(const Povm &nu) {
    std::vector<HermitianOperator> k;
    for (const auto &e : nu.effects()) {
        k.push_back(psd_sqrt(e));
    }
    return k;
}

inline CMatrix integral_sum(const std::vector<HermitianOperator> &k, const std::vector<HermitianOperator> &h,
                            const Povm &nu) {
    CMatrix acc = CMatrix::Zero(nu.dim(), nu.dim());
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (!nu.is_null(i)) {
            acc += k[i].matrix() * h[i].matrix() * k[i].matrix();
        }
    }
    return acc;
}

inline double lambda_max_sum(const std::vector<HermitianOperator> &k, const std::vector<HermitianOperator> &h,
                             const Povm &nu) {
    return lambda_max(HermitianOperator::unchecked(integral_sum(k, h, nu)));
}

// Maximizer of tr(W h) over -S <= W <= S: W = S^1/2 sign(S^1/2 h S^1/2) S^1/2.
inline HermitianOperator best_witness(const HermitianOperator &h, const HermitianOperator &s) {
    const HermitianOperator root = psd_sqrt(s);
    const auto e = hermitian_eigen(h.congruence(root));
    const HermitianOperator sign = spectral_map(e, [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
    return sign.congruence(root);
}

// Dual-form SDP for the splitting; returns p, q and the state block.
inline std::tuple<std::vector<HermitianOperator>, std::vector<HermitianOperator>, HermitianOperator>
l1_sdp(const std::vector<HermitianOperator> &re, const std::vector<HermitianOperator> &im,
       const std::vector<HermitianOperator> &k, const Povm &nu, const L1Options &opt, int &iterations) {
    const Eigen::Index d = nu.dim();
    const std::size_t m = re.size();
    const auto basis = hermitian_basis(d);
    const Eigen::Index nc = hermitian_coord_count(d);

    SdpProblem sdp;
    CMatrix c0 = CMatrix::Zero(d, d);
    for (std::size_t i = 0; i < m; ++i) {
        if (!nu.is_null(i)) {
            c0 -= k[i].matrix() * (re[i] + im[i]).matrix() * k[i].matrix();
        }
    }
    sdp.add_block(c0);
    sdp.A.push_back({SdpTerm{0, -CMatrix::Identity(d, d)}});

    // Per atom and part (0 = real, 1 = imaginary): first variable index and the two blocks.
    struct Part {
        std::size_t atom;
        int which;
        Eigen::Index first_var;
        int lower_block;
        int shifted_block;
    };
    std::vector<Part> parts;
    std::vector<double> y0;
    y0.push_back(0.0);
    for (std::size_t i = 0; i < m; ++i) {
        if (nu.is_null(i)) {
            continue;
        }
        for (int which = 0; which < 2; ++which) {
            const HermitianOperator &h = which == 0 ? re[i] : im[i];
            if (h.matrix().cwiseAbs().maxCoeff() == 0.0) {
                continue;
            }
            Part part{i, which, sdp.num_vars(), 0, 0};
            part.lower_block = sdp.add_block(CMatrix::Zero(d, d));
            part.shifted_block = sdp.add_block(h.matrix());
            for (Eigen::Index c = 0; c < nc; ++c) {
                const CMatrix &e = basis[static_cast<std::size_t>(c)].matrix();
                sdp.A.push_back({SdpTerm{0, 2.0 * k[i].matrix() * e * k[i].matrix()},
                                 SdpTerm{part.lower_block, -e}, SdpTerm{part.shifted_block, -e}});
            }
            // Strictly feasible start: p = h_- + I.
            const auto start = hermitian_coords(positive_parts(h).negative + HermitianOperator::identity(d));
            for (Eigen::Index c = 0; c < nc; ++c) {
                y0.push_back(start(c));
            }
            parts.push_back(part);
        }
    }
    sdp.b = Eigen::VectorXd::Zero(sdp.num_vars());
    sdp.b(0) = -1.0;

    auto decode = [&](const Eigen::VectorXd &y) {
        std::vector<HermitianOperator> p(m, HermitianOperator::zero(d));
        std::vector<HermitianOperator> q(m, HermitianOperator::zero(d));
        for (const auto &part : parts) {
            const auto h = hermitian_from_coords(y.segment(part.first_var, nc), d);
            (part.which == 0 ? p : q)[part.atom] = h;
        }
        return std::make_pair(p, q);
    };

    Eigen::VectorXd ystart = Eigen::Map<Eigen::VectorXd>(y0.data(), static_cast<Eigen::Index>(y0.size()));
    {
        auto [p, q] = decode(ystart);
        std::vector<HermitianOperator> sum;
        for (std::size_t i = 0; i < m; ++i) {
            sum.push_back(re[i] + im[i] + 2.0 * p[i] + 2.0 * q[i]);
        }
        ystart(0) = detail::lambda_max_sum(k, sum, nu) + 1.0;
    }

    SdpOptions sopt;
    sopt.tol = std::min(1e-9, opt.tol * 1e-2);
    sopt.max_iterations = opt.max_iterations;
    const auto res = sdp_solve(sdp, sopt, ystart);
    iterations = res.iterations;
    auto [p, q] = decode(res.y);
    return {p, q, HermitianOperator::unchecked(res.X[0])};
}

} // namespace detail

/// Minimal decomposition f = f1 - f2 + i(f3 - f4), f_k >= 0, as a block SDP.
inline L1Certificate l1_seminorm(const QuantumRandomVariable &f, const Povm &nu, const L1Options &opt = {}) {
    require_compatible(f, nu);
    const Eigen::Index d = f.dim();
    const std::size_t m = f.size();
    const auto k = detail::effect_roots(nu);

    std::vector<HermitianOperator> re;
    std::vector<HermitianOperator> im;
    for (std::size_t i = 0; i < m; ++i) {
        re.push_back(HermitianOperator::real_part(f[i]));
        im.push_back(HermitianOperator::imag_part(f[i]));
    }

    // Pointwise positive parts need no splitting: p = q = 0 is optimal.
    bool positive = true;
    for (std::size_t i = 0; i < m && positive; ++i) {
        positive = nu.is_null(i) || (is_psd(re[i]) && is_psd(im[i]));
    }

    L1Certificate cert;
    std::vector<HermitianOperator> p(m, HermitianOperator::zero(d));
    std::vector<HermitianOperator> q(m, HermitianOperator::zero(d));
    std::optional<HermitianOperator> x0;
    if (!positive) {
        std::tie(p, q, x0) = detail::l1_sdp(re, im, k, nu, opt, cert.iterations);
    }

    // Primal side: repair p, q to exact feasibility, then evaluate.
    for (std::size_t i = 0; i < m; ++i) {
        auto lift = [&](HermitianOperator &x, const HermitianOperator &h) {
            const double shift = std::max({0.0, -lambda_min(x), -lambda_min(x + h)});
            if (shift > 0.0) {
                x = x + shift * HermitianOperator::identity(d);
            }
        };
        if (nu.is_null(i)) {
            p[i] = positive_parts(re[i]).negative;
            q[i] = positive_parts(im[i]).negative;
        } else {
            lift(p[i], re[i]);
            lift(q[i], im[i]);
        }
        cert.f1.push_back(re[i] + p[i]);
        cert.f2.push_back(p[i]);
        cert.f3.push_back(im[i] + q[i]);
        cert.f4.push_back(q[i]);
    }
    std::vector<HermitianOperator> total;
    for (std::size_t i = 0; i < m; ++i) {
        total.push_back(cert.f1[i] + cert.f2[i] + cert.f3[i] + cert.f4[i]);
    }
    cert.value = std::max(0.0, detail::lambda_max_sum(k, total, nu));

    // Dual side: state from the first primal block, best W and V for that state.
    if (!x0) {
        // Top eigenvector of the integral is optimal in the positive case.
        const auto e = hermitian_eigen(
            HermitianOperator::unchecked(detail::integral_sum(k, total, nu)));
        x0 = State::pure(e.vectors.col(0)).op();
    }
    const HermitianOperator xp = positive_parts(*x0).positive;
    cert.state = xp.trace().real() > 0.0 ? State::normalized(xp).op() : State::maximally_mixed(d).op();
    cert.W.assign(m, HermitianOperator::zero(d));
    cert.V.assign(m, HermitianOperator::zero(d));
    for (std::size_t i = 0; i < m; ++i) {
        if (!nu.is_null(i)) {
            const HermitianOperator s_x = cert.state.congruence(k[i]);
            cert.W[i] = detail::best_witness(re[i], s_x);
            cert.V[i] = detail::best_witness(im[i], s_x);
        }
    }
    double lb = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        lb += trace_pairing(cert.W[i], re[i]).real() + trace_pairing(cert.V[i], im[i]).real();
    }
    cert.dual_lower_bound = std::max(0.0, lb);
    cert.gap = cert.value - cert.dual_lower_bound;
    cert.converged = cert.gap <= opt.tol * std::max(1.0, cert.value);
    if (cert.converged && cert.value <= opt.tol) {
        cert.value = 0.0;
        cert.gap = 0.0;
        cert.dual_lower_bound = 0.0;
    }
    return cert;
}

/// Throws SolverStall when the certificate did not reach its gap target.
inline const L1Certificate &require_converged(const L1Certificate &c) {
    if (!c.converged) {
        throw Error(ErrorKind::SolverStall, "seminorm gap " + std::to_string(c.gap) + " above tolerance");
    }
    return c;
}

/// ||int |f| dnu|| for self-adjoint f.
inline double l1_upper_abs(const QuantumRandomVariable &f, const Povm &nu) {
    require_compatible(f, nu);
    if (!f.is_self_adjoint(1e-12)) {
        throw Error(ErrorKind::NotSelfAdjoint, "upper bound via |f| needs self-adjoint f");
    }
    return operator_norm(integrate(pointwise_abs(f), nu));
}

/// max over the given states of int |f_s| dnu_rho.
inline double l1_lower_states(const QuantumRandomVariable &f, const Povm &nu, const State &rho,
                              const std::vector<State> &states) {
    require_compatible(f, nu);
    const RnDerivative d(nu, rho);
    double best = 0.0;
    for (const auto &s : states) {
        const auto fs = scalarize(f, d, s);
        double acc = 0.0;
        for (std::size_t i = 0; i < fs.size(); ++i) {
            acc += std::abs(fs[i]) * d.induced()[i];
        }
        best = std::max(best, acc);
    }
    return best;
}

/// <f, g I> = int f g dnu.
inline ComplexOperator bracket(const QuantumRandomVariable &f, const ClassicalFunction &g, const Povm &nu) {
    require_compatible(f, nu);
    require_same_space(f.space(), g.space());
    const auto fg = f.map([&](const ComplexOperator &v, std::size_t i) { return g[i] * v; });
    return integrate(fg, nu);
}

inline QuantumRandomVariable mult_scalar(const QuantumRandomVariable &f, const ClassicalFunction &g) {
    require_same_space(f.space(), g.space());
    return f.map([&](const ComplexOperator &v, std::size_t i) { return g[i] * v; });
}

enum class Side { Left, Right };

inline QuantumRandomVariable mult_operator(const ComplexOperator &a, const QuantumRandomVariable &f, Side side) {
    if (a.dim() != f.dim()) {
        throw Error(ErrorKind::DimMismatch, "multiplier and random variable dimensions differ");
    }
    return f.map([&](const ComplexOperator &v, std::size_t) { return side == Side::Left ? a * v : v * a; });
}

/// Left: D^-1/2 A D^1/2 f.  Right: f D^1/2 A D^-1/2.
inline QuantumRandomVariable mult_operator_conjugated(const ComplexOperator &a, const QuantumRandomVariable &f,
                                                      const RnDerivative &d, Side side) {
    if (a.dim() != f.dim()) {
        throw Error(ErrorKind::DimMismatch, "multiplier and random variable dimensions differ");
    }
    if (!d.invertible()) {
        throw Error(ErrorKind::FullRankRequired, "conjugated multiplier needs invertible D(x)");
    }
    return f.map([&](const ComplexOperator &v, std::size_t i) {
        const auto inv = psd_pinv(d.sqrt(i), 0.0);
        const ComplexOperator m = side == Side::Left ? ComplexOperator(inv.matrix() * a.matrix() * d.sqrt(i).matrix())
                                                     : ComplexOperator(d.sqrt(i).matrix() * a.matrix() * inv.matrix());
        return side == Side::Left ? m * v : v * m;
    });
}

/// The pair (nu_rho I, D^1/2 f D^1/2) on the same atoms reweighted by nu_rho.
inline std::pair<Povm, QuantumRandomVariable> conjugate_to_scalar(const QuantumRandomVariable &f,
                                                                  const RnDerivative &d) {
    const FiniteMeasureSpace space(f.space().labels(), d.induced());
    const auto g = f.map([&](const ComplexOperator &v, std::size_t i) {
        return ComplexOperator(d.sqrt(i).matrix() * v.matrix() * d.sqrt(i).matrix());
    });
    return {Povm::scalar(space, f.dim()), QuantumRandomVariable(space, f.dim(), g.values())};
}

struct PositivityWitness {
    bool positive = true;
    std::size_t atom = 0;
    CVector vector;        // v with v* <f, chi_atom I> v < 0 (empty if f(atom) is not self-adjoint)
    double value = 0.0;    // that quadratic form, or the Hermitian defect
};

/// f >= 0 on every atom not annihilated by nu, tested through <f, chi_x I>.
inline PositivityWitness detect_positive(const QuantumRandomVariable &f, const Povm &nu, double tol = kPsdTol) {
    require_compatible(f, nu);
    PositivityWitness out;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (nu.is_null(i)) {
            continue;
        }
        std::vector<cplx> chi(f.size(), 0.0);
        chi[i] = 1.0;
        const auto b = bracket(f, ClassicalFunction(f.space(), chi), nu);
        const double scale = 1.0 + b.matrix().cwiseAbs().maxCoeff();
        if (b.hermitian_defect() > 1e-12 * scale) {
            out = {false, i, CVector(), b.hermitian_defect()};
            return out;
        }
        const auto e = hermitian_eigen(HermitianOperator::real_part(b));
        if (e.values.back() < -tol * scale) {
            out = {false, i, e.vectors.col(e.vectors.cols() - 1), e.values.back()};
            return out;
        }
    }
    return out;
}

struct BracketSeparation {
    bool found = false;
    std::size_t atom = 0;
    CVector vector;   // pure state s = v v*
    cplx value = 0.0; // tr(s <f, chi_atom I>)
};

/// Looks for g = chi_x and a pure state s with tr(s <f, g I>) != 0.
inline BracketSeparation bracket_separation(const QuantumRandomVariable &f, const Povm &nu, double tol = 1e-12) {
    require_compatible(f, nu);
    BracketSeparation best;
    for (std::size_t i = 0; i < f.size(); ++i) {
        std::vector<cplx> chi(f.size(), 0.0);
        chi[i] = 1.0;
        const auto b = bracket(f, ClassicalFunction(f.space(), chi), nu);
        for (const auto &h : {HermitianOperator::real_part(b), HermitianOperator::imag_part(b)}) {
            const auto e = hermitian_eigen(h);
            const Eigen::Index idx = std::abs(e.values.front()) >= std::abs(e.values.back()) ? 0 : h.dim() - 1;
            const CVector v = e.vectors.col(idx);
            const cplx val = (v.adjoint() * b.matrix() * v)(0, 0);
            if (std::abs(val) > std::abs(best.value)) {
                best = {std::abs(val) > tol, i, v, val};
            }
        }
    }
    return best;
}

} // namespace qrv
