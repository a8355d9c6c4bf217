#pragma once

// Doubly stochastic maps on operator-valued functions and the three
// majorization preorders (bistochastic, trace-class scalarization, states).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "qrv/error.hpp"
#include "qrv/linalg.hpp"
#include "qrv/lp.hpp"
#include "qrv/measure.hpp"
#include "qrv/povm.hpp"
#include "qrv/random.hpp"
#include "qrv/sdp.hpp"

namespace qrv {

enum class Order { B, T, S };
enum class Verdict { Holds, Fails, UndecidedSampled, Disagreement };

constexpr std::string_view to_string(Order o) {
    switch (o) {
    case Order::B: return "b";
    case Order::T: return "t";
    case Order::S: return "s";
    }
    return "?";
}

constexpr std::string_view to_string(Verdict v) {
    switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Fails: return "fails";
    case Verdict::UndecidedSampled: return "undecided-sampled";
    case Verdict::Disagreement: return "disagreement";
    }
    return "?";
}

struct MajorizationOptions {
    std::size_t samples = 10000;
    std::uint64_t seed = 42;
    std::size_t max_atoms = 12;
    double tol = 1e-9;
};

/// One k-subset S with F_S = sum_T lambda_T G_T (order T) or F_S <= sum_T lambda_T G_T (order S).
struct Containment {
    std::vector<std::size_t> subset;
    Eigen::VectorXd lambda;  // over the k-subsets of atoms in lexicographic order
    double slack = 0.0;      // T: max residual; S: lambda_min(sum lambda G - F)
};

struct MajorizationCertificate {
    Order order = Order::B;
    Verdict verdict = Verdict::Holds;
    bool exact = true;

    // order B
    std::optional<BistochasticMatrix> witness;
    double witness_residual = 0.0;
    Eigen::VectorXd farkas;
    LpProblem farkas_problem;
    double farkas_pairing = 0.0;
    double farkas_dual_residual = 0.0;

    // orders T and S
    double totals_residual = 0.0;
    std::vector<Containment> containment;
    std::optional<HermitianOperator> refuting_t;
    std::optional<HermitianOperator> refuting_state;
    double violation = 0.0; // mass-weighted partial-integral gap
    double margin = 0.0;    // same gap per atom (divided by the atom mass)
    std::size_t samples = 0;
    std::size_t sample_refutations = 0;
    std::string note;
};

/// (Bf)(i) = sum_j B_ij f(j), entrywise.
inline QuantumRandomVariable apply_bistochastic(const BistochasticMatrix &b, const QuantumRandomVariable &f) {
    require_same_space(b.space(), f.space());
    std::vector<ComplexOperator> out;
    for (std::size_t i = 0; i < f.size(); ++i) {
        CMatrix acc = CMatrix::Zero(f.dim(), f.dim());
        for (std::size_t j = 0; j < f.size(); ++j) {
            acc += b.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * f[j].matrix();
        }
        out.emplace_back(acc);
    }
    return {f.space(), f.dim(), out};
}

namespace detail {

inline void require_pair(const QuantumRandomVariable &f, const QuantumRandomVariable &g) {
    require_same_space(f.space(), g.space());
    if (f.dim() != g.dim()) {
        throw Error(ErrorKind::DimMismatch, "f and g act on different spaces");
    }
    if (!f.is_self_adjoint(1e-12) || !g.is_self_adjoint(1e-12)) {
        throw Error(ErrorKind::NotSelfAdjoint, "majorization is defined for self-adjoint functions");
    }
}

inline std::vector<Eigen::VectorXd> coords_of(const QuantumRandomVariable &f) {
    std::vector<Eigen::VectorXd> out;
    for (const auto &v : f.values()) {
        out.push_back(hermitian_coords(v));
    }
    return out;
}

inline std::vector<std::vector<std::size_t>> k_subsets(std::size_t m, std::size_t k) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur(k);
    std::iota(cur.begin(), cur.end(), 0);
    if (k == 0 || k > m) {
        return out;
    }
    for (;;) {
        out.push_back(cur);
        std::size_t i = k;
        while (i > 0 && cur[i - 1] == m - k + i - 1) {
            --i;
        }
        if (i == 0) {
            break;
        }
        ++cur[i - 1];
        for (std::size_t j = i; j < k; ++j) {
            cur[j] = cur[j - 1] + 1;
        }
    }
    return out;
}

inline HermitianOperator subset_sum(const QuantumRandomVariable &f, const std::vector<std::size_t> &s) {
    CMatrix acc = CMatrix::Zero(f.dim(), f.dim());
    for (std::size_t i : s) {
        acc += f[i].matrix();
    }
    return HermitianOperator::unchecked(acc);
}

/// Frobenius-normalized with the first nonzero diagonal entry made nonnegative.
inline HermitianOperator normalize_direction(const HermitianOperator &t) {
    const double n = t.frobenius_norm();
    HermitianOperator out = n > 0.0 ? (1.0 / n) * t : t;
    for (Eigen::Index i = 0; i < out.dim(); ++i) {
        const double v = out(i, i).real();
        if (std::abs(v) > 1e-12) {
            if (v < 0.0) {
                out = -1.0 * out;
            }
            break;
        }
    }
    return out;
}

inline double min_mass(const FiniteMeasureSpace &s) {
    return *std::min_element(s.masses().begin(), s.masses().end());
}

/// Scalarizes by a Hermitian direction and compares partial integrals.
inline PartialSumComparison scalar_comparison(const QuantumRandomVariable &f, const QuantumRandomVariable &g,
                                              const HermitianOperator &t, double tol) {
    return compare_partial_sums(scalarize_plain(f, t), scalarize_plain(g, t), tol);
}

struct SamplerOutcome {
    std::size_t refutations = 0;
    std::optional<HermitianOperator> first;
    PartialSumComparison first_cmp;
};

inline SamplerOutcome run_sampler(const QuantumRandomVariable &f, const QuantumRandomVariable &g, Order order,
                                  const MajorizationOptions &opt) {
    Rng rng(opt.seed);
    SamplerOutcome out;
    for (std::size_t n = 0; n < opt.samples; ++n) {
        HermitianOperator dir;
        if (order == Order::T) {
            dir = rng.hermitian(f.dim());
        } else {
            dir = (n % 2 == 0 ? rng.pure_state(f.dim()) : rng.mixed_state(f.dim())).op();
        }
        const auto cmp = scalar_comparison(f, g, dir, opt.tol);
        if (!cmp.majorized) {
            if (!out.first) {
                out.first = dir;
                out.first_cmp = cmp;
            }
            ++out.refutations;
        }
    }
    return out;
}

inline void record_refutation(MajorizationCertificate &c, const QuantumRandomVariable &f,
                              const QuantumRandomVariable &g, const HermitianOperator &dir, double tol) {
    const auto cmp = scalar_comparison(f, g, dir, tol);
    c.violation = std::max(cmp.max_violation, std::abs(cmp.total_difference));
    c.margin = c.violation / min_mass(f.space());
    if (c.order == Order::S) {
        c.refuting_state = dir;
    } else {
        c.refuting_t = dir;
    }
}

inline HermitianOperator totals_difference(const QuantumRandomVariable &f, const QuantumRandomVariable &g) {
    CMatrix acc = CMatrix::Zero(f.dim(), f.dim());
    for (std::size_t i = 0; i < f.size(); ++i) {
        acc += f.space().mass(i) * (f[i].matrix() - g[i].matrix());
    }
    return HermitianOperator::unchecked(acc);
}

inline double data_scale(const QuantumRandomVariable &f, const QuantumRandomVariable &g) {
    double s = 1.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        s = std::max({s, f[i].matrix().cwiseAbs().maxCoeff(), g[i].matrix().cwiseAbs().maxCoeff()});
    }
    return s * static_cast<double>(f.size());
}

// Direction t maximizing tr(t F_S) - max_T tr(t G_T) over the unit l1 ball of coordinates.
inline HermitianOperator max_violation_direction(const Eigen::VectorXd &fs, const std::vector<Eigen::VectorXd> &gts,
                                                 Eigen::Index d) {
    const Eigen::Index nc = fs.size();
    const Eigen::VectorXd w = hermitian_coord_weights(d);
    LpBuilder lp;
    std::vector<Eigen::Index> tp;
    std::vector<Eigen::Index> tn;
    for (Eigen::Index c = 0; c < nc; ++c) {
        tp.push_back(lp.add_var(LpBuilder::Var::NonNeg, -w(c) * fs(c)));
        tn.push_back(lp.add_var(LpBuilder::Var::NonNeg, w(c) * fs(c)));
    }
    const Eigen::Index z = lp.add_var(LpBuilder::Var::Free, 1.0);
    std::vector<std::pair<Eigen::Index, double>> ball;
    for (Eigen::Index c = 0; c < nc; ++c) {
        ball.emplace_back(tp[static_cast<std::size_t>(c)], 1.0);
        ball.emplace_back(tn[static_cast<std::size_t>(c)], 1.0);
    }
    lp.add_row(ball, LpBuilder::Row::Le, 1.0);
    for (const auto &gt : gts) {
        std::vector<std::pair<Eigen::Index, double>> row{{z, 1.0}};
        for (Eigen::Index c = 0; c < nc; ++c) {
            row.emplace_back(tp[static_cast<std::size_t>(c)], -w(c) * gt(c));
            row.emplace_back(tn[static_cast<std::size_t>(c)], w(c) * gt(c));
        }
        lp.add_row(row, LpBuilder::Row::Ge, 0.0);
    }
    const auto sol = lp.minimize();
    Eigen::VectorXd t = Eigen::VectorXd::Zero(nc);
    if (sol.status == LpStatus::Optimal) {
        for (Eigen::Index c = 0; c < nc; ++c) {
            t(c) = sol.x(tp[static_cast<std::size_t>(c)]) - sol.x(tn[static_cast<std::size_t>(c)]);
        }
    }
    return hermitian_from_coords(t, d);
}

} // namespace detail

/// f majorized by g through some bistochastic B: Bg = f entrywise.
inline MajorizationCertificate majorizes_B(const QuantumRandomVariable &f, const QuantumRandomVariable &g) {
    detail::require_pair(f, g);
    MajorizationCertificate c;
    c.order = Order::B;
    const auto lp = make_bistochastic_lp(f.space(), detail::coords_of(f), detail::coords_of(g));
    const auto res = lp_solve(lp.problem);
    if (res.status == LpStatus::Optimal) {
        BistochasticMatrix b(f.space(), unpack_bistochastic(res.x, lp.m));
        const auto bg = apply_bistochastic(b, g);
        for (std::size_t i = 0; i < f.size(); ++i) {
            c.witness_residual = std::max(c.witness_residual, (bg[i].matrix() - f[i].matrix()).cwiseAbs().maxCoeff());
        }
        c.witness = std::move(b);
        c.verdict = Verdict::Holds;
    } else {
        c.verdict = Verdict::Fails;
        c.farkas = res.y;
        c.farkas_problem = lp.problem;
        c.farkas_pairing = lp.problem.b.dot(res.y);
        const Eigen::VectorXd aty = lp.problem.A.transpose() * res.y;
        c.farkas_dual_residual = std::max(0.0, aty.maxCoeff());
        if (!verify_farkas(lp.problem, res.y, 1e-8, 1e-8)) {
            c.verdict = Verdict::Disagreement;
            c.note = "Farkas vector failed re-verification";
        }
    }
    return c;
}

namespace detail {

inline MajorizationCertificate sampled_only(const QuantumRandomVariable &f, const QuantumRandomVariable &g,
                                           Order order, const MajorizationOptions &opt, const std::string &why) {
    MajorizationCertificate c;
    c.order = order;
    c.exact = false;
    c.note = why;
    const auto s = run_sampler(f, g, order, opt);
    c.samples = opt.samples;
    c.sample_refutations = s.refutations;
    if (s.first) {
        c.verdict = Verdict::Fails;
        record_refutation(c, f, g, *s.first, opt.tol);
    } else {
        c.verdict = Verdict::UndecidedSampled;
    }
    return c;
}

// Exact totals check shared by T and S; returns false (with refutation recorded) on mismatch.
inline bool totals_agree(MajorizationCertificate &c, const QuantumRandomVariable &f, const QuantumRandomVariable &g,
                         const MajorizationOptions &opt) {
    const auto diff = totals_difference(f, g);
    c.totals_residual = diff.matrix().cwiseAbs().maxCoeff();
    if (c.totals_residual <= opt.tol * data_scale(f, g)) {
        return true;
    }
    c.verdict = Verdict::Fails;
    HermitianOperator dir = normalize_direction(diff);
    if (c.order == Order::S) {
        // Some state separates the totals: an extreme eigenvector of the difference.
        const auto e = hermitian_eigen(diff);
        const Eigen::Index idx = std::abs(e.values.front()) >= std::abs(e.values.back()) ? 0 : diff.dim() - 1;
        dir = State::pure(e.vectors.col(idx)).op();
    }
    record_refutation(c, f, g, dir, opt.tol);
    return false;
}

inline void cross_check(MajorizationCertificate &c, const QuantumRandomVariable &f, const QuantumRandomVariable &g,
                        const MajorizationOptions &opt) {
    const auto s = run_sampler(f, g, c.order, opt);
    c.samples = opt.samples;
    c.sample_refutations = s.refutations;
    if (c.verdict == Verdict::Holds && s.refutations > 0) {
        c.verdict = Verdict::Disagreement;
        c.note = "sampler refuted an exact 'holds' verdict";
        record_refutation(c, f, g, *s.first, opt.tol);
    }
}

} // namespace detail

/// f_t majorized by g_t for every self-adjoint t.
inline MajorizationCertificate majorizes_T(const QuantumRandomVariable &f, const QuantumRandomVariable &g,
                                           const MajorizationOptions &opt = {}) {
    detail::require_pair(f, g);
    if (!f.space().is_uniform()) {
        return detail::sampled_only(f, g, Order::T, opt, "unequal atom masses: sampling only");
    }
    if (f.size() > opt.max_atoms) {
        return detail::sampled_only(f, g, Order::T, opt, "atom count above the subset enumeration cap");
    }
    MajorizationCertificate c;
    c.order = Order::T;
    if (!detail::totals_agree(c, f, g, opt)) {
        return c;
    }
    const std::size_t m = f.size();
    const Eigen::Index d = f.dim();
    const Eigen::Index nc = hermitian_coord_count(d);
    for (std::size_t k = 1; k < m && c.verdict == Verdict::Holds; ++k) {
        const auto subsets = detail::k_subsets(m, k);
        std::vector<Eigen::VectorXd> gts;
        for (const auto &t : subsets) {
            gts.push_back(hermitian_coords(detail::subset_sum(g, t)));
        }
        const auto n = static_cast<Eigen::Index>(subsets.size());
        LpProblem p;
        p.c = Eigen::VectorXd::Zero(n);
        p.A = Eigen::MatrixXd::Zero(nc + 1, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            p.A.col(j).head(nc) = gts[static_cast<std::size_t>(j)];
            p.A(nc, j) = 1.0;
        }
        for (const auto &s : subsets) {
            const Eigen::VectorXd fs = hermitian_coords(detail::subset_sum(f, s));
            p.b = Eigen::VectorXd(nc + 1);
            p.b << fs, 1.0;
            const auto res = lp_solve(p);
            if (res.status == LpStatus::Optimal) {
                c.containment.push_back({s, res.x, (p.A * res.x - p.b).cwiseAbs().maxCoeff()});
                continue;
            }
            const auto t = detail::normalize_direction(detail::max_violation_direction(fs, gts, d));
            const auto cmp = detail::scalar_comparison(f, g, t, opt.tol);
            c.verdict = cmp.majorized ? Verdict::Disagreement : Verdict::Fails;
            if (cmp.majorized) {
                c.note = "containment LP infeasible but the extracted direction does not refute";
            }
            detail::record_refutation(c, f, g, t, opt.tol);
            break;
        }
    }
    if (opt.samples > 0) {
        detail::cross_check(c, f, g, opt);
    }
    return c;
}

namespace detail {

struct SubsetSdp {
    double tau = 0.0;
    Eigen::VectorXd lambda;
    HermitianOperator state;
    bool converged = false;
};

// max tau s.t. sum_T lambda_T G_T - F - tau I >= 0, lambda in the simplex.
inline SubsetSdp subset_sdp(const HermitianOperator &fs, const std::vector<HermitianOperator> &gts) {
    const Eigen::Index d = fs.dim();
    const auto n = gts.size();
    const CMatrix &glast = gts.back().matrix();
    SdpProblem p;
    p.add_block(glast - fs.matrix());
    p.A.push_back({SdpTerm{0, CMatrix::Identity(d, d)}});
    const int last_block = p.add_block(CMatrix::Ones(1, 1));
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const int blk = p.add_block(CMatrix::Zero(1, 1));
        p.A.push_back({SdpTerm{0, -(gts[j].matrix() - glast)}, SdpTerm{blk, -CMatrix::Ones(1, 1)},
                       SdpTerm{last_block, CMatrix::Ones(1, 1)}});
    }
    p.b = Eigen::VectorXd::Zero(p.num_vars());
    p.b(0) = 1.0;

    Eigen::VectorXd y0 = Eigen::VectorXd::Constant(p.num_vars(), 1.0 / static_cast<double>(n));
    CMatrix avg = CMatrix::Zero(d, d);
    for (const auto &g : gts) {
        avg += g.matrix() / static_cast<double>(n);
    }
    y0(0) = lambda_min(HermitianOperator::unchecked(avg - fs.matrix())) - 1.0;

    SdpOptions so;
    so.tol = 1e-10;
    const auto res = sdp_solve(p, so, y0);
    SubsetSdp out;
    out.converged = res.converged;
    out.lambda = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    double rest = 1.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        out.lambda(static_cast<Eigen::Index>(j)) = std::max(0.0, res.y(static_cast<Eigen::Index>(j) + 1));
        rest -= out.lambda(static_cast<Eigen::Index>(j));
    }
    out.lambda(static_cast<Eigen::Index>(n) - 1) = std::max(0.0, rest);
    out.lambda /= out.lambda.sum();
    CMatrix comb = -fs.matrix();
    for (std::size_t j = 0; j < n; ++j) {
        comb += out.lambda(static_cast<Eigen::Index>(j)) * gts[j].matrix();
    }
    out.tau = lambda_min(HermitianOperator::unchecked(comb));
    const HermitianOperator x0 = positive_parts(HermitianOperator::unchecked(res.X[0])).positive;
    out.state = x0.trace().real() > 0.0 ? State::normalized(x0).op() : State::maximally_mixed(d).op();
    return out;
}

} // namespace detail

/// f_s majorized by g_s for every state s.
inline MajorizationCertificate majorizes_S(const QuantumRandomVariable &f, const QuantumRandomVariable &g,
                                           const MajorizationOptions &opt = {}) {
    detail::require_pair(f, g);
    if (!f.space().is_uniform()) {
        return detail::sampled_only(f, g, Order::S, opt, "unequal atom masses: sampling only");
    }
    if (f.size() > opt.max_atoms) {
        return detail::sampled_only(f, g, Order::S, opt, "atom count above the subset enumeration cap");
    }
    MajorizationCertificate c;
    c.order = Order::S;
    if (!detail::totals_agree(c, f, g, opt)) {
        return c;
    }
    const std::size_t m = f.size();
    const double tau_tol = 1e-7 * detail::data_scale(f, g);
    for (std::size_t k = 1; k < m && c.verdict == Verdict::Holds; ++k) {
        const auto subsets = detail::k_subsets(m, k);
        std::vector<HermitianOperator> gts;
        for (const auto &t : subsets) {
            gts.push_back(detail::subset_sum(g, t));
        }
        for (const auto &s : subsets) {
            const auto fs = detail::subset_sum(f, s);
            const auto r = detail::subset_sdp(fs, gts);
            if (r.tau >= -tau_tol) {
                c.containment.push_back({s, r.lambda, r.tau});
                continue;
            }
            const auto cmp = detail::scalar_comparison(f, g, r.state, opt.tol);
            c.verdict = cmp.majorized ? Verdict::Disagreement : Verdict::Fails;
            if (cmp.majorized) {
                c.note = "subset SDP reports a gap but its state does not refute";
            }
            detail::record_refutation(c, f, g, r.state, opt.tol);
            break;
        }
    }
    if (opt.samples > 0) {
        detail::cross_check(c, f, g, opt);
    }
    return c;
}

struct ImplicationReport {
    MajorizationCertificate b, t, s;
    bool chain_ok = true;
};

/// Runs all three checks; B => T => S must never be violated.
inline ImplicationReport implication_suite(const QuantumRandomVariable &f, const QuantumRandomVariable &g,
                                           const MajorizationOptions &opt = {}) {
    ImplicationReport r{majorizes_B(f, g), majorizes_T(f, g, opt), majorizes_S(f, g, opt), true};
    const auto holds = [](const MajorizationCertificate &c) { return c.verdict == Verdict::Holds; };
    const auto fails = [](const MajorizationCertificate &c) { return c.verdict == Verdict::Fails; };
    if ((holds(r.b) && fails(r.t)) || (holds(r.t) && fails(r.s)) || (holds(r.b) && fails(r.s))) {
        r.chain_ok = false;
    }
    if (r.b.verdict == Verdict::Disagreement || r.t.verdict == Verdict::Disagreement ||
        r.s.verdict == Verdict::Disagreement) {
        r.chain_ok = false;
    }
    return r;
}

/// phi(h) = sum_x mu(x) tr(W(x) h(x)).
struct SeparatingFunctional {
    std::vector<HermitianOperator> W;

    [[nodiscard]] double operator()(const QuantumRandomVariable &h) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < h.size(); ++i) {
            acc += h.space().mass(i) * trace_pairing(W[i], h[i]).real();
        }
        return acc;
    }
};

struct PsiResult {
    double value = 0.0;
    Eigen::MatrixXd argmax;   // a maximizing bistochastic matrix
    Eigen::VectorXd u, v;     // u_i + mu_i v_j >= c_ij, bound sum u + sum mu v
    double dual_bound = 0.0;
};

/// psi_phi(h) = max over bistochastic B of Re phi(B h).
inline PsiResult psi_phi(const SeparatingFunctional &phi, const QuantumRandomVariable &h) {
    const auto &space = h.space();
    const auto m = static_cast<Eigen::Index>(h.size());
    if (phi.W.size() != h.size()) {
        throw Error(ErrorKind::DimMismatch, "functional and function have different atom counts");
    }
    auto lp = make_bistochastic_lp(space, {}, {});
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        for (Eigen::Index j = 0; j < m; ++j) {
            const double cij = space.mass(ui) * trace_pairing(phi.W[ui], h[static_cast<std::size_t>(j)]).real();
            lp.problem.c(BistochasticLp::var(m, i, j)) = -cij;
        }
    }
    const auto res = lp_solve(lp.problem);
    PsiResult out;
    if (res.status != LpStatus::Optimal) {
        throw Error(ErrorKind::SolverStall, "bistochastic polytope LP did not reach an optimum");
    }
    out.value = -res.objective;
    out.argmax = unpack_bistochastic(res.x, m);
    out.u = -res.y.head(m);
    out.v = -res.y.segment(m, m);
    out.dual_bound = out.u.sum();
    for (Eigen::Index j = 0; j < m; ++j) {
        out.dual_bound += space.mass(static_cast<std::size_t>(j)) * out.v(j);
    }
    return out;
}

struct SeparationResult {
    bool separated = false;
    SeparatingFunctional phi;
    double phi_f = 0.0;
    double psi_g = 0.0;
    double margin = 0.0;   // phi(f~) - psi_phi(g)
    Eigen::VectorXd u, v;  // dual certificate for psi_phi(g)
    std::size_t forward_checks = 0;
    std::size_t forward_failures = 0;
};

/// Looks for phi with phi(f~) > psi_phi(g); coordinates of each W(x) are boxed to [-1, 1].
inline SeparationResult komiya_separate(const QuantumRandomVariable &ft, const QuantumRandomVariable &g,
                                        std::uint64_t seed = 42, std::size_t forward_samples = 50) {
    detail::require_pair(ft, g);
    const auto &space = g.space();
    const std::size_t m = g.size();
    const Eigen::Index d = g.dim();
    const Eigen::Index nc = hermitian_coord_count(d);
    const Eigen::VectorXd w = hermitian_coord_weights(d);
    const auto fc = detail::coords_of(ft);
    const auto gc = detail::coords_of(g);

    LpBuilder lp;
    std::vector<std::vector<Eigen::Index>> wv(m);
    std::vector<Eigen::Index> uv(m);
    std::vector<Eigen::Index> vv(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (Eigen::Index c = 0; c < nc; ++c) {
            // cost: -mu_i w_c f~_i[c] (maximizing phi(f~))
            const Eigen::Index var = lp.add_var(LpBuilder::Var::Free, -space.mass(i) * w(c) * fc[i](c));
            wv[i].push_back(var);
            lp.add_row({{var, 1.0}}, LpBuilder::Row::Le, 1.0);
            lp.add_row({{var, 1.0}}, LpBuilder::Row::Ge, -1.0);
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        uv[i] = lp.add_var(LpBuilder::Var::Free, 1.0);
    }
    for (std::size_t j = 0; j < m; ++j) {
        vv[j] = lp.add_var(LpBuilder::Var::Free, space.mass(j));
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            std::vector<std::pair<Eigen::Index, double>> row{{uv[i], 1.0}, {vv[j], space.mass(i)}};
            for (Eigen::Index c = 0; c < nc; ++c) {
                row.emplace_back(wv[i][static_cast<std::size_t>(c)], -space.mass(i) * w(c) * gc[j](c));
            }
            lp.add_row(row, LpBuilder::Row::Ge, 0.0);
        }
    }
    const auto sol = lp.minimize();
    SeparationResult out;
    if (sol.status != LpStatus::Optimal) {
        throw Error(ErrorKind::SolverStall, "separation LP did not reach an optimum");
    }
    for (std::size_t i = 0; i < m; ++i) {
        Eigen::VectorXd coords(nc);
        for (Eigen::Index c = 0; c < nc; ++c) {
            coords(c) = sol.x(wv[i][static_cast<std::size_t>(c)]);
        }
        out.phi.W.push_back(hermitian_from_coords(coords, d));
    }
    out.phi_f = out.phi(ft);
    const auto psi = psi_phi(out.phi, g);
    out.psi_g = psi.value;
    out.u = psi.u;
    out.v = psi.v;
    out.margin = out.phi_f - psi.dual_bound;
    out.separated = out.margin > 1e-9 * detail::data_scale(ft, g);

    if (!out.separated) {
        Rng rng(seed);
        for (std::size_t n = 0; n < forward_samples; ++n) {
            SeparatingFunctional phi;
            for (std::size_t i = 0; i < m; ++i) {
                phi.W.push_back(rng.hermitian(d));
            }
            const double lhs = psi_phi(phi, ft).value;
            const double rhs = psi_phi(phi, g).value;
            ++out.forward_checks;
            if (lhs > rhs + 1e-8 * (1.0 + std::abs(rhs))) {
                ++out.forward_failures;
            }
        }
    }
    return out;
}

} // namespace qrv
