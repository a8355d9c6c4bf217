#pragma once

// Seeded randomized checks of the norm inequalities, the classical
// majorization equivalences, Birkhoff decomposition, the separation theorem
// and rho-invariance of integration. Every trial draws from its own derived
// seed, so reports are reproducible and independent of trial order.

#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "qrv/l1norm.hpp"
#include "qrv/majorization.hpp"
#include "qrv/measure.hpp"
#include "qrv/povm.hpp"
#include "qrv/random.hpp"

namespace qrv::suite {

struct Tally {
    std::string name;
    std::size_t checks = 0;
    std::size_t violations = 0;
    double worst = 0.0; // largest relative excess seen (<= 0 when every check passed)
    bool touched = false;

    void record(double excess) {
        ++checks;
        worst = touched ? std::max(worst, excess) : excess;
        touched = true;
    }
};

struct Report {
    std::uint64_t seed = 42;
    std::size_t trials = 0;
    std::vector<Tally> tallies;
    std::size_t unconverged = 0;

    [[nodiscard]] std::size_t violations() const {
        std::size_t n = 0;
        for (const auto &t : tallies) {
            n += t.violations;
        }
        return n;
    }

    Tally &at(const std::string &name) {
        for (auto &t : tallies) {
            if (t.name == name) {
                return t;
            }
        }
        tallies.push_back({name});
        return tallies.back();
    }
};

inline constexpr double kSlack = 1e-7;

/// splitmix64 of seed and stream index.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace detail {

// Records lhs <= rhs with relative slack.
inline void leq(Report &r, const std::string &name, double lhs, double rhs, double slack = kSlack) {
    auto &t = r.at(name);
    const double excess = (lhs - rhs) / std::max(1.0, std::abs(rhs));
    t.record(excess);
    if (excess > slack) {
        ++t.violations;
    }
}

// Records |a - b| <= tol * max(1, |b|).
inline void close(Report &r, const std::string &name, double a, double b, double tol) {
    auto &t = r.at(name);
    const double excess = std::abs(a - b) / std::max(1.0, std::abs(b)) - tol;
    t.record(excess);
    if (excess > 0.0) {
        ++t.violations;
    }
}

inline void holds(Report &r, const std::string &name, bool ok) {
    auto &t = r.at(name);
    t.record(ok ? -1.0 : 1.0);
    if (!ok) {
        ++t.violations;
    }
}

// Bounds on ||f||_1: [lower, upper].
struct Norm {
    double lo = 0.0;
    double hi = 0.0;
};

inline Norm norm1(Report &r, const QuantumRandomVariable &f, const Povm &nu) {
    const auto c = l1_seminorm(f, nu);
    if (!c.converged) {
        ++r.unconverged;
    }
    return {std::min(c.dual_lower_bound, c.value), c.value};
}

inline double sup_abs(const ClassicalFunction &g, const Povm &nu) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!nu.is_null(i)) {
            s = std::max(s, std::abs(g[i]));
        }
    }
    return s;
}

inline ClassicalFunction complex_function(Rng &rng, const FiniteMeasureSpace &space) {
    std::vector<cplx> v;
    for (std::size_t i = 0; i < space.size(); ++i) {
        const double re = rng.normal();
        v.emplace_back(re, rng.normal());
    }
    return {space, v};
}

inline double entry_abs_sum(const ComplexOperator &a) { return a.matrix().cwiseAbs().sum(); }

} // namespace detail

/// Norm inequalities on one random instance.
inline void inequality_trial(Report &r, std::uint64_t seed) {
    using detail::leq;
    Rng rng(seed);
    const auto d = static_cast<Eigen::Index>(1 + rng.index(4));
    const std::size_t m = 1 + rng.index(6);
    const FiniteMeasureSpace space = FiniteMeasureSpace::indexed(rng.masses(m));
    const Povm nu = rng.povm(space, d);
    const Povm mu = Povm::scalar(space, d);
    const auto mu_scaled = [&] {
        std::vector<HermitianOperator> e;
        for (std::size_t i = 0; i < m; ++i) {
            e.push_back(space.mass(i) * HermitianOperator::identity(d));
        }
        return Povm(space, d, e);
    }();
    const State rho = rng.full_rank_state(d);
    const RnDerivative dd(nu, rho);
    const auto f = rng.qrv(space, d);
    const auto h = rng.hermitian_qrv(space, d);
    const double n = static_cast<double>(d);

    // Integral bounded by pointwise norms weighted by ||D||.
    {
        double rhs = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            rhs += operator_norm(f[i]) * operator_norm(dd[i]) * dd.induced()[i];
        }
        leq(r, "integral <= int ||f|| ||D|| dnu_rho", operator_norm(integrate(f, nu)), rhs);
        double rhs_mu = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            rhs_mu += operator_norm(f[i]) * space.mass(i);
        }
        leq(r, "integral <= int ||f|| dmu (nu = mu I)", operator_norm(integrate(f, mu_scaled)), rhs_mu);
    }
    // Self-adjoint: ||int f|| <= ||int ||f|| I||.
    const double int_norm = operator_norm(integrate(pointwise_norm(h), nu));
    leq(r, "self-adjoint integral <= ||int ||f|| I dnu||", operator_norm(integrate(h, nu)), int_norm);
    // n^2 sandwich.
    {
        const double mid = operator_norm(integrate(
            f.map([&](const ComplexOperator &v, std::size_t) { return detail::entry_abs_sum(v) * ComplexOperator::identity(d); }),
            nu));
        const double lo = operator_norm(integrate(pointwise_norm(f), nu));
        leq(r, "sandwich lower: ||int ||f|| I|| <= ||int sum|f_ij| I||", lo, mid);
        leq(r, "sandwich upper: ||int sum|f_ij| I|| <= n^2 ||int ||f|| I||", mid, n * n * lo);
    }
    const auto nf = detail::norm1(r, f, nu);
    // Scalarized lower bound.
    {
        const State s = rng.index(2) == 0 ? rng.pure_state(d) : rng.mixed_state(d);
        const auto fs = scalarize(f, dd, s);
        double lhs = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            lhs += std::abs(fs[i]) * dd.induced()[i];
        }
        leq(r, "int |f_s| dnu_rho <= ||f||_1", lhs, nf.hi);
    }
    // Comparability chain for self-adjoint f.
    {
        const auto nh = detail::norm1(r, h, nu);
        const double abs_int = operator_norm(integrate(pointwise_abs(h), nu));
        leq(r, "chain: ||f||_1 <= ||int |f| dnu||", nh.lo, abs_int);
        leq(r, "chain: ||int |f| dnu|| <= ||int ||f|| I dnu||", abs_int, int_norm);
        leq(r, "chain: ||int ||f|| I dnu|| <= n ||D|| ||D^-1|| ||f||_1", int_norm,
            n * dd.sup_norm() * dd.inverse_sup_norm() * nh.hi);
    }
    // Adjoint invariance.
    {
        const auto na = detail::norm1(r, f.adjoint(), nu);
        leq(r, "||f*||_1 = ||f||_1", nf.lo, na.hi);
        leq(r, "||f*||_1 = ||f||_1", na.lo, nf.hi);
    }
    // Bounded functions embed.
    {
        const auto ng = detail::norm1(r, h, nu);
        leq(r, "||g||_1 <= 2 ||g||_inf ||nu(X)||", ng.lo, 2.0 * linf_norm(h, nu) * operator_norm(nu.total()));
    }
    const auto g = detail::complex_function(rng, space);
    const double g_inf = detail::sup_abs(g, nu);
    // Scalar multiplier.
    {
        const auto nfg = detail::norm1(r, mult_scalar(f, g), nu);
        leq(r, "||f g||_1 <= 2 ||f||_1 ||g||_inf", nfg.lo, 2.0 * nf.hi * g_inf);
    }
    // Cauchy-Schwarz for the bracket.
    leq(r, "||<f, g I>|| <= 4 ||f||_1 ||g||_inf", operator_norm(bracket(f, g, nu)), 4.0 * nf.hi * g_inf);
    // Operator multipliers on nu = mu I.
    const auto a = rng.complex_operator(d);
    const double factor = 4.0 * (1.0 + std::pow(operator_norm(a), 2));
    {
        const auto nfm = detail::norm1(r, f, mu_scaled);
        const auto left = detail::norm1(r, mult_operator(a, f, Side::Left), mu_scaled);
        const auto right = detail::norm1(r, mult_operator(a, f, Side::Right), mu_scaled);
        leq(r, "||A f||_1 <= 4(1 + ||A||^2) ||f||_1 (nu = mu I)", left.lo, factor * nfm.hi);
        leq(r, "||f A||_1 <= 4(1 + ||A||^2) ||f||_1 (nu = mu I)", right.lo, factor * nfm.hi);
    }
    // Conjugated multipliers for invertible D.
    {
        const auto left = detail::norm1(r, mult_operator_conjugated(a, f, dd, Side::Left), nu);
        const auto right = detail::norm1(r, mult_operator_conjugated(a, f, dd, Side::Right), nu);
        leq(r, "||D^-1/2 A D^1/2 f||_1 <= 4(1 + ||A||^2) ||f||_1", left.lo, factor * nf.hi);
        leq(r, "||f D^1/2 A D^-1/2||_1 <= 4(1 + ||A||^2) ||f||_1", right.lo, factor * nf.hi);
    }
    // Conjugation to nu_rho I preserves the seminorm when D is invertible.
    {
        const auto [scalar_nu, conj] = conjugate_to_scalar(f, dd);
        const auto nc = detail::norm1(r, conj, scalar_nu);
        leq(r, "||f||_1,nu = ||D^1/2 f D^1/2||_1,nu_rho", nf.lo, nc.hi);
        leq(r, "||f||_1,nu = ||D^1/2 f D^1/2||_1,nu_rho", nc.lo, nf.hi);
    }
    // Doubly stochastic maps on nu = mu I.
    {
        const auto b = rng.bistochastic(space);
        const auto bf = apply_bistochastic(b, f);
        const auto bfa = apply_bistochastic(b, f.adjoint());
        double defect = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            defect = std::max(defect, (bfa[i].matrix() - bf[i].matrix().adjoint()).cwiseAbs().maxCoeff());
        }
        detail::close(r, "B(f*) = B(f)*", defect, 0.0, 1e-12);
        const auto nfm = detail::norm1(r, f, mu_scaled);
        const auto nbf = detail::norm1(r, bf, mu_scaled);
        leq(r, "||B f||_1 <= ||f||_1", nbf.lo, nfm.hi);
        leq(r, "||B f||_inf <= ||f||_inf (self-adjoint f)", linf_norm(apply_bistochastic(b, h), mu_scaled),
            linf_norm(h, mu_scaled));
        // <B(f0 A), g I> = <B(f0), g> A for classical f0.
        const auto f0 = detail::complex_function(rng, space);
        const auto f0a = QuantumRandomVariable(space, d, [&] {
            std::vector<ComplexOperator> v;
            for (std::size_t i = 0; i < m; ++i) {
                v.push_back(f0[i] * a);
            }
            return v;
        }());
        const auto lhs = bracket(apply_bistochastic(b, f0a), g, mu_scaled);
        const auto bf0 = b.apply(f0);
        cplx scalar = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            scalar += bf0[i] * g[i] * space.mass(i);
        }
        const double err = (lhs.matrix() - scalar * a.matrix()).cwiseAbs().maxCoeff();
        detail::close(r, "<B(f A), g I> = <B(f), g> A", err, 0.0, 1e-8);
    }
    // Seminorm axioms.
    {
        const auto f2 = rng.qrv(space, d);
        const auto n2 = detail::norm1(r, f2, nu);
        const auto nsum = detail::norm1(r, f + f2, nu);
        leq(r, "||f + g||_1 <= ||f||_1 + ||g||_1", nsum.lo, nf.hi + n2.hi);
        const double c = rng.normal();
        const auto nc = detail::norm1(r, c * f, nu);
        leq(r, "||c f||_1 = |c| ||f||_1 (real c)", nc.lo, std::abs(c) * nf.hi);
        leq(r, "||c f||_1 = |c| ||f||_1 (real c)", std::abs(c) * nf.lo, nc.hi);
        // Complex scalars only satisfy the weaker bound: the seminorm is real-homogeneous.
        const cplx z(rng.normal(), rng.normal());
        const auto nz = detail::norm1(r, z * f, nu);
        leq(r, "||z f||_1 <= sqrt(2) |z| ||f||_1 (complex z)", nz.lo, std::sqrt(2.0) * std::abs(z) * nf.hi);
    }
}

/// Partial sums, the bistochastic LP and the hinge test agree on scalar pairs.
inline void scalar_equivalence_trial(Report &r, std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t m = 1 + rng.index(8);
    const auto space = FiniteMeasureSpace::uniform(m, 1.0 / static_cast<double>(m));
    const auto g = rng.integer_function(space, -3, 3);
    ClassicalFunction f = g;
    switch (rng.index(3)) {
    case 0: {
        const Eigen::MatrixXd b = rng.doubly_stochastic(m, 1 + rng.index(4));
        f = BistochasticMatrix(space, b).apply(g);
        break;
    }
    case 1: {
        // Same total, otherwise arbitrary: majorized or not.
        auto v = rng.integer_function(space, -3, 3).real_values();
        const double shift =
            (g.integral().real() - ClassicalFunction::real(space, v).integral().real()) / space.total_mass();
        for (auto &x : v) {
            x += shift;
        }
        f = ClassicalFunction::real(space, v);
        break;
    }
    default:
        f = rng.integer_function(space, -3, 3);
        break;
    }
    const bool partial = classical_majorizes(f, g);
    const auto lp = bistochastic_witness(f, g);
    const bool witness = lp.witness.has_value() && lp.residual <= 1e-8;
    const bool farkas = !lp.witness && verify_farkas(lp.problem, lp.farkas, 1e-8, 1e-8);
    const bool hinge = convex_function_test(f, g);
    detail::holds(r, "partial sums <=> bistochastic witness", partial == witness);
    detail::holds(r, "partial sums <=> hinge-family test", partial == hinge);
    detail::holds(r, "LP answer carries a verified certificate", witness || farkas);
}

inline void birkhoff_trial(Report &r, std::uint64_t seed) {
    Rng rng(seed);
    const auto space = FiniteMeasureSpace::uniform(5, 0.2);
    const auto b = rng.bistochastic(space);
    const auto terms = birkhoff_decompose(b);
    const double residual = (birkhoff_reconstruct(terms, 5) - b.matrix()).cwiseAbs().maxCoeff();
    detail::holds(r, "Birkhoff: at most 17 permutations", terms.size() <= 17);
    detail::close(r, "Birkhoff: reconstruction residual <= 1e-8", residual, 0.0, 1e-8);
}

/// Forward: psi_phi(Bg) <= psi_phi(g) for random phi.
inline void komiya_forward_trial(Report &r, std::uint64_t seed) {
    Rng rng(seed);
    const auto d = static_cast<Eigen::Index>(1 + rng.index(3));
    const std::size_t m = 2 + rng.index(4);
    const auto space = FiniteMeasureSpace::indexed(rng.masses(m));
    const auto g = rng.hermitian_qrv(space, d);
    const auto f = apply_bistochastic(rng.bistochastic(space), g);
    for (int k = 0; k < 50; ++k) {
        SeparatingFunctional phi;
        for (std::size_t i = 0; i < m; ++i) {
            phi.W.push_back(rng.hermitian(d));
        }
        const double lhs = psi_phi(phi, f).value;
        const double rhs = psi_phi(phi, g).value;
        auto &t = r.at("separation forward: psi(Bg) <= psi(g) + 1e-8");
        t.record(lhs - rhs - 1e-8);
        if (lhs > rhs + 1e-8) {
            ++t.violations;
        }
    }
}

/// Converse: f outside the bistochastic orbit of g is separated.
inline void komiya_converse_trial(Report &r, std::uint64_t seed) {
    Rng rng(seed);
    const auto d = static_cast<Eigen::Index>(1 + rng.index(3));
    const std::size_t m = 2 + rng.index(4);
    const auto space = FiniteMeasureSpace::indexed(rng.masses(m));
    const auto g = rng.hermitian_qrv(space, d);
    const auto base = apply_bistochastic(rng.bistochastic(space), g);
    // A zero-integral push on atom 0 that exceeds the sup norm of g.
    const auto e = rng.hermitian(d);
    const double boost = 2.0 * linf_norm(g, Povm::scalar(space, d)) + 1.0;
    const HermitianOperator push = (boost / operator_norm(e)) * e;
    std::vector<ComplexOperator> v;
    for (std::size_t i = 0; i < m; ++i) {
        const double w = i == 0 ? 1.0 : -space.mass(0) / (space.total_mass() - space.mass(0));
        v.push_back(base[i] + w * push);
    }
    const QuantumRandomVariable f(space, d, v);
    const auto cert = majorizes_B(f, g);
    detail::holds(r, "separation converse: constructed negative is not in the orbit", cert.verdict == Verdict::Fails);
    const auto sep = komiya_separate(f, g, seed);
    detail::holds(r, "separation converse: separating phi with positive margin", sep.separated && sep.margin > 0.0);
}

/// int f dnu computed through D for several full-rank rho.
inline void rho_invariance_trial(Report &r, std::uint64_t seed) {
    Rng rng(seed);
    const auto d = static_cast<Eigen::Index>(1 + rng.index(4));
    const std::size_t m = 1 + rng.index(6);
    const auto space = FiniteMeasureSpace::indexed(rng.masses(m));
    const Povm nu = rng.povm(space, d);
    const auto f = rng.qrv(space, d);
    CMatrix direct = CMatrix::Zero(d, d);
    for (std::size_t i = 0; i < m; ++i) {
        const auto k = psd_sqrt(nu.effect(i));
        direct += k.matrix() * f[i].matrix() * k.matrix();
    }
    const double scale = std::max(1.0, direct.cwiseAbs().maxCoeff());
    for (int k = 0; k < 20; ++k) {
        const State rho = rng.full_rank_state(d);
        const double err = (integrate(f, nu, rho).matrix() - direct).cwiseAbs().maxCoeff() / scale;
        detail::close(r, "int f dnu independent of rho (1e-9)", err, 0.0, 1e-9);
    }
}

struct Options {
    std::uint64_t seed = 42;
    std::size_t trials = 200;
};

inline Report run(const Options &opt) {
    Report r;
    r.seed = opt.seed;
    r.trials = opt.trials;
    std::uint64_t stream = 0;
    const auto each = [&](std::size_t count, auto &&fn) {
        for (std::size_t t = 0; t < count; ++t) {
            fn(r, derive_seed(opt.seed, stream + t));
        }
        stream += 1000003;
    };
    each(opt.trials, inequality_trial);
    each(opt.trials, scalar_equivalence_trial);
    each(opt.trials / 4, birkhoff_trial);
    each(opt.trials / 2, komiya_forward_trial);
    each(opt.trials / 4, komiya_converse_trial);
    each(opt.trials / 10, rho_invariance_trial);
    return r;
}

inline std::string format(const Report &r) {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "property suite: seed %llu, trials %zu\n",
                  static_cast<unsigned long long>(r.seed), r.trials);
    out += buf;
    for (const auto &t : r.tallies) {
        std::snprintf(buf, sizeof buf, "%-62s checks %6zu  violations %4zu  worst %+.3e\n", t.name.c_str(), t.checks,
                      t.violations, t.worst);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "total violations %zu, unconverged seminorm solves %zu\n", r.violations(),
                  r.unconverged);
    out += buf;
    return out;
}

} // namespace qrv::suite
