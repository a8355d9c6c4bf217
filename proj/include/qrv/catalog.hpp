#pragma once

// Reference examples with known answers. Each example runs on built-in data
// or on an override document and reports named checks against the expected
// values.

#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qrv/instances.hpp"
#include "qrv/json_io.hpp"
#include "qrv/l1norm.hpp"
#include "qrv/majorization.hpp"
#include "qrv/verify.hpp"

namespace qrv::catalog {

using json = nlohmann::json;

struct Check {
    std::string name;
    bool ok = false;
    std::string detail;
};

struct Example {
    std::string id;
    std::string title;
    std::function<std::vector<Check>(const std::optional<json> &)> run;
};

namespace detail {

inline std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline Check near(const std::string &name, double observed, double expected, double tol) {
    return {name, std::abs(observed - expected) <= tol,
            "observed " + num(observed) + ", expected " + num(expected) + " +- " + num(tol)};
}

inline Check flag(const std::string &name, bool ok, const std::string &detail = {}) { return {name, ok, detail}; }

// Serializes, reparses and re-checks a certificate the way a consumer of the file would.
inline Check verified(const std::string &name, const json &cert) {
    const auto report = verify::check(io::parse_text(cert.dump(), name));
    std::string failed;
    for (const auto &c : report.checks) {
        if (!c.ok) {
            failed += (failed.empty() ? "failed: " : ", ") + c.name;
        }
    }
    return {name, report.ok(), failed};
}

inline int depth_of(const std::optional<json> &in, int fallback) {
    if (!in) {
        return fallback;
    }
    const auto &d = io::detail::field(*in, "max_depth", "instance");
    if (!d.is_number_integer() || d.get<int>() < 2 || d.get<int>() > 24) {
        io::detail::fail("instance", "'max_depth' must be an integer in [2, 24]");
    }
    return d.get<int>();
}

inline instances::PairInstance pair_of(const std::optional<json> &in, instances::PairInstance builtin) {
    if (!in) {
        return builtin;
    }
    const auto &fj = io::detail::field(*in, "f", "instance");
    const auto &gj = io::detail::field(*in, "g", "instance");
    return {io::qrv_from_json(fj, std::nullopt, "instance.f"), io::qrv_from_json(gj, std::nullopt, "instance.g")};
}

} // namespace detail

inline std::vector<Check> nine_vs_eleven(const std::optional<json> &in) {
    using namespace detail;
    auto ex = instances::nine_vs_eleven();
    if (in) {
        ex.nu = io::povm_from_json(io::detail::field(*in, "povm", "instance"), std::nullopt, "instance.povm");
        ex.f = io::qrv_from_json(io::detail::field(*in, "qrv", "instance"), ex.nu.space(), "instance.qrv");
    }
    std::vector<Check> out;
    const ComplexOperator integral = integrate(ex.f, ex.nu);
    out.push_back(near("||int f dnu||", operator_norm(integral), 9.0, 1e-9));
    out.push_back(near("int f dnu = [[7,4],[4,1]] (max entry error)",
                       (integral.matrix() - ComplexOperator({{7, 4}, {4, 1}}).matrix()).cwiseAbs().maxCoeff(), 0.0,
                       1e-9));
    out.push_back(near("||int |f| dnu||", operator_norm(integrate(pointwise_abs(ex.f), ex.nu)), 11.0, 1e-9));

    L1Options opt;
    opt.tol = 1e-9;
    const auto cert = l1_seminorm(ex.f, ex.nu, opt);
    out.push_back(near("||f||_1", cert.value, 9.0, 1e-6));
    out.push_back(verified("seminorm certificate", io::l1_certificate_to_json(cert, ex.nu, ex.f, opt.tol)));

    // Hand decomposition: f(0) is positive, f(1) = f1(1) - f2(1).
    const auto ref = instances::nine_vs_eleven_reference_parts();
    if (ex.f.size() == 2 && ex.f.dim() == 2) {
        const double split = (ex.f[1].matrix() - (ref[0] - ref[1]).matrix()).cwiseAbs().maxCoeff();
        const bool positive = is_psd(ref[0]) && is_psd(ref[1]) && is_psd(HermitianOperator::from(ex.f[0]));
        out.push_back(flag("reference parts are positive", positive));
        out.push_back(near("f(1) = f1(1) - f2(1) (max entry error)", split, 0.0, 1e-12));
        const QuantumRandomVariable sum(ex.f.space(), 2, {ex.f[0], ComplexOperator(ref[0] + ref[1])});
        out.push_back(near("||int (f1 + f2) dnu|| for the reference parts", operator_norm(integrate(sum, ex.nu)), 9.0,
                           1e-9));
    } else {
        out.push_back(flag("reference parts apply (2 atoms, dim 2)", false));
    }
    return out;
}

inline std::vector<Check> triangle(const std::optional<json> &in) {
    using namespace detail;
    auto [a, b] = instances::triangle_pair();
    if (in) {
        a = ComplexOperator(io::matrix_from_json(io::detail::field(*in, "A", "instance"), "instance.A"));
        b = ComplexOperator(io::matrix_from_json(io::detail::field(*in, "B", "instance"), "instance.B"));
    }
    const double sum = operator_norm(a + b);
    const double abs_sum = operator_norm(abs_operator(a) + abs_operator(b));
    return {near("||A + B||", sum, std::sqrt(2.0), 1e-12), near("|| |A| + |B| ||", abs_sum, 1.0, 1e-12),
            flag("2||A + B|| > 2|| |A| + |B| ||", 2 * sum > 2 * abs_sum, num(2 * sum) + " > " + num(2 * abs_sum))};
}

inline std::vector<Check> dyadic(const std::optional<json> &in) {
    using namespace detail;
    const int depth = depth_of(in, 12);
    double l1_err = 0.0;
    double abs_err = 0.0;
    bool all_converged = true;
    for (int k = 1; k <= depth; ++k) {
        const auto ex = instances::dyadic_truncation(k);
        const auto cert = l1_seminorm(ex.f, ex.nu);
        all_converged = all_converged && cert.converged;
        l1_err = std::max(l1_err, std::abs(cert.value - 1.0));
        abs_err = std::max(abs_err, std::abs(operator_norm(integrate(pointwise_norm(ex.f), ex.nu)) - k));
    }
    const std::string depths = "k = 1.." + std::to_string(depth);
    return {near("||f||_1 = 1 at " + depths + " (worst error)", l1_err, 0.0, 1e-6),
            near("||int ||f|| I dnu|| = k at " + depths + " (worst error)", abs_err, 0.0, 1e-9),
            flag("all seminorm solves converged", all_converged)};
}

inline std::vector<Check> swap(const std::optional<json> &in) {
    using namespace detail;
    const int depth = depth_of(in, 12);
    const auto u = instances::swap_unitary();
    double f_err = 0.0;
    double uf_err = 0.0;
    double f_max = 0.0;
    double prev = -1.0;
    bool increasing = true;
    int first_above_10 = 0;
    for (int k = 1; k <= depth; ++k) {
        const auto ex = instances::swap_truncation(k);
        const auto uf = ex.f.map([&](const ComplexOperator &v, std::size_t) { return u.adjoint() * v * u; });
        const double fk = l1_seminorm(ex.f, ex.nu).value;
        const double ufk = l1_seminorm(uf, ex.nu).value;
        double closed = 0.0;
        for (int i = 1; i <= k; ++i) {
            closed += std::pow(2.0, -0.5 * i);
        }
        f_err = std::max(f_err, std::abs(fk - closed));
        uf_err = std::max(uf_err, std::abs(ufk - k) / k);
        f_max = std::max(f_max, fk);
        increasing = increasing && ufk > prev;
        prev = ufk;
        if (first_above_10 == 0 && ufk > 10.0 + 1e-6) {
            first_above_10 = k;
        }
    }
    const double bound = 1.0 / (std::sqrt(2.0) - 1.0);
    const std::string depths = "k = 1.." + std::to_string(depth);
    return {near("||f||_1 = sum_i 2^(-i/2) at " + depths + " (worst error)", f_err, 0.0, 1e-6),
            flag("||f||_1 <= 1/(sqrt 2 - 1)", f_max <= bound, "max " + num(f_max) + " <= " + num(bound)),
            near("||U* f U||_1 = k at " + depths + " (worst relative error)", uf_err, 0.0, 1e-6),
            flag("||U* f U||_1 strictly increasing in k", increasing),
            flag("||U* f U||_1 > 10 at some depth", first_above_10 > 0,
                 first_above_10 ? "first at k = " + std::to_string(first_above_10) : "never")};
}

inline std::vector<Check> joe_verducci(const std::optional<json> &in) {
    using namespace detail;
    const auto ex = pair_of(in, instances::joe_verducci());
    std::vector<Check> out;
    const auto s = majorizes_S(ex.f, ex.g);
    out.push_back(flag("order S holds (exact)", s.verdict == Verdict::Holds && s.exact,
                       std::string(to_string(s.verdict))));
    out.push_back(flag("order S: sampler agrees", s.samples == 10000 && s.sample_refutations == 0,
                       std::to_string(s.sample_refutations) + " of " + std::to_string(s.samples) + " refute"));
    out.push_back(verified("order S certificate", io::majorization_to_json(s, ex.f, ex.g)));
    const auto t = majorizes_T(ex.f, ex.g);
    out.push_back(flag("order T fails", t.verdict == Verdict::Fails, std::string(to_string(t.verdict))));
    out.push_back(flag("order T refuting margin >= 0.9", t.margin >= 0.9, "margin " + num(t.margin)));
    out.push_back(verified("order T certificate", io::majorization_to_json(t, ex.f, ex.g)));
    const auto b = majorizes_B(ex.f, ex.g);
    out.push_back(flag("order B fails", b.verdict == Verdict::Fails, std::string(to_string(b.verdict))));
    out.push_back(verified("order B certificate", io::majorization_to_json(b, ex.f, ex.g)));
    return out;
}

inline std::vector<Check> malamud(const std::optional<json> &in) {
    using namespace detail;
    const auto ex = pair_of(in, instances::malamud());
    std::vector<Check> out;
    const auto t = majorizes_T(ex.f, ex.g);
    out.push_back(flag("order T holds (exact)", t.verdict == Verdict::Holds && t.exact,
                       std::string(to_string(t.verdict))));
    std::size_t expected = 0;
    for (std::size_t k = 1; k < ex.g.size(); ++k) {
        expected += qrv::detail::k_subsets(ex.g.size(), k).size();
    }
    std::size_t proper = 0;
    for (const auto &c : t.containment) {
        proper += c.subset.size() < ex.g.size() ? 1 : 0;
    }
    out.push_back(flag("containment LP for every proper k-subset", proper == expected,
                       std::to_string(proper) + " of " + std::to_string(expected)));
    out.push_back(verified("order T certificate", io::majorization_to_json(t, ex.f, ex.g)));
    const auto b = majorizes_B(ex.f, ex.g);
    out.push_back(flag("order B fails with a Farkas vector", b.verdict == Verdict::Fails && b.farkas.size() > 0,
                       std::string(to_string(b.verdict))));
    out.push_back(near("Farkas dual residual", b.farkas_dual_residual, 0.0, 1e-8));
    out.push_back(verified("order B certificate", io::majorization_to_json(b, ex.f, ex.g)));
    const auto sep = komiya_separate(ex.f, ex.g);
    out.push_back(flag("separating functional with margin >= 1e-6", sep.separated && sep.margin >= 1e-6,
                       "margin " + num(sep.margin)));
    out.push_back(verified("separation certificate", io::separation_to_json(sep, ex.f, ex.g)));
    return out;
}

inline const std::vector<Example> &examples() {
    static const std::vector<Example> all = {
        {"nine-vs-eleven", "seminorm 9 against integral of |f| 11", nine_vs_eleven},
        {"triangle", "no triangle inequality for |.|", triangle},
        {"dyadic-truncation", "bounded seminorm, unbounded integral of ||f||", dyadic},
        {"swap-truncation", "seminorm not invariant under unitary conjugation", swap},
        {"joe-verducci", "S holds, T and B fail", joe_verducci},
        {"malamud", "T holds, B fails, separated", malamud},
    };
    return all;
}

inline const Example *find(const std::string &id) {
    for (const auto &e : examples()) {
        if (e.id == id) {
            return &e;
        }
    }
    return nullptr;
}

} // namespace qrv::catalog
