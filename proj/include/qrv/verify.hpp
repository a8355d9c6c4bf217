#pragma once

// Re-checks certificate JSON files using plain linear algebra: no solver is
// called, every claim is recomputed from the embedded inputs.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "qrv/json_io.hpp"
#include "qrv/linalg.hpp"

namespace qrv::verify {

using io::json;

struct Check {
    std::string name;
    bool ok = false;
    double value = 0.0;
};

struct Report {
    std::string kind;
    std::vector<Check> checks;

    [[nodiscard]] bool ok() const {
        return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check &c) { return c.ok; });
    }
    void add(std::string name, bool ok, double value = 0.0) { checks.push_back({std::move(name), ok, value}); }
};

inline constexpr double kResidualTol = 1e-8;
inline constexpr double kMarginTol = 1e-9;

namespace detail {

inline double max_abs(const CMatrix &m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

inline double scale_of(const QuantumRandomVariable &f) {
    double s = 1.0;
    for (const auto &v : f.values()) {
        s = std::max(s, max_abs(v.matrix()));
    }
    return s;
}

// Decreasing-rearrangement partial integrals of real values over masses,
// evaluated at the union of breakpoints. Returns max(F - G) and F(total) - G(total).
inline std::pair<double, double> partial_integral_gap(const std::vector<double> &masses, std::vector<double> fv,
                                                      std::vector<double> gv) {
    const auto curve = [&masses](const std::vector<double> &v) {
        std::vector<std::size_t> idx(v.size());
        for (std::size_t i = 0; i < idx.size(); ++i) {
            idx[i] = i;
        }
        std::stable_sort(idx.begin(), idx.end(), [&v](std::size_t a, std::size_t b) { return v[a] > v[b]; });
        std::vector<std::pair<double, double>> steps; // (width, value)
        for (std::size_t i : idx) {
            steps.emplace_back(masses[i], v[i]);
        }
        return steps;
    };
    const auto fs = curve(fv);
    const auto gs = curve(gv);
    const auto integral_to = [](const std::vector<std::pair<double, double>> &steps, double s) {
        double acc = 0.0;
        double pos = 0.0;
        for (const auto &[w, v] : steps) {
            const double take = std::min(w, std::max(0.0, s - pos));
            acc += take * v;
            pos += w;
        }
        return acc;
    };
    std::vector<double> points;
    double pos = 0.0;
    for (const auto &[w, v] : fs) {
        pos += w;
        points.push_back(pos);
    }
    const double total = pos;
    pos = 0.0;
    for (const auto &[w, v] : gs) {
        pos += w;
        points.push_back(pos);
    }
    double worst = -1e300;
    for (double s : points) {
        worst = std::max(worst, integral_to(fs, s) - integral_to(gs, s));
    }
    return {worst, integral_to(fs, total) - integral_to(gs, total)};
}

inline std::vector<double> scalar_values(const QuantumRandomVariable &f, const HermitianOperator &t) {
    std::vector<double> out;
    for (const auto &v : f.values()) {
        out.push_back((t.matrix() * v.matrix()).trace().real());
    }
    return out;
}

inline std::vector<HermitianOperator> herm_map(const json &j, const char *key, const FiniteMeasureSpace &s,
                                               Eigen::Index d) {
    return io::hermitian_atom_map(io::detail::field(j, key, "certificate"), s, d, std::string("certificate.") + key);
}

inline double get_num(const json &j, const char *key) {
    return io::detail::field(j, key, "certificate").get<double>();
}

} // namespace detail

/// L1 seminorm certificate: primal decomposition and dual state/witness pair.
inline Report check_l1(const json &j) {
    Report r{"l1-seminorm", {}};
    const auto nu = io::povm_from_json(io::detail::field(j, "povm", "certificate"));
    const auto f = io::qrv_from_json(io::detail::field(j, "qrv", "certificate"));
    const auto &space = f.space();
    const Eigen::Index d = f.dim();
    const std::size_t m = f.size();
    const auto &dec = io::detail::field(j, "decomposition", "certificate");
    const auto &dual = io::detail::field(j, "dual", "certificate");
    const auto f1 = detail::herm_map(dec, "f1", space, d);
    const auto f2 = detail::herm_map(dec, "f2", space, d);
    const auto f3 = detail::herm_map(dec, "f3", space, d);
    const auto f4 = detail::herm_map(dec, "f4", space, d);
    const auto w = detail::herm_map(dual, "W", space, d);
    const auto v = detail::herm_map(dual, "V", space, d);
    const auto s = HermitianOperator::from(ComplexOperator(io::matrix_from_json(dual.at("state"), "dual.state")), 1e-9);
    const double value = detail::get_num(j, "value");
    const double lb = detail::get_num(j, "dual_lower_bound");
    const double tol = detail::get_num(j, "tol");
    const double scale = detail::scale_of(f);

    double recon = 0.0;
    double negativity = 0.0;
    const cplx iu(0.0, 1.0);
    for (std::size_t i = 0; i < m; ++i) {
        const CMatrix g = f1[i].matrix() - f2[i].matrix() + iu * (f3[i].matrix() - f4[i].matrix());
        recon = std::max(recon, detail::max_abs(g - f[i].matrix()));
        for (const auto *part : {&f1, &f2, &f3, &f4}) {
            negativity = std::max(negativity, -lambda_min((*part)[i]));
        }
    }
    r.add("decomposition reconstructs f", recon <= kResidualTol * scale, recon);
    r.add("decomposition parts are PSD", negativity <= kResidualTol * scale, negativity);

    std::vector<HermitianOperator> k;
    CMatrix acc = CMatrix::Zero(d, d);
    for (std::size_t i = 0; i < m; ++i) {
        k.push_back(psd_sqrt(nu.effect(i)));
        if (!nu.is_null(i)) {
            acc += k[i].matrix() * (f1[i] + f2[i] + f3[i] + f4[i]).matrix() * k[i].matrix();
        }
    }
    const double recomputed = lambda_max(HermitianOperator::unchecked(acc));
    const double value_err = std::abs(recomputed - value);
    r.add("value equals the norm of the integral", value_err <= kResidualTol * std::max(1.0, value), value_err);

    const double state_trace = std::abs(s.trace().real() - 1.0);
    const double state_neg = std::max(0.0, -lambda_min(s));
    r.add("dual state is a density operator", state_trace <= 1e-9 && state_neg <= 1e-9, std::max(state_trace, state_neg));

    double sandwich = 0.0;
    double lower = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const HermitianOperator sx = nu.is_null(i) ? HermitianOperator::zero(d) : s.congruence(k[i]);
        for (const auto *x : {&w, &v}) {
            sandwich = std::max({sandwich, -lambda_min(sx - (*x)[i]), -lambda_min(sx + (*x)[i])});
        }
        lower += (w[i].matrix() * HermitianOperator::real_part(f[i]).matrix()).trace().real() +
                 (v[i].matrix() * HermitianOperator::imag_part(f[i]).matrix()).trace().real();
    }
    r.add("dual witnesses satisfy -KsK <= W, V <= KsK", sandwich <= kResidualTol * std::max(1.0, scale), sandwich);
    const double lb_err = std::abs(lower - lb);
    r.add("dual lower bound recomputes", lb_err <= kResidualTol * std::max(1.0, std::abs(lb)), lb_err);
    const double gap = value - lower;
    r.add("duality gap within tolerance", gap <= tol * std::max(1.0, value) && gap >= -kResidualTol * std::max(1.0, value),
          gap);
    return r;
}

namespace detail {

inline void check_refutation(Report &r, const json &j, const QuantumRandomVariable &f,
                             const QuantumRandomVariable &g, bool state) {
    const char *key = state ? "refuting_state" : "refuting_t";
    if (!j.contains(key)) {
        r.add(std::string(key) + " present", false);
        return;
    }
    const auto t = HermitianOperator::from(ComplexOperator(io::matrix_from_json(j.at(key), key)), 1e-9);
    if (state) {
        const double defect = std::max(std::abs(t.trace().real() - 1.0), std::max(0.0, -lambda_min(t)));
        r.add("refuting state is a density operator", defect <= 1e-9, defect);
    }
    const auto [worst, total] = partial_integral_gap(f.space().masses(), scalar_values(f, t), scalar_values(g, t));
    const double violation = std::max(worst, std::abs(total));
    r.add("scalarized partial integrals violate majorization", violation > kMarginTol, violation);
}

inline void check_containment(Report &r, const json &j, const QuantumRandomVariable &f,
                              const QuantumRandomVariable &g, bool state) {
    const std::size_t m = f.size();
    const Eigen::Index d = f.dim();
    CMatrix totals = CMatrix::Zero(d, d);
    for (std::size_t i = 0; i < m; ++i) {
        totals += f.space().mass(i) * (f[i].matrix() - g[i].matrix());
    }
    const double scale = scale_of(f) * static_cast<double>(m);
    r.add("totals agree", max_abs(totals) <= kResidualTol * scale, max_abs(totals));
    if (!f.space().is_uniform()) {
        r.add("exact containment requires equal masses", false);
        return;
    }
    const auto &cont = io::detail::field(j, "containment", "certificate");
    std::size_t seen = 0;
    double worst_simplex = 0.0;
    double worst_fit = 0.0;
    std::size_t expected = 0;
    for (std::size_t k = 1; k < m; ++k) {
        // Enumerate k-subsets lexicographically.
        std::vector<std::vector<std::size_t>> subsets;
        std::vector<std::size_t> cur(k);
        for (std::size_t i = 0; i < k; ++i) {
            cur[i] = i;
        }
        for (;;) {
            subsets.push_back(cur);
            std::size_t i = k;
            while (i > 0 && cur[i - 1] == m - k + i - 1) {
                --i;
            }
            if (i == 0) {
                break;
            }
            ++cur[i - 1];
            for (std::size_t q = i; q < k; ++q) {
                cur[q] = cur[q - 1] + 1;
            }
        }
        expected += subsets.size();
        std::vector<CMatrix> gt;
        for (const auto &t : subsets) {
            CMatrix acc = CMatrix::Zero(d, d);
            for (std::size_t x : t) {
                acc += g[x].matrix();
            }
            gt.push_back(acc);
        }
        for (const auto &s : subsets) {
            const auto it = std::find_if(cont.begin(), cont.end(), [&s](const json &e) {
                return e.at("subset").get<std::vector<std::size_t>>() == s;
            });
            if (it == cont.end()) {
                continue;
            }
            ++seen;
            const Eigen::VectorXd lambda = io::vector_from_json(it->at("lambda"), "containment.lambda");
            if (lambda.size() != static_cast<Eigen::Index>(gt.size())) {
                worst_simplex = std::max(worst_simplex, 1.0);
                continue;
            }
            worst_simplex = std::max({worst_simplex, std::abs(lambda.sum() - 1.0), std::max(0.0, -lambda.minCoeff())});
            CMatrix comb = CMatrix::Zero(d, d);
            for (std::size_t t = 0; t < gt.size(); ++t) {
                comb += lambda(static_cast<Eigen::Index>(t)) * gt[t];
            }
            for (std::size_t x : s) {
                comb -= f[x].matrix();
            }
            const double fit = state ? std::max(0.0, -lambda_min(HermitianOperator::unchecked(comb))) : max_abs(comb);
            worst_fit = std::max(worst_fit, fit);
        }
    }
    r.add("every k-subset has a containment witness", seen == expected, static_cast<double>(expected - seen));
    r.add("containment weights lie in the simplex", worst_simplex <= kResidualTol, worst_simplex);
    r.add(state ? "sum lambda G_T - F_S is PSD" : "sum lambda G_T equals F_S", worst_fit <= 1e-7 * scale, worst_fit);
}

} // namespace detail

inline Report check_majorization(const json &j) {
    const auto order = io::detail::field(j, "order", "certificate").get<std::string>();
    const auto verdict = io::detail::field(j, "verdict", "certificate").get<std::string>();
    Report r{"majorization/" + order, {}};
    const auto f = io::qrv_from_json(io::detail::field(j, "f", "certificate"));
    const auto g = io::qrv_from_json(io::detail::field(j, "g", "certificate"));
    if (!(f.space() == g.space()) || f.dim() != g.dim()) {
        r.add("f and g share a space", false);
        return r;
    }
    const std::size_t m = f.size();
    const auto &space = f.space();
    if (verdict == "disagreement") {
        r.add("verdict is decisive", false);
        return r;
    }
    if (verdict == "undecided-sampled") {
        r.add("verdict is decisive", false);
        return r;
    }
    if (order == "b" && verdict == "holds") {
        const Eigen::MatrixXd b = io::real_matrix_from_json(io::detail::field(j, "witness", "certificate"), "witness");
        const auto mm = static_cast<Eigen::Index>(m);
        if (b.rows() != mm || b.cols() != mm) {
            r.add("witness has the atom count as size", false);
            return r;
        }
        double rows = 0.0;
        double cols = 0.0;
        for (Eigen::Index i = 0; i < mm; ++i) {
            rows = std::max(rows, std::abs(b.row(i).sum() - 1.0));
            double c = 0.0;
            for (Eigen::Index q = 0; q < mm; ++q) {
                c += space.mass(static_cast<std::size_t>(q)) * b(q, i);
            }
            cols = std::max(cols, std::abs(c - space.mass(static_cast<std::size_t>(i))));
        }
        r.add("witness entries are nonnegative", b.minCoeff() >= -1e-12, b.minCoeff());
        r.add("witness rows sum to one", rows <= kResidualTol, rows);
        r.add("witness preserves the measure", cols <= kResidualTol, cols);
        double res = 0.0;
        for (Eigen::Index i = 0; i < mm; ++i) {
            CMatrix acc = -f[static_cast<std::size_t>(i)].matrix();
            for (Eigen::Index q = 0; q < mm; ++q) {
                acc += b(i, q) * g[static_cast<std::size_t>(q)].matrix();
            }
            res = std::max(res, detail::max_abs(acc));
        }
        r.add("Bg = f entrywise", res <= kResidualTol * detail::scale_of(g), res);
    } else if (order == "b") {
        const Eigen::VectorXd y = io::vector_from_json(io::detail::field(j, "farkas", "certificate"), "farkas");
        // Rows: sum_j B_ij = 1, sum_i mu_i B_ij = mu_j, then sum_j B_ij g_j[c] = f_i[c] per coordinate.
        const auto mm = static_cast<Eigen::Index>(m);
        const Eigen::Index nc = hermitian_coord_count(f.dim());
        const Eigen::Index rows = 2 * mm + mm * nc;
        if (y.size() != rows) {
            r.add("Farkas vector length matches the system", false, static_cast<double>(y.size()));
            return r;
        }
        Eigen::VectorXd aty = Eigen::VectorXd::Zero(mm * mm);
        double pairing = 0.0;
        for (Eigen::Index i = 0; i < mm; ++i) {
            pairing += y(i) + y(mm + i) * space.mass(static_cast<std::size_t>(i));
            const Eigen::VectorXd fi = hermitian_coords(f[static_cast<std::size_t>(i)]);
            pairing += y.segment(2 * mm + i * nc, nc).dot(fi);
            for (Eigen::Index q = 0; q < mm; ++q) {
                const Eigen::VectorXd gq = hermitian_coords(g[static_cast<std::size_t>(q)]);
                aty(i * mm + q) = y(i) + y(mm + q) * space.mass(static_cast<std::size_t>(i)) +
                                  y.segment(2 * mm + i * nc, nc).dot(gq);
            }
        }
        r.add("A^T y <= 0", aty.maxCoeff() <= kResidualTol, aty.maxCoeff());
        r.add("b^T y > 0", pairing > kResidualTol, pairing);
    } else if (order == "t" || order == "s") {
        const bool state = order == "s";
        if (verdict == "fails") {
            detail::check_refutation(r, j, f, g, state);
        } else {
            detail::check_containment(r, j, f, g, state);
        }
    } else {
        r.add("known order", false);
    }
    return r;
}

inline Report check_separation(const json &j) {
    Report r{"separation", {}};
    const auto f = io::qrv_from_json(io::detail::field(j, "f", "certificate"));
    const auto g = io::qrv_from_json(io::detail::field(j, "g", "certificate"));
    if (!io::detail::field(j, "separated", "certificate").get<bool>()) {
        const auto checks = j.value("forward_checks", 0UL);
        const auto failures = j.value("forward_failures", 0UL);
        r.add("no separation: forward checks all pass", checks > 0 && failures == 0, static_cast<double>(failures));
        return r;
    }
    const auto &space = g.space();
    const std::size_t m = g.size();
    const auto w = detail::herm_map(j, "W", space, g.dim());
    const Eigen::VectorXd u = io::vector_from_json(j.at("u"), "u");
    const Eigen::VectorXd v = io::vector_from_json(j.at("v"), "v");
    if (u.size() != static_cast<Eigen::Index>(m) || v.size() != static_cast<Eigen::Index>(m)) {
        r.add("dual vectors have the atom count as length", false);
        return r;
    }
    double phi_f = 0.0;
    double bound = 0.0;
    double infeas = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        phi_f += space.mass(i) * (w[i].matrix() * f[i].matrix()).trace().real();
        bound += u(static_cast<Eigen::Index>(i)) + space.mass(i) * v(static_cast<Eigen::Index>(i));
        for (std::size_t q = 0; q < m; ++q) {
            const double c = space.mass(i) * (w[i].matrix() * g[q].matrix()).trace().real();
            infeas = std::max(infeas, c - u(static_cast<Eigen::Index>(i)) - space.mass(i) * v(static_cast<Eigen::Index>(q)));
        }
    }
    r.add("u_i + mu_i v_j >= mu_i tr(W_i g_j)", infeas <= kResidualTol, infeas);
    // Slack in the dual constraints only loosens the bound, so subtract it explicitly.
    const double margin = phi_f - bound - static_cast<double>(m) * std::max(0.0, infeas);
    r.add("phi(f) exceeds the bound on psi(g)", margin > kResidualTol, margin);
    return r;
}

inline Report check(const json &j) {
    const auto kind = io::detail::field(j, "kind", "certificate").get<std::string>();
    if (kind == "l1-seminorm") {
        return check_l1(j);
    }
    if (kind == "majorization") {
        return check_majorization(j);
    }
    if (kind == "separation") {
        return check_separation(j);
    }
    throw Error(ErrorKind::Validation, "certificate: unknown kind '" + kind + "'");
}

inline std::string format(const Report &r) {
    std::ostringstream out;
    out.precision(6);
    out << std::scientific;
    for (const auto &c : r.checks) {
        out << (c.ok ? "ok   " : "FAIL ") << c.name << " (" << c.value << ")\n";
    }
    out << r.kind << ": " << (r.ok() ? "verified" : "NOT verified") << "\n";
    return out.str();
}

} // namespace qrv::verify
