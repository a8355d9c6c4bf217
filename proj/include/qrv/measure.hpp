#pragma once

// Finite atomic measure spaces and scalar functions on them.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qrv/error.hpp"
#include "qrv/linalg.hpp"
#include "qrv/lp.hpp"

namespace qrv {

class FiniteMeasureSpace {
  public:
    FiniteMeasureSpace() = default;
    FiniteMeasureSpace(std::vector<std::string> labels, std::vector<double> masses)
        : labels_(std::move(labels)), masses_(std::move(masses)) {
        if (labels_.size() != masses_.size()) {
            throw Error(ErrorKind::InvalidSpace, "label count differs from mass count");
        }
        if (labels_.empty()) {
            throw Error(ErrorKind::InvalidSpace, "space has no atoms");
        }
        for (double m : masses_) {
            if (!std::isfinite(m) || m <= 0.0) {
                throw Error(ErrorKind::InvalidSpace, "atom masses must be finite and strictly positive");
            }
        }
        std::set<std::string> seen(labels_.begin(), labels_.end());
        if (seen.size() != labels_.size()) {
            throw Error(ErrorKind::InvalidSpace, "atom labels must be unique");
        }
    }

    /// Atoms labelled 0..m-1 with the given masses.
    static FiniteMeasureSpace indexed(const std::vector<double> &masses) {
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < masses.size(); ++i) {
            labels.push_back(std::to_string(i));
        }
        return {labels, masses};
    }

    static FiniteMeasureSpace uniform(std::size_t m, double mass = 1.0) {
        return indexed(std::vector<double>(m, mass));
    }

    [[nodiscard]] std::size_t size() const { return masses_.size(); }
    [[nodiscard]] const std::vector<std::string> &labels() const { return labels_; }
    [[nodiscard]] const std::vector<double> &masses() const { return masses_; }
    [[nodiscard]] double mass(std::size_t i) const { return masses_[i]; }
    [[nodiscard]] double total_mass() const {
        return std::accumulate(masses_.begin(), masses_.end(), 0.0);
    }
    [[nodiscard]] bool is_uniform(double tol = 1e-12) const {
        const auto [lo, hi] = std::minmax_element(masses_.begin(), masses_.end());
        return *hi - *lo <= tol * *hi;
    }
    [[nodiscard]] std::optional<std::size_t> index_of(const std::string &label) const {
        const auto it = std::find(labels_.begin(), labels_.end(), label);
        if (it == labels_.end()) {
            return std::nullopt;
        }
        return static_cast<std::size_t>(it - labels_.begin());
    }

    friend bool operator==(const FiniteMeasureSpace &a, const FiniteMeasureSpace &b) {
        return a.labels_ == b.labels_ && a.masses_ == b.masses_;
    }

  private:
    std::vector<std::string> labels_;
    std::vector<double> masses_;
};

inline void require_same_space(const FiniteMeasureSpace &a, const FiniteMeasureSpace &b) {
    if (!(a == b)) {
        throw Error(ErrorKind::SpaceMismatch, "functions live on different measure spaces");
    }
}

class ClassicalFunction {
  public:
    ClassicalFunction(FiniteMeasureSpace space, std::vector<cplx> values)
        : space_(std::move(space)), values_(std::move(values)) {
        if (values_.size() != space_.size()) {
            throw Error(ErrorKind::DimMismatch, "one value per atom is required");
        }
        for (const auto &v : values_) {
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                throw Error(ErrorKind::NonFinite, "function values must be finite");
            }
        }
    }

    static ClassicalFunction real(FiniteMeasureSpace space, const std::vector<double> &values) {
        return {std::move(space), std::vector<cplx>(values.begin(), values.end())};
    }

    static ClassicalFunction constant(const FiniteMeasureSpace &space, cplx c) {
        return {space, std::vector<cplx>(space.size(), c)};
    }

    [[nodiscard]] const FiniteMeasureSpace &space() const { return space_; }
    [[nodiscard]] const std::vector<cplx> &values() const { return values_; }
    [[nodiscard]] cplx operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }

    [[nodiscard]] bool is_real(double tol = 1e-12) const {
        return std::all_of(values_.begin(), values_.end(),
                           [tol](cplx v) { return std::abs(v.imag()) <= tol; });
    }

    [[nodiscard]] std::vector<double> real_values(double tol = 1e-12) const {
        if (!is_real(tol)) {
            throw Error(ErrorKind::ComplexValued, "function has a non-negligible imaginary part");
        }
        std::vector<double> out;
        out.reserve(values_.size());
        for (const auto &v : values_) {
            out.push_back(v.real());
        }
        return out;
    }

    [[nodiscard]] cplx integral() const {
        cplx acc = 0.0;
        for (std::size_t i = 0; i < values_.size(); ++i) {
            acc += space_.mass(i) * values_[i];
        }
        return acc;
    }

    /// Essential supremum of |f|.
    [[nodiscard]] double sup_norm() const {
        double out = 0.0;
        for (const auto &v : values_) {
            out = std::max(out, std::abs(v));
        }
        return out;
    }

  private:
    FiniteMeasureSpace space_;
    std::vector<cplx> values_;
};

/// Right-continuous non-increasing step function on [0, total], as (width, value) pairs.
struct StepFunction {
    std::vector<std::pair<double, double>> steps;

    [[nodiscard]] double total_width() const {
        double w = 0.0;
        for (const auto &s : steps) {
            w += s.first;
        }
        return w;
    }

    /// Integral of the step function over [0, t].
    [[nodiscard]] double integral_to(double t) const {
        double acc = 0.0;
        double left = 0.0;
        for (const auto &[w, v] : steps) {
            if (t <= left) {
                break;
            }
            acc += std::min(w, t - left) * v;
            left += w;
        }
        return acc;
    }

    [[nodiscard]] std::vector<double> breakpoints() const {
        std::vector<double> out{0.0};
        double left = 0.0;
        for (const auto &s : steps) {
            left += s.first;
            out.push_back(left);
        }
        return out;
    }
};

/// mu({x : f(x) > s})
inline double distribution_function(const ClassicalFunction &f, double s) {
    const auto v = f.real_values();
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] > s) {
            acc += f.space().mass(i);
        }
    }
    return acc;
}

inline StepFunction decreasing_rearrangement(const ClassicalFunction &f) {
    const auto v = f.real_values();
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
    StepFunction out;
    for (std::size_t i : order) {
        const double w = f.space().mass(i);
        if (!out.steps.empty() && out.steps.back().second == v[i]) {
            out.steps.back().first += w;
        } else {
            out.steps.emplace_back(w, v[i]);
        }
    }
    return out;
}

struct PartialSumComparison {
    bool majorized = false;
    double total_difference = 0.0; // int g - int f
    double max_violation = 0.0;    // max_t (int_0^t f* - int_0^t g*), >= 0
    double violation_at = 0.0;
};

/// Compares the running integrals of f* and g* at every breakpoint of either.
inline PartialSumComparison compare_partial_sums(const ClassicalFunction &f, const ClassicalFunction &g,
                                                 double tol = 1e-9) {
    const double mf = f.space().total_mass();
    const double mg = g.space().total_mass();
    if (std::abs(mf - mg) > 1e-9 * std::max(1.0, std::max(mf, mg))) {
        throw Error(ErrorKind::MassMismatch, "spaces have different total mass");
    }
    const auto fr = decreasing_rearrangement(f);
    const auto gr = decreasing_rearrangement(g);
    std::vector<double> pts = fr.breakpoints();
    const auto gp = gr.breakpoints();
    pts.insert(pts.end(), gp.begin(), gp.end());
    std::sort(pts.begin(), pts.end());

    PartialSumComparison out;
    double scale = 1.0;
    for (const auto &[w, v] : fr.steps) {
        scale = std::max(scale, w * std::abs(v));
    }
    for (const auto &[w, v] : gr.steps) {
        scale = std::max(scale, w * std::abs(v));
    }
    for (double t : pts) {
        const double diff = fr.integral_to(t) - gr.integral_to(t);
        if (diff > out.max_violation) {
            out.max_violation = diff;
            out.violation_at = t;
        }
    }
    out.total_difference = gr.integral_to(mg) - fr.integral_to(mf);
    out.majorized = out.max_violation <= tol * scale && std::abs(out.total_difference) <= tol * scale;
    return out;
}

/// f majorized by g: partial integrals of f* below those of g*, equal totals.
inline bool classical_majorizes(const ClassicalFunction &f, const ClassicalFunction &g, double tol = 1e-9) {
    return compare_partial_sums(f, g, tol).majorized;
}

class BistochasticMatrix {
  public:
    BistochasticMatrix(FiniteMeasureSpace space, Eigen::MatrixXd b, double tol = 1e-9)
        : space_(std::move(space)), b_(std::move(b)) {
        const auto m = static_cast<Eigen::Index>(space_.size());
        if (b_.rows() != m || b_.cols() != m) {
            throw Error(ErrorKind::DimMismatch, "bistochastic matrix size must equal the atom count");
        }
        if (!b_.allFinite()) {
            throw Error(ErrorKind::NonFinite, "bistochastic matrix entries must be finite");
        }
        const double d = defect();
        if (b_.minCoeff() < -1e-12 || d > tol) {
            throw Error(ErrorKind::NotBistochastic,
                        "matrix is not bistochastic (defect " + std::to_string(d) + ")");
        }
    }

    static BistochasticMatrix identity(const FiniteMeasureSpace &space) {
        const auto m = static_cast<Eigen::Index>(space.size());
        return {space, Eigen::MatrixXd::Identity(m, m)};
    }

    /// Every row equal to the normalized masses: maps f to its mean.
    static BistochasticMatrix averaging(const FiniteMeasureSpace &space) {
        const auto m = static_cast<Eigen::Index>(space.size());
        Eigen::MatrixXd b(m, m);
        for (Eigen::Index j = 0; j < m; ++j) {
            b.col(j).setConstant(space.mass(static_cast<std::size_t>(j)) / space.total_mass());
        }
        return {space, b};
    }

    [[nodiscard]] const FiniteMeasureSpace &space() const { return space_; }
    [[nodiscard]] const Eigen::MatrixXd &matrix() const { return b_; }

    /// Worst violation of the row-sum and mass-preservation identities.
    [[nodiscard]] double defect() const {
        const auto m = static_cast<Eigen::Index>(space_.size());
        Eigen::VectorXd mu(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            mu(i) = space_.mass(static_cast<std::size_t>(i));
        }
        const double rows = (b_.rowwise().sum().array() - 1.0).abs().maxCoeff();
        const double cols = ((mu.transpose() * b_) - mu.transpose()).cwiseAbs().maxCoeff();
        return std::max(rows, cols / std::max(1.0, mu.maxCoeff()));
    }

    [[nodiscard]] ClassicalFunction apply(const ClassicalFunction &g) const {
        require_same_space(space_, g.space());
        std::vector<cplx> out(g.size(), 0.0);
        for (std::size_t i = 0; i < g.size(); ++i) {
            for (std::size_t j = 0; j < g.size(); ++j) {
                out[i] += b_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * g[j];
            }
        }
        return {space_, out};
    }

  private:
    FiniteMeasureSpace space_;
    Eigen::MatrixXd b_;
};

/// Transportation-polytope LP: rows of B sum to 1, mu^T B = mu^T, B >= 0, plus
/// caller-supplied linear equalities on B. Variables are B_ij in row-major order.
struct BistochasticLp {
    LpProblem problem;
    Eigen::Index m = 0;
    Eigen::Index structural_rows = 0;

    [[nodiscard]] static Eigen::Index var(Eigen::Index m, Eigen::Index i, Eigen::Index j) { return i * m + j; }
};

/// Entry constraints: for each coordinate c, sum_j B_ij g_j[c] = f_i[c].
/// `g_coords` and `f_coords` hold one coordinate vector per atom.
inline BistochasticLp make_bistochastic_lp(const FiniteMeasureSpace &space,
                                           const std::vector<Eigen::VectorXd> &f_coords,
                                           const std::vector<Eigen::VectorXd> &g_coords) {
    const auto m = static_cast<Eigen::Index>(space.size());
    const Eigen::Index nc = f_coords.empty() ? 0 : f_coords.front().size();
    BistochasticLp out;
    out.m = m;
    out.structural_rows = 2 * m;
    const Eigen::Index rows = 2 * m + m * nc;
    auto &p = out.problem;
    p.A = Eigen::MatrixXd::Zero(rows, m * m);
    p.b = Eigen::VectorXd::Zero(rows);
    p.c = Eigen::VectorXd::Zero(m * m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            p.A(i, BistochasticLp::var(m, i, j)) = 1.0;
            p.A(m + j, BistochasticLp::var(m, i, j)) = space.mass(static_cast<std::size_t>(i));
        }
        p.b(i) = 1.0;
        p.b(m + i) = space.mass(static_cast<std::size_t>(i));
    }
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index c = 0; c < nc; ++c) {
            const Eigen::Index r = 2 * m + i * nc + c;
            for (Eigen::Index j = 0; j < m; ++j) {
                p.A(r, BistochasticLp::var(m, i, j)) = g_coords[static_cast<std::size_t>(j)](c);
            }
            p.b(r) = f_coords[static_cast<std::size_t>(i)](c);
        }
    }
    return out;
}

inline Eigen::MatrixXd unpack_bistochastic(const Eigen::VectorXd &x, Eigen::Index m) {
    Eigen::MatrixXd b(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            b(i, j) = x(BistochasticLp::var(m, i, j));
        }
    }
    return b;
}

struct BistochasticWitness {
    std::optional<BistochasticMatrix> witness;
    Eigen::VectorXd farkas;  // set when infeasible
    LpProblem problem;       // the LP the certificate refers to
    double residual = 0.0;   // max |Bg - f| when feasible
};

/// Searches for B with Bg = f; returns B or a Farkas certificate.
inline BistochasticWitness bistochastic_witness(const ClassicalFunction &f, const ClassicalFunction &g) {
    require_same_space(f.space(), g.space());
    const std::size_t m = f.size();
    std::vector<Eigen::VectorXd> fc(m, Eigen::VectorXd(2));
    std::vector<Eigen::VectorXd> gc(m, Eigen::VectorXd(2));
    for (std::size_t i = 0; i < m; ++i) {
        fc[i] << f[i].real(), f[i].imag();
        gc[i] << g[i].real(), g[i].imag();
    }
    auto lp = make_bistochastic_lp(f.space(), fc, gc);
    BistochasticWitness out;
    out.problem = lp.problem;
    const auto res = lp_solve(lp.problem);
    if (res.status == LpStatus::Optimal) {
        BistochasticMatrix b(f.space(), unpack_bistochastic(res.x, lp.m));
        const auto bg = b.apply(g);
        for (std::size_t i = 0; i < m; ++i) {
            out.residual = std::max(out.residual, std::abs(bg[i] - f[i]));
        }
        out.witness = std::move(b);
    } else {
        out.farkas = res.y;
    }
    return out;
}

struct BirkhoffTerm {
    double weight = 0.0;
    std::vector<std::size_t> perm; // row i -> column perm[i]
};

namespace detail {

// Kuhn augmenting-path matching restricted to entries > threshold.
inline std::optional<std::vector<std::size_t>> perfect_matching(const Eigen::MatrixXd &a, double threshold) {
    const auto m = static_cast<std::size_t>(a.rows());
    std::vector<long> match_col(m, -1);
    std::function<bool(std::size_t, std::vector<bool> &)> augment = [&](std::size_t r, std::vector<bool> &seen) {
        for (std::size_t c = 0; c < m; ++c) {
            if (a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) <= threshold || seen[c]) {
                continue;
            }
            seen[c] = true;
            if (match_col[c] < 0 || augment(static_cast<std::size_t>(match_col[c]), seen)) {
                match_col[c] = static_cast<long>(r);
                return true;
            }
        }
        return false;
    };
    for (std::size_t r = 0; r < m; ++r) {
        std::vector<bool> seen(m, false);
        if (!augment(r, seen)) {
            return std::nullopt;
        }
    }
    std::vector<std::size_t> perm(m);
    for (std::size_t c = 0; c < m; ++c) {
        perm[static_cast<std::size_t>(match_col[c])] = c;
    }
    return perm;
}

// Perfect matching maximizing the smallest matched entry.
inline std::optional<std::vector<std::size_t>> bottleneck_matching(const Eigen::MatrixXd &a, double floor) {
    std::vector<double> vals;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a.data()[i] > floor) {
            vals.push_back(a.data()[i]);
        }
    }
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    if (vals.empty() || !perfect_matching(a, floor)) {
        return std::nullopt;
    }
    std::size_t lo = 0;
    std::size_t hi = vals.size() - 1;
    // Largest index k such that entries >= vals[k] admit a perfect matching.
    while (lo < hi) {
        const std::size_t mid = (lo + hi + 1) / 2;
        if (perfect_matching(a, std::nextafter(vals[mid], -1.0))) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    return perfect_matching(a, std::nextafter(vals[lo], -1.0));
}

inline Eigen::MatrixXd permutation_matrix(const std::vector<std::size_t> &perm) {
    const auto m = static_cast<Eigen::Index>(perm.size());
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        p(i, static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)])) = 1.0;
    }
    return p;
}

// Carathéodory pruning: keeps the same convex combination with at most
// dim + 1 affinely independent permutation matrices.
inline void prune_affine(std::vector<BirkhoffTerm> &terms, std::size_t max_terms) {
    while (terms.size() > max_terms) {
        const auto k = static_cast<Eigen::Index>(terms.size());
        const Eigen::Index m = static_cast<Eigen::Index>(terms.front().perm.size());
        Eigen::MatrixXd vecs(m * m + 1, k);
        for (Eigen::Index t = 0; t < k; ++t) {
            const auto p = permutation_matrix(terms[static_cast<std::size_t>(t)].perm);
            vecs.col(t).head(m * m) = Eigen::Map<const Eigen::VectorXd>(p.data(), m * m);
            vecs(m * m, t) = 1.0;
        }
        const Eigen::MatrixXd ker = vecs.fullPivLu().kernel();
        if (ker.cols() == 0 || ker.col(0).cwiseAbs().maxCoeff() == 0.0) {
            return;
        }
        Eigen::VectorXd alpha = ker.col(0);
        if (alpha.maxCoeff() <= 0.0) {
            alpha = -alpha;
        }
        double theta = std::numeric_limits<double>::infinity();
        Eigen::Index drop = -1;
        for (Eigen::Index t = 0; t < k; ++t) {
            if (alpha(t) > 1e-14) {
                const double r = terms[static_cast<std::size_t>(t)].weight / alpha(t);
                if (r < theta) {
                    theta = r;
                    drop = t;
                }
            }
        }
        for (Eigen::Index t = 0; t < k; ++t) {
            terms[static_cast<std::size_t>(t)].weight -= theta * alpha(t);
        }
        terms.erase(terms.begin() + drop);
        std::erase_if(terms, [](const BirkhoffTerm &t) { return t.weight <= 0.0; });
    }
}

} // namespace detail

/// Convex decomposition of a doubly stochastic matrix into permutations.
inline std::vector<BirkhoffTerm> birkhoff_decompose(const BistochasticMatrix &b) {
    if (!b.space().is_uniform(1e-12)) {
        throw Error(ErrorKind::NotUniform, "Birkhoff decomposition needs equal atom masses");
    }
    const Eigen::MatrixXd &a = b.matrix();
    const Eigen::Index m = a.rows();
    const double defect = std::max((a.rowwise().sum().array() - 1.0).abs().maxCoeff(),
                                   (a.colwise().sum().array() - 1.0).abs().maxCoeff());
    if (defect > 1e-9 || a.minCoeff() < -1e-12) {
        throw Error(ErrorKind::NotDoublyStochastic, "matrix is not doubly stochastic");
    }
    Eigen::MatrixXd rest = a.cwiseMax(0.0);
    std::vector<BirkhoffTerm> terms;
    const double floor = 1e-13;
    double remaining = 1.0;
    while (remaining > 1e-12) {
        const auto perm = detail::bottleneck_matching(rest, floor);
        if (!perm) {
            break;
        }
        double w = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < m; ++i) {
            w = std::min(w, rest(i, static_cast<Eigen::Index>((*perm)[static_cast<std::size_t>(i)])));
        }
        for (Eigen::Index i = 0; i < m; ++i) {
            double &e = rest(i, static_cast<Eigen::Index>((*perm)[static_cast<std::size_t>(i)]));
            e = std::max(0.0, e - w);
        }
        terms.push_back({w, *perm});
        remaining -= w;
    }
    detail::prune_affine(terms, static_cast<std::size_t>((m - 1) * (m - 1) + 1));
    double total = 0.0;
    for (const auto &t : terms) {
        total += t.weight;
    }
    for (auto &t : terms) {
        t.weight /= total;
    }
    return terms;
}

inline Eigen::MatrixXd birkhoff_reconstruct(const std::vector<BirkhoffTerm> &terms, Eigen::Index m) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
    for (const auto &t : terms) {
        out += t.weight * detail::permutation_matrix(t.perm);
    }
    return out;
}

/// Hinge functions t -> max(t - c, 0) at every value of f and g, plus t -> t and t -> -t.
inline std::vector<std::function<double(double)>> hinge_family(const ClassicalFunction &f,
                                                               const ClassicalFunction &g) {
    std::vector<std::function<double(double)>> out;
    std::vector<double> cuts = f.real_values();
    const auto gv = g.real_values();
    cuts.insert(cuts.end(), gv.begin(), gv.end());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (double c : cuts) {
        out.emplace_back([c](double t) { return std::max(t - c, 0.0); });
    }
    out.emplace_back([](double t) { return t; });
    out.emplace_back([](double t) { return -t; });
    return out;
}

/// Checks int psi(f) <= int psi(g) for every psi in the family.
inline bool convex_function_test(const ClassicalFunction &f, const ClassicalFunction &g,
                                 const std::vector<std::function<double(double)>> &family,
                                 double tol = 1e-9) {
    const auto fv = f.real_values();
    const auto gv = g.real_values();
    for (const auto &psi : family) {
        double lf = 0.0;
        double lg = 0.0;
        double scale = 1.0;
        for (std::size_t i = 0; i < fv.size(); ++i) {
            const double v = f.space().mass(i) * psi(fv[i]);
            lf += v;
            scale = std::max(scale, std::abs(v));
        }
        for (std::size_t i = 0; i < gv.size(); ++i) {
            const double v = g.space().mass(i) * psi(gv[i]);
            lg += v;
            scale = std::max(scale, std::abs(v));
        }
        if (lf > lg + tol * scale) {
            return false;
        }
    }
    return true;
}

inline bool convex_function_test(const ClassicalFunction &f, const ClassicalFunction &g, double tol = 1e-9) {
    return convex_function_test(f, g, hinge_family(f, g), tol);
}

} // namespace qrv
