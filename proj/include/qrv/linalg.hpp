#pragma once

// Dense complex / Hermitian kernels used everywhere else in the library.
//
// Operators are immutable values wrapping an Eigen complex matrix. The
// Hermitian eigensolver is a cyclic complex Jacobi iteration, which converges
// for every Hermitian input and gives residuals near machine precision.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qrv/error.hpp"

namespace qrv {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Relative PSD tolerance shared by all modules unless overridden.
inline constexpr double kPsdTol = 1e-9;

class ComplexOperator {
  public:
    ComplexOperator() = default;

    explicit ComplexOperator(CMatrix m) : m_(std::move(m)) {
        if (m_.rows() != m_.cols()) {
            throw Error(ErrorKind::DimMismatch, "operator must be square, got " +
                                                    std::to_string(m_.rows()) + "x" +
                                                    std::to_string(m_.cols()));
        }
        if (!m_.allFinite()) {
            throw Error(ErrorKind::NonFinite, "operator entries must be finite");
        }
    }

    ComplexOperator(std::initializer_list<std::initializer_list<cplx>> rows)
        : ComplexOperator(from_rows(rows)) {}

    static ComplexOperator zero(Eigen::Index d) { return ComplexOperator(CMatrix::Zero(d, d)); }
    static ComplexOperator identity(Eigen::Index d) {
        return ComplexOperator(CMatrix::Identity(d, d));
    }

    [[nodiscard]] Eigen::Index dim() const { return m_.rows(); }
    [[nodiscard]] const CMatrix &matrix() const { return m_; }
    [[nodiscard]] cplx operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

    [[nodiscard]] ComplexOperator adjoint() const { return ComplexOperator(m_.adjoint()); }
    [[nodiscard]] cplx trace() const { return m_.trace(); }
    [[nodiscard]] double frobenius_norm() const { return m_.norm(); }

    /// Largest deviation from Hermitian symmetry.
    [[nodiscard]] double hermitian_defect() const {
        return (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
    }

    friend ComplexOperator operator+(const ComplexOperator &a, const ComplexOperator &b) {
        check_same_dim(a, b);
        return ComplexOperator(a.m_ + b.m_);
    }
    friend ComplexOperator operator-(const ComplexOperator &a, const ComplexOperator &b) {
        check_same_dim(a, b);
        return ComplexOperator(a.m_ - b.m_);
    }
    friend ComplexOperator operator*(const ComplexOperator &a, const ComplexOperator &b) {
        check_same_dim(a, b);
        return ComplexOperator(a.m_ * b.m_);
    }
    friend ComplexOperator operator*(cplx s, const ComplexOperator &a) {
        return ComplexOperator(s * a.m_);
    }
    friend ComplexOperator operator*(double s, const ComplexOperator &a) {
        return ComplexOperator(s * a.m_);
    }

  protected:
    static void check_same_dim(const ComplexOperator &a, const ComplexOperator &b) {
        if (a.dim() != b.dim()) {
            throw Error(ErrorKind::DimMismatch, "dimension " + std::to_string(a.dim()) +
                                                    " vs " + std::to_string(b.dim()));
        }
    }

    CMatrix m_;

  private:
    static CMatrix from_rows(std::initializer_list<std::initializer_list<cplx>> rows) {
        const auto n = static_cast<Eigen::Index>(rows.size());
        CMatrix m(n, n);
        Eigen::Index i = 0;
        for (const auto &row : rows) {
            if (static_cast<Eigen::Index>(row.size()) != n) {
                throw Error(ErrorKind::DimMismatch, "ragged matrix literal");
            }
            Eigen::Index j = 0;
            for (const auto &v : row) {
                m(i, j++) = v;
            }
            ++i;
        }
        return m;
    }
};

/// Self-adjoint operator. Symmetry is exact: the upper triangle is stored and
/// mirrored at construction, and the diagonal is forced real.
class HermitianOperator : public ComplexOperator {
  public:
    HermitianOperator() = default;

    HermitianOperator(std::initializer_list<std::initializer_list<cplx>> rows)
        : HermitianOperator(from(ComplexOperator(rows))) {}

    /// Throws NotHermitian when |A - A*| exceeds tol * (1 + max|A_ij|).
    static HermitianOperator from(const ComplexOperator &a, double tol = 1e-12) {
        const double scale = a.dim() == 0 ? 0.0 : a.matrix().cwiseAbs().maxCoeff();
        if (a.dim() > 0 && a.hermitian_defect() > tol * (1.0 + scale)) {
            throw Error(ErrorKind::NotHermitian,
                        "operator deviates from Hermitian symmetry by " +
                            std::to_string(a.hermitian_defect()));
        }
        return mirrored(a.matrix());
    }

    /// (A + A*) / 2, never throws.
    static HermitianOperator real_part(const ComplexOperator &a) {
        return mirrored(0.5 * (a.matrix() + a.matrix().adjoint()));
    }
    /// (A - A*) / 2i, never throws.
    static HermitianOperator imag_part(const ComplexOperator &a) {
        return mirrored((a.matrix() - a.matrix().adjoint()) / cplx(0.0, 2.0));
    }

    static HermitianOperator unchecked(const CMatrix &m) { return mirrored(m); }

    static HermitianOperator diagonal(const std::vector<double> &d) {
        CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(d.size()),
                                  static_cast<Eigen::Index>(d.size()));
        for (std::size_t i = 0; i < d.size(); ++i) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = d[i];
        }
        return mirrored(m);
    }
    static HermitianOperator identity(Eigen::Index d) { return mirrored(CMatrix::Identity(d, d)); }
    static HermitianOperator zero(Eigen::Index d) { return mirrored(CMatrix::Zero(d, d)); }

    /// K H K* is Hermitian for any K.
    [[nodiscard]] HermitianOperator congruence(const ComplexOperator &k) const {
        check_same_dim(*this, k);
        return mirrored(k.matrix() * m_ * k.matrix().adjoint());
    }

    friend HermitianOperator operator+(const HermitianOperator &a, const HermitianOperator &b) {
        check_same_dim(a, b);
        return mirrored(a.m_ + b.m_);
    }
    friend HermitianOperator operator-(const HermitianOperator &a, const HermitianOperator &b) {
        check_same_dim(a, b);
        return mirrored(a.m_ - b.m_);
    }
    friend HermitianOperator operator*(double s, const HermitianOperator &a) {
        return mirrored(s * a.m_);
    }

  private:
    static HermitianOperator mirrored(const CMatrix &m) {
        HermitianOperator h;
        const Eigen::Index n = m.rows();
        CMatrix out(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            out(i, i) = cplx(m(i, i).real(), 0.0);
            for (Eigen::Index j = i + 1; j < n; ++j) {
                out(i, j) = m(i, j);
                out(j, i) = std::conj(m(i, j));
            }
        }
        static_cast<ComplexOperator &>(h) = ComplexOperator(std::move(out));
        return h;
    }
};

struct EigenDecomposition {
    std::vector<double> values; // descending
    CMatrix vectors;            // orthonormal columns, values[k] <-> column k
};

/// Cyclic complex Jacobi. Throws EigenNoConvergence only if the sweep cap is hit.
inline EigenDecomposition hermitian_eigen(const HermitianOperator &a) {
    const Eigen::Index n = a.dim();
    CMatrix m = a.matrix();
    CMatrix v = CMatrix::Identity(n, n);
    const double scale = m.norm();

    auto off_norm = [&]() {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = i + 1; j < n; ++j) {
                s += std::norm(m(i, j));
            }
        }
        return std::sqrt(2.0 * s);
    };

    constexpr int kMaxSweeps = 100;
    int sweep = 0;
    for (; sweep < kMaxSweeps; ++sweep) {
        if (off_norm() <= 1e-16 * scale || scale == 0.0) {
            break;
        }
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double g = std::abs(m(p, q));
                if (g <= 1e-300 || g <= 1e-18 * scale) {
                    m(p, q) = m(q, p) = 0.0;
                    continue;
                }
                const cplx phase = m(p, q) / g;
                const double app = m(p, p).real();
                const double aqq = m(q, q).real();
                const double theta = (aqq - app) / (2.0 * g);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                // U restricted to (p, q) = diag(1, conj(phase)) * [[c, s], [-s, c]].
                const cplx upp = c;
                const cplx upq = s;
                const cplx uqp = -s * std::conj(phase);
                const cplx uqq = c * std::conj(phase);
                for (Eigen::Index k = 0; k < n; ++k) {
                    const cplx mkp = m(k, p);
                    const cplx mkq = m(k, q);
                    m(k, p) = mkp * upp + mkq * uqp;
                    m(k, q) = mkp * upq + mkq * uqq;
                    const cplx vkp = v(k, p);
                    const cplx vkq = v(k, q);
                    v(k, p) = vkp * upp + vkq * uqp;
                    v(k, q) = vkp * upq + vkq * uqq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const cplx mpk = m(p, k);
                    const cplx mqk = m(q, k);
                    m(p, k) = std::conj(upp) * mpk + std::conj(uqp) * mqk;
                    m(q, k) = std::conj(upq) * mpk + std::conj(uqq) * mqk;
                }
                m(p, q) = m(q, p) = 0.0;
                m(p, p) = m(p, p).real();
                m(q, q) = m(q, q).real();
            }
        }
    }
    if (sweep == kMaxSweeps) {
        throw Error(ErrorKind::EigenNoConvergence, "Jacobi sweep cap reached");
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
        return m(i, i).real() > m(j, j).real();
    });
    EigenDecomposition out;
    out.values.reserve(order.size());
    out.vectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        out.values.push_back(m(src, src).real());
        out.vectors.col(k) = v.col(src);
    }
    return out;
}

inline double lambda_max(const HermitianOperator &a) {
    return a.dim() == 0 ? 0.0 : hermitian_eigen(a).values.front();
}
inline double lambda_min(const HermitianOperator &a) {
    return a.dim() == 0 ? 0.0 : hermitian_eigen(a).values.back();
}

/// V diag(f(lambda)) V*.
template <class F>
HermitianOperator spectral_map(const EigenDecomposition &e, F &&fn) {
    const auto n = static_cast<Eigen::Index>(e.values.size());
    Eigen::VectorXd d(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d(i) = fn(e.values[static_cast<std::size_t>(i)]);
    }
    return HermitianOperator::unchecked(e.vectors * d.asDiagonal() * e.vectors.adjoint());
}

/// sqrt(lambda_max(A* A)); max |lambda| when A is Hermitian.
inline double operator_norm(const ComplexOperator &a) {
    if (a.dim() == 0) {
        return 0.0;
    }
    if (a.hermitian_defect() == 0.0) {
        const auto e = hermitian_eigen(HermitianOperator::unchecked(a.matrix()));
        return std::max(std::abs(e.values.front()), std::abs(e.values.back()));
    }
    const auto gram = HermitianOperator::unchecked(a.matrix().adjoint() * a.matrix());
    return std::sqrt(std::max(0.0, lambda_max(gram)));
}

inline bool is_psd(const HermitianOperator &a, double tol = kPsdTol) {
    if (a.dim() == 0) {
        return true;
    }
    const auto e = hermitian_eigen(a);
    const double norm = std::max(std::abs(e.values.front()), std::abs(e.values.back()));
    return e.values.back() >= -tol * (1.0 + norm);
}

struct PositiveParts {
    HermitianOperator positive;
    HermitianOperator negative;
    HermitianOperator absolute;
};

inline PositiveParts positive_parts(const HermitianOperator &a) {
    const auto e = hermitian_eigen(a);
    return {spectral_map(e, [](double x) { return std::max(x, 0.0); }),
            spectral_map(e, [](double x) { return std::max(-x, 0.0); }),
            spectral_map(e, [](double x) { return std::abs(x); })};
}

/// Validates Hermitian symmetry first (NotHermitian otherwise).
inline PositiveParts positive_parts(const ComplexOperator &a) {
    return positive_parts(HermitianOperator::from(a));
}

/// Eigenvalues in [-tol(1+|A|), 0) are clamped to zero.
inline HermitianOperator psd_sqrt(const HermitianOperator &a, double tol = kPsdTol) {
    const auto e = hermitian_eigen(a);
    if (a.dim() == 0) {
        return a;
    }
    const double norm = std::max(std::abs(e.values.front()), std::abs(e.values.back()));
    if (e.values.back() < -tol * (1.0 + norm)) {
        throw Error(ErrorKind::MatrixNotPsd,
                    "smallest eigenvalue " + std::to_string(e.values.back()));
    }
    return spectral_map(e, [](double x) { return std::sqrt(std::max(x, 0.0)); });
}

/// |A| = (A* A)^{1/2}.
inline HermitianOperator abs_operator(const ComplexOperator &a) {
    return psd_sqrt(HermitianOperator::unchecked(a.matrix().adjoint() * a.matrix()));
}

/// Moore-Penrose style inverse on the range; eigenvalues below cutoff are dropped.
inline HermitianOperator psd_pinv(const HermitianOperator &a, double cutoff) {
    return spectral_map(hermitian_eigen(a), [cutoff](double x) { return x > cutoff ? 1.0 / x : 0.0; });
}

inline cplx trace_pairing(const HermitianOperator &t, const ComplexOperator &a) {
    if (t.dim() != a.dim()) {
        throw Error(ErrorKind::DimMismatch, "trace pairing of " + std::to_string(t.dim()) +
                                                " and " + std::to_string(a.dim()));
    }
    return (t.matrix() * a.matrix()).trace();
}

/// Density operator: PSD within tolerance and unit trace within 1e-12.
class State {
  public:
    State() = default;

    explicit State(HermitianOperator sigma, double tol = kPsdTol) : sigma_(std::move(sigma)) {
        if (std::abs(sigma_.trace().real() - 1.0) > 1e-12) {
            throw Error(ErrorKind::NotAState,
                        "trace is " + std::to_string(sigma_.trace().real()));
        }
        if (!is_psd(sigma_, tol)) {
            throw Error(ErrorKind::NotAState, "state is not positive semidefinite");
        }
    }

    static State maximally_mixed(Eigen::Index d) {
        return State(HermitianOperator::unchecked(CMatrix::Identity(d, d) / static_cast<double>(d)));
    }

    /// Rescales a nonzero PSD operator to unit trace.
    static State normalized(const HermitianOperator &p) {
        const double tr = p.trace().real();
        if (!(tr > 0.0)) {
            throw Error(ErrorKind::NotAState, "cannot normalize an operator with trace <= 0");
        }
        return State((1.0 / tr) * p);
    }

    static State pure(const CVector &v) {
        const double n = v.norm();
        if (!(n > 0.0)) {
            throw Error(ErrorKind::NotAState, "zero vector");
        }
        const CVector u = v / n;
        return State(HermitianOperator::unchecked(u * u.adjoint()));
    }

    [[nodiscard]] const HermitianOperator &op() const { return sigma_; }
    [[nodiscard]] Eigen::Index dim() const { return sigma_.dim(); }

    [[nodiscard]] bool is_full_rank(double tol = kPsdTol) const {
        return lambda_min(sigma_) > tol;
    }

  private:
    HermitianOperator sigma_;
};

// Real coordinates of a d x d Hermitian matrix: the d diagonal entries, then
// (Re H_ij, Im H_ij) for i < j in row-major order. With this layout
// tr(T H) = sum_k w_k t_k h_k where w_k is 1 on the diagonal and 2 elsewhere.

inline Eigen::Index hermitian_coord_count(Eigen::Index d) { return d * d; }

inline Eigen::VectorXd hermitian_coords(const ComplexOperator &h) {
    const Eigen::Index d = h.dim();
    Eigen::VectorXd out(d * d);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < d; ++i) {
        out(k++) = h(i, i).real();
    }
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i + 1; j < d; ++j) {
            out(k++) = h(i, j).real();
            out(k++) = h(i, j).imag();
        }
    }
    return out;
}

inline Eigen::VectorXd hermitian_coord_weights(Eigen::Index d) {
    Eigen::VectorXd w = Eigen::VectorXd::Constant(d * d, 2.0);
    w.head(d).setOnes();
    return w;
}

inline HermitianOperator hermitian_from_coords(const Eigen::VectorXd &c, Eigen::Index d) {
    if (c.size() != d * d) {
        throw Error(ErrorKind::DimMismatch, "coordinate vector has wrong length");
    }
    CMatrix m = CMatrix::Zero(d, d);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < d; ++i) {
        m(i, i) = c(k++);
    }
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i + 1; j < d; ++j) {
            m(i, j) = cplx(c(k), c(k + 1));
            k += 2;
        }
    }
    return HermitianOperator::unchecked(m);
}

/// Basis E_k with H = sum_k coords(H)_k E_k.
inline std::vector<HermitianOperator> hermitian_basis(Eigen::Index d) {
    std::vector<HermitianOperator> basis;
    basis.reserve(static_cast<std::size_t>(d * d));
    for (Eigen::Index k = 0; k < d * d; ++k) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(d * d);
        c(k) = 1.0;
        basis.push_back(hermitian_from_coords(c, d));
    }
    return basis;
}

} // namespace qrv
