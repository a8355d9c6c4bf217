#pragma once

// POVMs on atomic spaces, operator-valued random variables and their integrals.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "qrv/error.hpp"
#include "qrv/linalg.hpp"
#include "qrv/measure.hpp"

namespace qrv {

class Povm {
  public:
    Povm(FiniteMeasureSpace space, Eigen::Index dim, std::vector<HermitianOperator> effects,
         double tol = kPsdTol)
        : space_(std::move(space)), dim_(dim), effects_(std::move(effects)) {
        if (dim_ <= 0) {
            throw Error(ErrorKind::DimMismatch, "POVM dimension must be positive");
        }
        if (effects_.size() != space_.size()) {
            throw Error(ErrorKind::DimMismatch, "one effect per atom is required");
        }
        for (std::size_t i = 0; i < effects_.size(); ++i) {
            if (effects_[i].dim() != dim_) {
                throw Error(ErrorKind::DimMismatch, "effect dimension differs from POVM dimension");
            }
            if (!is_psd(effects_[i], tol)) {
                throw Error(ErrorKind::MatrixNotPsd, "effect at atom '" + space_.labels()[i] + "' is not PSD");
            }
            null_.push_back(operator_norm(effects_[i]) <= tol);
        }
    }

    /// nu = mu I.
    static Povm scalar(const FiniteMeasureSpace &space, Eigen::Index dim) {
        std::vector<HermitianOperator> effects;
        for (double m : space.masses()) {
            effects.push_back(m * HermitianOperator::identity(dim));
        }
        return {space, dim, effects};
    }

    [[nodiscard]] const FiniteMeasureSpace &space() const { return space_; }
    [[nodiscard]] Eigen::Index dim() const { return dim_; }
    [[nodiscard]] std::size_t size() const { return effects_.size(); }
    [[nodiscard]] const HermitianOperator &effect(std::size_t i) const { return effects_[i]; }
    [[nodiscard]] const std::vector<HermitianOperator> &effects() const { return effects_; }
    /// Atoms whose effect vanishes; they take part in no sum or supremum.
    [[nodiscard]] bool is_null(std::size_t i) const { return null_[i]; }

    [[nodiscard]] HermitianOperator total() const {
        HermitianOperator acc = HermitianOperator::zero(dim_);
        for (const auto &e : effects_) {
            acc = acc + e;
        }
        return acc;
    }

    [[nodiscard]] bool is_quantum_probability(double tol = 1e-9) const {
        return (total().matrix() - CMatrix::Identity(dim_, dim_)).cwiseAbs().maxCoeff() <= tol;
    }

    /// True when every effect is a multiple of the identity (nu = mu I).
    [[nodiscard]] bool is_scalar(double tol = 1e-12) const {
        for (const auto &e : effects_) {
            const cplx c = e.trace() / static_cast<double>(dim_);
            if ((e.matrix() - c * CMatrix::Identity(dim_, dim_)).cwiseAbs().maxCoeff() > tol) {
                return false;
            }
        }
        return true;
    }

  private:
    FiniteMeasureSpace space_;
    Eigen::Index dim_;
    std::vector<HermitianOperator> effects_;
    std::vector<bool> null_;
};

class QuantumRandomVariable {
  public:
    QuantumRandomVariable(FiniteMeasureSpace space, Eigen::Index dim, std::vector<ComplexOperator> values)
        : space_(std::move(space)), dim_(dim), values_(std::move(values)) {
        if (values_.size() != space_.size()) {
            throw Error(ErrorKind::DimMismatch, "one value per atom is required");
        }
        for (const auto &v : values_) {
            if (v.dim() != dim_) {
                throw Error(ErrorKind::DimMismatch, "value dimension differs from declared dimension");
            }
        }
    }

    static QuantumRandomVariable constant(const FiniteMeasureSpace &space, const ComplexOperator &a) {
        return {space, a.dim(), std::vector<ComplexOperator>(space.size(), a)};
    }

    static QuantumRandomVariable from_hermitian(const FiniteMeasureSpace &space,
                                                const std::vector<HermitianOperator> &values) {
        const Eigen::Index d = values.empty() ? 0 : values.front().dim();
        return {space, d, std::vector<ComplexOperator>(values.begin(), values.end())};
    }

    [[nodiscard]] const FiniteMeasureSpace &space() const { return space_; }
    [[nodiscard]] Eigen::Index dim() const { return dim_; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }
    [[nodiscard]] const ComplexOperator &operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] const std::vector<ComplexOperator> &values() const { return values_; }

    [[nodiscard]] bool is_self_adjoint(double tol = 1e-12) const {
        return std::all_of(values_.begin(), values_.end(), [tol](const ComplexOperator &v) {
            return v.hermitian_defect() <= tol * (1.0 + v.matrix().cwiseAbs().maxCoeff());
        });
    }

    [[nodiscard]] std::vector<HermitianOperator> hermitian_values(double tol = 1e-12) const {
        if (!is_self_adjoint(tol)) {
            throw Error(ErrorKind::NotSelfAdjoint, "random variable is not self-adjoint");
        }
        std::vector<HermitianOperator> out;
        out.reserve(values_.size());
        for (const auto &v : values_) {
            out.push_back(HermitianOperator::real_part(v));
        }
        return out;
    }

    template <class F>
    [[nodiscard]] QuantumRandomVariable map(F &&fn) const {
        std::vector<ComplexOperator> out;
        out.reserve(values_.size());
        for (std::size_t i = 0; i < values_.size(); ++i) {
            out.push_back(fn(values_[i], i));
        }
        return {space_, dim_, out};
    }

    [[nodiscard]] QuantumRandomVariable adjoint() const {
        return map([](const ComplexOperator &v, std::size_t) { return v.adjoint(); });
    }

    friend QuantumRandomVariable operator+(const QuantumRandomVariable &a, const QuantumRandomVariable &b) {
        check_compatible(a, b);
        return a.map([&](const ComplexOperator &v, std::size_t i) { return v + b[i]; });
    }
    friend QuantumRandomVariable operator-(const QuantumRandomVariable &a, const QuantumRandomVariable &b) {
        check_compatible(a, b);
        return a.map([&](const ComplexOperator &v, std::size_t i) { return v - b[i]; });
    }
    friend QuantumRandomVariable operator*(cplx s, const QuantumRandomVariable &a) {
        return a.map([&](const ComplexOperator &v, std::size_t) { return s * v; });
    }

  private:
    static void check_compatible(const QuantumRandomVariable &a, const QuantumRandomVariable &b) {
        require_same_space(a.space(), b.space());
        if (a.dim() != b.dim()) {
            throw Error(ErrorKind::DimMismatch, "random variables have different dimensions");
        }
    }

    FiniteMeasureSpace space_;
    Eigen::Index dim_;
    std::vector<ComplexOperator> values_;
};

inline void require_compatible(const QuantumRandomVariable &f, const Povm &nu) {
    require_same_space(f.space(), nu.space());
    if (f.dim() != nu.dim()) {
        throw Error(ErrorKind::DimMismatch, "random variable and POVM act on different spaces");
    }
}

/// nu_rho(x) = tr(rho nu(x)), one value per atom.
inline std::vector<double> induced_measure(const Povm &nu, const State &rho, bool require_full_rank = false) {
    if (rho.dim() != nu.dim()) {
        throw Error(ErrorKind::DimMismatch, "state and POVM dimensions differ");
    }
    const bool full = rho.is_full_rank();
    if (require_full_rank && !full) {
        throw Error(ErrorKind::FullRankRequired, "state is not full rank");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < nu.size(); ++i) {
        const double v = std::max(0.0, trace_pairing(rho.op(), nu.effect(i)).real());
        if (full && !nu.is_null(i) && v <= kPsdTol * operator_norm(nu.effect(i))) {
            throw Error(ErrorKind::InconsistentNullSet,
                        "atom '" + nu.space().labels()[i] + "' is null for a full-rank state");
        }
        out.push_back(v);
    }
    return out;
}

class RnDerivative {
  public:
    RnDerivative(const Povm &nu, const State &rho) : rho_(rho) {
        if (!rho.is_full_rank()) {
            throw Error(ErrorKind::FullRankRequired, "Radon-Nikodym derivative needs a full-rank state");
        }
        masses_ = induced_measure(nu, rho, true);
        for (std::size_t i = 0; i < nu.size(); ++i) {
            if (nu.is_null(i)) {
                d_.push_back(HermitianOperator::zero(nu.dim()));
            } else {
                if (masses_[i] <= 0.0) {
                    throw Error(ErrorKind::DivisionByZeroMass, "atom has zero induced mass");
                }
                d_.push_back((1.0 / masses_[i]) * nu.effect(i));
            }
            sqrt_.push_back(psd_sqrt(d_.back()));
        }
    }

    [[nodiscard]] const State &state() const { return rho_; }
    [[nodiscard]] const std::vector<double> &induced() const { return masses_; }
    [[nodiscard]] const HermitianOperator &operator[](std::size_t i) const { return d_[i]; }
    [[nodiscard]] const HermitianOperator &sqrt(std::size_t i) const { return sqrt_[i]; }
    [[nodiscard]] std::size_t size() const { return d_.size(); }

    /// max_x ||D(x)|| over atoms of positive mass.
    [[nodiscard]] double sup_norm() const {
        double out = 0.0;
        for (std::size_t i = 0; i < d_.size(); ++i) {
            if (masses_[i] > 0.0) {
                out = std::max(out, operator_norm(d_[i]));
            }
        }
        return out;
    }

    [[nodiscard]] bool invertible(double tol = 1e-12) const {
        for (std::size_t i = 0; i < d_.size(); ++i) {
            if (masses_[i] > 0.0 && lambda_min(d_[i]) <= tol * (1.0 + operator_norm(d_[i]))) {
                return false;
            }
        }
        return true;
    }

    /// max_x ||D(x)^-1||; requires invertible().
    [[nodiscard]] double inverse_sup_norm() const {
        double out = 0.0;
        for (std::size_t i = 0; i < d_.size(); ++i) {
            if (masses_[i] > 0.0) {
                out = std::max(out, 1.0 / lambda_min(d_[i]));
            }
        }
        return out;
    }

  private:
    State rho_;
    std::vector<double> masses_;
    std::vector<HermitianOperator> d_;
    std::vector<HermitianOperator> sqrt_;
};

inline RnDerivative rn_derivative(const Povm &nu, const State &rho) { return {nu, rho}; }

/// f_s(x) = tr(s D(x)^1/2 f(x) D(x)^1/2).
inline ClassicalFunction scalarize(const QuantumRandomVariable &f, const RnDerivative &d, const State &s) {
    if (s.dim() != f.dim()) {
        throw Error(ErrorKind::DimMismatch, "state and random variable dimensions differ");
    }
    std::vector<cplx> out;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const CMatrix &r = d.sqrt(i).matrix();
        out.push_back((s.op().matrix() * r * f[i].matrix() * r).trace());
    }
    return {f.space(), out};
}

inline ClassicalFunction scalarize(const QuantumRandomVariable &f, const Povm &nu, const State &rho,
                                   const State &s) {
    require_compatible(f, nu);
    return scalarize(f, rn_derivative(nu, rho), s);
}

/// tr(s h) for a function on a nu = mu I space: f_s(x) = tr(s f(x)).
inline ClassicalFunction scalarize_plain(const QuantumRandomVariable &f, const HermitianOperator &s) {
    std::vector<cplx> out;
    for (std::size_t i = 0; i < f.size(); ++i) {
        out.push_back(trace_pairing(s, f[i]));
    }
    return {f.space(), out};
}

/// sum_x nu_rho(x) D(x)^1/2 f(x) D(x)^1/2
inline ComplexOperator integrate(const QuantumRandomVariable &f, const RnDerivative &d) {
    CMatrix acc = CMatrix::Zero(f.dim(), f.dim());
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (d.induced()[i] <= 0.0) {
            continue;
        }
        const CMatrix &r = d.sqrt(i).matrix();
        acc += d.induced()[i] * (r * f[i].matrix() * r);
    }
    return ComplexOperator(acc);
}

inline ComplexOperator integrate(const QuantumRandomVariable &f, const Povm &nu, const State &rho) {
    require_compatible(f, nu);
    return integrate(f, rn_derivative(nu, rho));
}

inline ComplexOperator integrate(const QuantumRandomVariable &f, const Povm &nu) {
    return integrate(f, nu, State::maximally_mixed(nu.dim()));
}

/// int g I dnu for a scalar function g.
inline ComplexOperator integrate_scalar(const ClassicalFunction &g, const Povm &nu) {
    require_same_space(g.space(), nu.space());
    CMatrix acc = CMatrix::Zero(nu.dim(), nu.dim());
    for (std::size_t i = 0; i < nu.size(); ++i) {
        acc += g[i] * nu.effect(i).matrix();
    }
    return ComplexOperator(acc);
}

/// Essential supremum of ||f(x)|| over atoms that nu does not annihilate.
inline double linf_norm(const QuantumRandomVariable &f, const Povm &nu) {
    require_compatible(f, nu);
    double out = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!nu.is_null(i)) {
            out = std::max(out, operator_norm(f[i]));
        }
    }
    return out;
}

/// Pointwise |f(x)|.
inline QuantumRandomVariable pointwise_abs(const QuantumRandomVariable &f) {
    return f.map([](const ComplexOperator &v, std::size_t) -> ComplexOperator { return abs_operator(v); });
}

/// Pointwise ||f(x)|| I.
inline QuantumRandomVariable pointwise_norm(const QuantumRandomVariable &f) {
    return f.map([&](const ComplexOperator &v, std::size_t) -> ComplexOperator {
        return operator_norm(v) * ComplexOperator::identity(f.dim());
    });
}

} // namespace qrv
