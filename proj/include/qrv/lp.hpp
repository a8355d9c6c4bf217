#pragma once

// Two-phase dense tableau simplex for
//
//     minimize c^T x  subject to  A x = b,  x >= 0
//
// with Bland's rule for termination. Infeasibility is reported with a Farkas
// vector y (A^T y <= 0, b^T y > 0); optimality with a dual vector y
// (A^T y <= c). Final primal and dual values are recomputed from the optimal
// basis with an LU solve, and every certificate is re-checked before return.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qrv/error.hpp"

namespace qrv {

struct LpProblem {
    Eigen::VectorXd c;
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Eigen::VectorXd x;     // Optimal
    Eigen::VectorXd y;     // Optimal: dual; Infeasible: Farkas vector (max-norm 1)
    Eigen::VectorXd ray;   // Unbounded: A ray = 0, ray >= 0, c^T ray < 0
    double objective = 0.0;
    double primal_residual = 0.0;
    double dual_residual = 0.0; // Optimal: max(A^T y - c)_+; Infeasible: max(A^T y)_+
    double farkas_pairing = 0.0;
    int iterations = 0;
};

struct LpOptions {
    double pivot_tol = 1e-10;
    double feas_tol = 1e-9;
    int max_iterations = 200000;
};

/// Independent check of a Farkas certificate: A^T y <= tol and b^T y > min_pairing.
inline bool verify_farkas(const LpProblem &p, const Eigen::VectorXd &y, double tol = 1e-9,
                          double min_pairing = 1e-8) {
    if (y.size() != p.A.rows()) {
        return false;
    }
    const Eigen::VectorXd aty = p.A.transpose() * y;
    const double worst = aty.size() ? aty.maxCoeff() : -1.0;
    return worst <= tol && p.b.dot(y) > min_pairing;
}

namespace detail {

class Tableau {
  public:
    Tableau(const Eigen::MatrixXd &a, const Eigen::VectorXd &b)
        : rows_(a.rows()), cols_(a.cols() + a.rows()), t_(a.rows() + 1, a.cols() + a.rows() + 1),
          basis_(static_cast<std::size_t>(a.rows())) {
        t_.setZero();
        t_.topLeftCorner(rows_, a.cols()) = a;
        t_.block(0, a.cols(), rows_, rows_).setIdentity();
        t_.col(cols_).head(rows_) = b;
        for (Eigen::Index i = 0; i < rows_; ++i) {
            basis_[static_cast<std::size_t>(i)] = a.cols() + i;
        }
        active_.assign(static_cast<std::size_t>(rows_), true);
    }

    void set_costs(const Eigen::VectorXd &cost) {
        cost_ = cost;
        t_.row(rows_).setZero();
        t_.row(rows_).head(cols_) = cost.transpose();
        for (Eigen::Index i = 0; i < rows_; ++i) {
            if (!active_[static_cast<std::size_t>(i)]) {
                continue;
            }
            const double cb = cost(basis_[static_cast<std::size_t>(i)]);
            if (cb != 0.0) {
                t_.row(rows_) -= cb * t_.row(i);
            }
        }
    }

    void pivot(Eigen::Index r, Eigen::Index col) {
        t_.row(r) /= t_(r, col);
        for (Eigen::Index i = 0; i <= rows_; ++i) {
            if (i != r && t_(i, col) != 0.0) {
                t_.row(i) -= t_(i, col) * t_.row(r);
            }
        }
        basis_[static_cast<std::size_t>(r)] = col;
    }

    // Returns -1 at optimum, -2 when unbounded (entering column stored).
    int step(Eigen::Index allowed_cols, const LpOptions &opt, Eigen::Index &entering) {
        entering = -1;
        const double scale = 1.0 + cost_.cwiseAbs().maxCoeff();
        for (Eigen::Index j = 0; j < allowed_cols; ++j) {
            if (t_(rows_, j) < -opt.pivot_tol * scale) {
                entering = j;
                break;
            }
        }
        if (entering < 0) {
            return -1;
        }
        Eigen::Index leave = -1;
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < rows_; ++i) {
            if (!active_[static_cast<std::size_t>(i)] || t_(i, entering) <= opt.pivot_tol) {
                continue;
            }
            const double ratio = t_(i, cols_) / t_(i, entering);
            const double slack = 1e-14 * (1.0 + std::abs(best));
            const bool better = leave < 0 || ratio < best - slack;
            const bool tie = !better && ratio <= best + slack;
            if (better || (tie && leave >= 0 &&
                           basis_[static_cast<std::size_t>(i)] <
                               basis_[static_cast<std::size_t>(leave)])) {
                best = std::min(best, ratio);
                leave = i;
            }
        }
        if (leave < 0) {
            return -2;
        }
        pivot(leave, entering);
        return static_cast<int>(leave);
    }

    double objective() const { return -t_(rows_, cols_); }
    double rhs(Eigen::Index i) const { return t_(i, cols_); }
    double entry(Eigen::Index i, Eigen::Index j) const { return t_(i, j); }
    Eigen::Index rows() const { return rows_; }
    Eigen::Index basic(Eigen::Index i) const { return basis_[static_cast<std::size_t>(i)]; }
    bool active(Eigen::Index i) const { return active_[static_cast<std::size_t>(i)]; }
    void deactivate(Eigen::Index i) { active_[static_cast<std::size_t>(i)] = false; }

  private:
    Eigen::Index rows_;
    Eigen::Index cols_;
    Eigen::MatrixXd t_;
    Eigen::VectorXd cost_;
    std::vector<Eigen::Index> basis_;
    std::vector<bool> active_;
};

// A dropped tableau row keeps an artificial basic; the original row it stands
// for is redundant. Returns the kept original rows and the basic columns.
inline std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>> kept_basis(const Tableau &tab, Eigen::Index n) {
    std::vector<bool> keep(static_cast<std::size_t>(tab.rows()), true);
    std::vector<Eigen::Index> cols;
    for (Eigen::Index i = 0; i < tab.rows(); ++i) {
        if (tab.active(i)) {
            cols.push_back(tab.basic(i));
        } else {
            keep[static_cast<std::size_t>(tab.basic(i) - n)] = false;
        }
    }
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < tab.rows(); ++i) {
        if (keep[static_cast<std::size_t>(i)]) {
            rows.push_back(i);
        }
    }
    return {rows, cols};
}

// Solves B^T y = c_B over kept rows of [A | I]; redundant rows get y = 0.
inline Eigen::VectorXd basis_dual(const Tableau &tab, const Eigen::MatrixXd &a_ext, const Eigen::VectorXd &cost,
                                  Eigen::Index n) {
    const auto [rows, cols] = kept_basis(tab, n);
    const auto k = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd basis(k, k);
    Eigen::VectorXd cb(k);
    for (Eigen::Index r = 0; r < k; ++r) {
        const Eigen::Index col = cols[static_cast<std::size_t>(r)];
        for (Eigen::Index i = 0; i < k; ++i) {
            basis(i, r) = a_ext(rows[static_cast<std::size_t>(i)], col);
        }
        cb(r) = cost(col);
    }
    Eigen::VectorXd y = Eigen::VectorXd::Zero(tab.rows());
    if (k > 0) {
        const Eigen::VectorXd ya = basis.transpose().fullPivLu().solve(cb);
        for (Eigen::Index i = 0; i < k; ++i) {
            y(rows[static_cast<std::size_t>(i)]) = ya(i);
        }
    }
    return y;
}

inline Eigen::VectorXd basis_primal(const Tableau &tab, const Eigen::MatrixXd &a_ext,
                                    const Eigen::VectorXd &b, Eigen::Index n) {
    const auto [rows, cols] = kept_basis(tab, n);
    const auto k = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd basis(k, k);
    Eigen::VectorXd rhs(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        rhs(i) = b(rows[static_cast<std::size_t>(i)]);
        for (Eigen::Index r = 0; r < k; ++r) {
            basis(i, r) = a_ext(rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(r)]);
        }
    }
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    if (k > 0) {
        const Eigen::VectorXd xb = basis.fullPivLu().solve(rhs);
        for (Eigen::Index r = 0; r < k; ++r) {
            const Eigen::Index col = cols[static_cast<std::size_t>(r)];
            if (col < n) {
                x(col) = std::max(0.0, xb(r));
            }
        }
    }
    return x;
}

} // namespace detail

inline LpResult lp_solve(const LpProblem &p, const LpOptions &opt = {}) {
    const Eigen::Index m = p.A.rows();
    const Eigen::Index n = p.A.cols();
    if (p.b.size() != m || p.c.size() != n) {
        throw Error(ErrorKind::DimMismatch, "LP dimensions are inconsistent");
    }
    if (!p.A.allFinite() || !p.b.allFinite() || !p.c.allFinite()) {
        throw Error(ErrorKind::NonFinite, "LP data must be finite");
    }

    // Flip rows so that b >= 0; sign(i) maps the flipped system back.
    Eigen::VectorXd sign = Eigen::VectorXd::Ones(m);
    Eigen::MatrixXd a = p.A;
    Eigen::VectorXd b = p.b;
    for (Eigen::Index i = 0; i < m; ++i) {
        if (b(i) < 0.0) {
            sign(i) = -1.0;
            a.row(i) *= -1.0;
            b(i) = -b(i);
        }
    }
    Eigen::MatrixXd a_ext(m, n + m);
    a_ext << a, Eigen::MatrixXd::Identity(m, m);

    detail::Tableau tab(a, b);
    LpResult res;
    Eigen::Index entering = -1;

    // Phase 1.
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n + m);
    phase1.tail(m).setOnes();
    tab.set_costs(phase1);
    for (;;) {
        if (++res.iterations > opt.max_iterations) {
            throw Error(ErrorKind::CycleLimit, "simplex iteration cap in phase 1");
        }
        const int r = tab.step(n + m, opt, entering);
        if (r == -1) {
            break;
        }
        if (r == -2) {
            throw Error(ErrorKind::CycleLimit, "phase 1 reported unbounded (numerical failure)");
        }
    }
    const double bscale = 1.0 + b.cwiseAbs().maxCoeff();
    if (tab.objective() > opt.feas_tol * bscale) {
        Eigen::VectorXd y = detail::basis_dual(tab, a_ext, phase1, n);
        y = sign.cwiseProduct(y);
        const double ymax = y.cwiseAbs().maxCoeff();
        if (ymax > 0.0) {
            y /= ymax;
        }
        res.status = LpStatus::Infeasible;
        res.y = y;
        const Eigen::VectorXd aty = p.A.transpose() * y;
        res.dual_residual = std::max(0.0, n ? aty.maxCoeff() : 0.0);
        res.farkas_pairing = p.b.dot(y);
        return res;
    }

    // Drive zero-level artificials out of the basis; drop redundant rows.
    for (Eigen::Index i = 0; i < m; ++i) {
        if (tab.basic(i) < n) {
            continue;
        }
        Eigen::Index col = -1;
        double best = opt.pivot_tol;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (std::abs(tab.entry(i, j)) > best) {
                best = std::abs(tab.entry(i, j));
                col = j;
            }
        }
        if (col >= 0) {
            tab.pivot(i, col);
        } else {
            tab.deactivate(i);
        }
    }

    // Phase 2: artificial columns may not re-enter.
    Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(n + m);
    phase2.head(n) = p.c;
    tab.set_costs(phase2);
    for (;;) {
        if (++res.iterations > opt.max_iterations) {
            throw Error(ErrorKind::CycleLimit, "simplex iteration cap in phase 2");
        }
        const int r = tab.step(n, opt, entering);
        if (r == -1) {
            break;
        }
        if (r == -2) {
            res.status = LpStatus::Unbounded;
            res.ray = Eigen::VectorXd::Zero(n);
            res.ray(entering) = 1.0;
            for (Eigen::Index i = 0; i < m; ++i) {
                if (tab.active(i) && tab.basic(i) < n) {
                    res.ray(tab.basic(i)) = std::max(0.0, -tab.entry(i, entering));
                }
            }
            return res;
        }
    }

    res.status = LpStatus::Optimal;
    res.x = detail::basis_primal(tab, a_ext, b, n);
    Eigen::VectorXd y = detail::basis_dual(tab, a_ext, phase2, n);
    res.y = sign.cwiseProduct(y);
    res.objective = p.c.dot(res.x);
    res.primal_residual = m ? (p.A * res.x - p.b).cwiseAbs().maxCoeff() : 0.0;
    const Eigen::VectorXd slack = p.A.transpose() * res.y - p.c;
    res.dual_residual = std::max(0.0, n ? slack.maxCoeff() : 0.0);
    return res;
}


/// Convenience front end for LPs with free variables and inequality rows.
/// Rows are converted to the standard equality form with slack variables.
class LpBuilder {
  public:
    enum class Var { NonNeg, Free };
    enum class Row { Le, Eq, Ge };

    Eigen::Index add_var(Var kind = Var::NonNeg, double cost = 0.0) {
        kinds_.push_back(kind);
        cost_.push_back(cost);
        return static_cast<Eigen::Index>(kinds_.size()) - 1;
    }

    /// Sparse row: sum coeff * x[var] (<=|=|>=) rhs.
    void add_row(std::vector<std::pair<Eigen::Index, double>> terms, Row kind, double rhs) {
        rows_.push_back({std::move(terms), kind, rhs});
    }

    [[nodiscard]] Eigen::Index num_vars() const { return static_cast<Eigen::Index>(kinds_.size()); }

    struct Solution {
        LpStatus status = LpStatus::Infeasible;
        Eigen::VectorXd x;  // original variables
        double objective = 0.0;
        LpResult raw;
    };

    /// Minimizes the accumulated cost.
    [[nodiscard]] Solution minimize(const LpOptions &opt = {}) const {
        const auto nvar = kinds_.size();
        std::vector<Eigen::Index> pos(nvar);
        std::vector<Eigen::Index> neg(nvar, -1);
        Eigen::Index n = 0;
        for (std::size_t v = 0; v < nvar; ++v) {
            pos[v] = n++;
            if (kinds_[v] == Var::Free) {
                neg[v] = n++;
            }
        }
        const Eigen::Index first_slack = n;
        for (const auto &r : rows_) {
            if (r.kind != Row::Eq) {
                ++n;
            }
        }
        const auto m = static_cast<Eigen::Index>(rows_.size());
        LpProblem p;
        p.A = Eigen::MatrixXd::Zero(m, n);
        p.b = Eigen::VectorXd::Zero(m);
        p.c = Eigen::VectorXd::Zero(n);
        for (std::size_t v = 0; v < nvar; ++v) {
            p.c(pos[v]) = cost_[v];
            if (neg[v] >= 0) {
                p.c(neg[v]) = -cost_[v];
            }
        }
        Eigen::Index slack = first_slack;
        for (Eigen::Index i = 0; i < m; ++i) {
            const auto &r = rows_[static_cast<std::size_t>(i)];
            for (const auto &[v, a] : r.terms) {
                p.A(i, pos[static_cast<std::size_t>(v)]) += a;
                if (neg[static_cast<std::size_t>(v)] >= 0) {
                    p.A(i, neg[static_cast<std::size_t>(v)]) -= a;
                }
            }
            if (r.kind == Row::Le) {
                p.A(i, slack++) = 1.0;
            } else if (r.kind == Row::Ge) {
                p.A(i, slack++) = -1.0;
            }
            p.b(i) = r.rhs;
        }
        Solution sol;
        sol.raw = lp_solve(p, opt);
        sol.status = sol.raw.status;
        if (sol.status == LpStatus::Optimal) {
            sol.x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nvar));
            for (std::size_t v = 0; v < nvar; ++v) {
                double val = sol.raw.x(pos[v]);
                if (neg[v] >= 0) {
                    val -= sol.raw.x(neg[v]);
                }
                sol.x(static_cast<Eigen::Index>(v)) = val;
            }
            sol.objective = sol.raw.objective;
        }
        return sol;
    }

  private:
    struct RowData {
        std::vector<std::pair<Eigen::Index, double>> terms;
        Row kind;
        double rhs;
    };
    std::vector<Var> kinds_;
    std::vector<double> cost_;
    std::vector<RowData> rows_;
};

} // namespace qrv
