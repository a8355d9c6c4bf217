#pragma once

// JSON reading and writing. Complex scalars are [re, im] (plain numbers are
// accepted on input); matrices are row-major nested arrays.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qrv/error.hpp"
#include "qrv/l1norm.hpp"
#include "qrv/linalg.hpp"
#include "qrv/majorization.hpp"
#include "qrv/measure.hpp"
#include "qrv/povm.hpp"

namespace qrv::io {

using json = nlohmann::json;

/// Parses text; syntax errors report line and column.
inline json parse_text(const std::string &text, const std::string &source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error &e) {
        std::size_t line = 1;
        std::size_t col = 1;
        const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < upto; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw Error(ErrorKind::Validation,
                    source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
    }
}

inline json load_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Validation, "cannot open '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path);
}

inline void save_file(const std::string &path, const json &j) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorKind::Validation, "cannot write '" + path + "'");
    }
    out << j.dump(2) << "\n";
}

namespace detail {

[[noreturn]] inline void fail(const std::string &where, const std::string &what) {
    throw Error(ErrorKind::Validation, where + ": " + what);
}

inline const json &field(const json &j, const char *key, const std::string &where) {
    if (!j.is_object() || !j.contains(key)) {
        fail(where, std::string("missing field '") + key + "'");
    }
    return j.at(key);
}

} // namespace detail

inline cplx complex_from_json(const json &j, const std::string &where = "value") {
    if (j.is_number()) {
        return {j.get<double>(), 0.0};
    }
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    detail::fail(where, "expected a number or [re, im]");
}

inline json to_json(cplx z) { return json::array({z.real() + 0.0, z.imag() + 0.0}); }

inline CMatrix matrix_from_json(const json &j, const std::string &where = "matrix") {
    if (!j.is_array() || j.empty()) {
        detail::fail(where, "expected a non-empty array of rows");
    }
    const auto n = static_cast<Eigen::Index>(j.size());
    CMatrix m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto &row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
            detail::fail(where, "row " + std::to_string(r) + " does not have " + std::to_string(n) + " entries");
        }
        for (Eigen::Index c = 0; c < n; ++c) {
            m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)],
                                        where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
        }
    }
    if (!m.allFinite()) {
        detail::fail(where, "non-finite entry");
    }
    return m;
}

inline json to_json(const CMatrix &m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(to_json(m(r, c)));
        }
        rows.push_back(row);
    }
    return rows;
}

inline json to_json(const ComplexOperator &a) { return to_json(a.matrix()); }

inline json real_matrix_to_json(const Eigen::MatrixXd &m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(m(r, c) + 0.0);
        }
        rows.push_back(row);
    }
    return rows;
}

inline Eigen::MatrixXd real_matrix_from_json(const json &j, const std::string &where) {
    if (!j.is_array() || j.empty()) {
        detail::fail(where, "expected a non-empty array of rows");
    }
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (!j[static_cast<std::size_t>(r)].is_array() ||
            static_cast<Eigen::Index>(j[static_cast<std::size_t>(r)].size()) != cols) {
            detail::fail(where, "ragged matrix");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
        }
    }
    return m;
}

inline json vector_to_json(const Eigen::VectorXd &v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back(v(i) + 0.0);
    }
    return out;
}

inline Eigen::VectorXd vector_from_json(const json &j, const std::string &where) {
    if (!j.is_array()) {
        detail::fail(where, "expected an array of numbers");
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) {
            detail::fail(where, "entry " + std::to_string(i) + " is not a number");
        }
        v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return v;
}

inline FiniteMeasureSpace space_from_json(const json &j, const std::string &where = "space") {
    const auto &atoms = detail::field(j, "atoms", where);
    const auto &masses = detail::field(j, "masses", where);
    if (!atoms.is_array() || !masses.is_array()) {
        detail::fail(where, "'atoms' and 'masses' must be arrays");
    }
    std::vector<std::string> labels;
    for (const auto &a : atoms) {
        labels.push_back(a.is_string() ? a.get<std::string>() : a.dump());
    }
    std::vector<double> m;
    for (const auto &x : masses) {
        if (!x.is_number()) {
            detail::fail(where, "masses must be numbers");
        }
        m.push_back(x.get<double>());
    }
    return {labels, m};
}

inline json to_json(const FiniteMeasureSpace &s) {
    return json{{"atoms", s.labels()}, {"masses", s.masses()}};
}

inline ClassicalFunction classical_from_json(const json &j, const FiniteMeasureSpace &space,
                                             const std::string &where = "function") {
    const auto &vals = detail::field(j, "values", where);
    if (!vals.is_array() || vals.size() != space.size()) {
        detail::fail(where, "'values' must hold one entry per atom");
    }
    std::vector<cplx> v;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        v.push_back(complex_from_json(vals[i], where + ".values[" + std::to_string(i) + "]"));
    }
    return {space, v};
}

inline json to_json(const ClassicalFunction &f) {
    json vals = json::array();
    for (const auto &v : f.values()) {
        vals.push_back(to_json(v));
    }
    return json{{"values", vals}};
}

namespace detail {

inline FiniteMeasureSpace resolve_space(const json &j, const std::optional<FiniteMeasureSpace> &given,
                                        const std::string &where) {
    if (j.is_object() && j.contains("space")) {
        auto s = space_from_json(j.at("space"), where + ".space");
        if (given && !(s == *given)) {
            throw Error(ErrorKind::SpaceMismatch, where + ": embedded space differs from --space");
        }
        return s;
    }
    if (given) {
        return *given;
    }
    fail(where, "no 'space' field and no space supplied");
}

inline std::vector<CMatrix> atom_matrices(const json &j, const char *key, const FiniteMeasureSpace &space,
                                          Eigen::Index dim, const std::string &where) {
    const auto &m = field(j, key, where);
    if (!m.is_object()) {
        fail(where, std::string("'") + key + "' must map atom labels to matrices");
    }
    std::vector<CMatrix> out;
    for (const auto &label : space.labels()) {
        if (!m.contains(label)) {
            fail(where, std::string("'") + key + "' has no entry for atom '" + label + "'");
        }
        CMatrix a = matrix_from_json(m.at(label), where + "." + key + "." + label);
        if (a.rows() != dim) {
            throw Error(ErrorKind::DimMismatch, where + "." + key + "." + label + ": expected a " +
                                                    std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
        }
        out.push_back(std::move(a));
    }
    for (auto it = m.begin(); it != m.end(); ++it) {
        if (!space.index_of(it.key())) {
            fail(where, "unknown atom '" + it.key() + "'");
        }
    }
    return out;
}

inline Eigen::Index dim_of(const json &j, const std::string &where) {
    const auto &d = field(j, "dim", where);
    if (!d.is_number_integer() || d.get<long>() <= 0) {
        fail(where, "'dim' must be a positive integer");
    }
    return d.get<Eigen::Index>();
}

} // namespace detail

inline Povm povm_from_json(const json &j, const std::optional<FiniteMeasureSpace> &space = std::nullopt,
                           const std::string &where = "povm") {
    const auto s = detail::resolve_space(j, space, where);
    const auto d = detail::dim_of(j, where);
    std::vector<HermitianOperator> effects;
    const auto mats = detail::atom_matrices(j, "effects", s, d, where);
    for (std::size_t i = 0; i < mats.size(); ++i) {
        try {
            effects.push_back(HermitianOperator::from(ComplexOperator(mats[i]), 1e-12));
        } catch (const Error &e) {
            throw Error(e.kind(), where + ".effects." + s.labels()[i] + ": effect is not Hermitian");
        }
    }
    return {s, d, effects};
}

inline json to_json(const Povm &nu) {
    json eff = json::object();
    for (std::size_t i = 0; i < nu.size(); ++i) {
        eff[nu.space().labels()[i]] = to_json(nu.effect(i));
    }
    return json{{"space", to_json(nu.space())}, {"dim", nu.dim()}, {"effects", eff}};
}

inline QuantumRandomVariable qrv_from_json(const json &j, const std::optional<FiniteMeasureSpace> &space = std::nullopt,
                                           const std::string &where = "qrv") {
    const auto s = detail::resolve_space(j, space, where);
    const auto d = detail::dim_of(j, where);
    std::vector<ComplexOperator> values;
    for (auto &m : detail::atom_matrices(j, "values", s, d, where)) {
        values.emplace_back(std::move(m));
    }
    return {s, d, values};
}

inline json to_json(const QuantumRandomVariable &f) {
    json vals = json::object();
    for (std::size_t i = 0; i < f.size(); ++i) {
        vals[f.space().labels()[i]] = to_json(f[i]);
    }
    return json{{"space", to_json(f.space())}, {"dim", f.dim()}, {"values", vals}};
}

inline json atom_map(const FiniteMeasureSpace &space, const std::vector<HermitianOperator> &ops) {
    json out = json::object();
    for (std::size_t i = 0; i < ops.size(); ++i) {
        out[space.labels()[i]] = to_json(ops[i]);
    }
    return out;
}

inline std::vector<HermitianOperator> hermitian_atom_map(const json &j, const FiniteMeasureSpace &space,
                                                         Eigen::Index dim, const std::string &where) {
    json wrapper{{"m", j}};
    std::vector<HermitianOperator> out;
    for (const auto &m : detail::atom_matrices(wrapper, "m", space, dim, where)) {
        out.push_back(HermitianOperator::from(ComplexOperator(m), 1e-9));
    }
    return out;
}

/// A density matrix, either bare or as {"matrix": ...}.
inline State state_from_json(const json &j, const std::string &where = "state") {
    const json &m = j.is_object() ? detail::field(j, "matrix", where) : j;
    const auto h = HermitianOperator::from(ComplexOperator(matrix_from_json(m, where)), 1e-12);
    return State(h);
}

inline json l1_certificate_to_json(const L1Certificate &c, const Povm &nu, const QuantumRandomVariable &f,
                                   double tol) {
    const auto &s = f.space();
    return json{{"kind", "l1-seminorm"},
                {"povm", to_json(nu)},
                {"qrv", to_json(f)},
                {"tol", tol},
                {"value", c.value},
                {"dual_lower_bound", c.dual_lower_bound},
                {"gap", c.gap},
                {"converged", c.converged},
                {"iterations", c.iterations},
                {"decomposition",
                 {{"f1", atom_map(s, c.f1)}, {"f2", atom_map(s, c.f2)}, {"f3", atom_map(s, c.f3)}, {"f4", atom_map(s, c.f4)}}},
                {"dual", {{"state", to_json(c.state)}, {"W", atom_map(s, c.W)}, {"V", atom_map(s, c.V)}}}};
}

inline json majorization_to_json(const MajorizationCertificate &c, const QuantumRandomVariable &f,
                                  const QuantumRandomVariable &g) {
    json out{{"kind", "majorization"},
             {"order", std::string(to_string(c.order))},
             {"verdict", std::string(to_string(c.verdict))},
             {"exact", c.exact},
             {"space", to_json(f.space())},
             {"f", to_json(f)},
             {"g", to_json(g)}};
    if (c.witness) {
        out["witness"] = real_matrix_to_json(c.witness->matrix());
        out["witness_residual"] = c.witness_residual;
    }
    if (c.farkas.size() > 0) {
        out["farkas"] = vector_to_json(c.farkas);
        out["farkas_pairing"] = c.farkas_pairing;
        out["farkas_dual_residual"] = c.farkas_dual_residual;
    }
    if (c.order != Order::B) {
        out["totals_residual"] = c.totals_residual;
        json cont = json::array();
        for (const auto &k : c.containment) {
            cont.push_back({{"subset", k.subset}, {"lambda", vector_to_json(k.lambda)}, {"slack", k.slack}});
        }
        out["containment"] = cont;
        out["samples"] = c.samples;
        out["sample_refutations"] = c.sample_refutations;
    }
    if (c.refuting_t) {
        out["refuting_t"] = to_json(*c.refuting_t);
    }
    if (c.refuting_state) {
        out["refuting_state"] = to_json(*c.refuting_state);
    }
    if (c.refuting_t || c.refuting_state) {
        out["violation"] = c.violation;
        out["margin"] = c.margin;
    }
    if (!c.note.empty()) {
        out["note"] = c.note;
    }
    return out;
}

inline json separation_to_json(const SeparationResult &r, const QuantumRandomVariable &ft,
                               const QuantumRandomVariable &g) {
    json out{{"kind", "separation"}, {"separated", r.separated}, {"space", to_json(g.space())},
             {"f", to_json(ft)},     {"g", to_json(g)}};
    if (r.separated) {
        out["W"] = atom_map(g.space(), r.phi.W);
        out["u"] = vector_to_json(r.u);
        out["v"] = vector_to_json(r.v);
        out["phi_f"] = r.phi_f;
        out["psi_g"] = r.psi_g;
        out["margin"] = r.margin;
    } else {
        out["forward_checks"] = r.forward_checks;
        out["forward_failures"] = r.forward_failures;
    }
    return out;
}

} // namespace qrv::io
