#pragma once

#include <cstddef>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "pseudoherm/errors.hpp"
#include "pseudoherm/lattice.hpp"
#include "pseudoherm/matrix.hpp"
#include "pseudoherm/pseudo_hermitian.hpp"
#include "pseudoherm/su_basis.hpp"

namespace pseudoherm {

using Json = nlohmann::json;

/// Shared matrix format: {"rows": r, "cols": c, "data": [[re, im], ...]} in
/// row-major order. Round-trip exact for finite doubles.
inline Json matrix_to_json(const ComplexMatrix& m) {
    Json data = Json::array();
    for (const Complex& z : m.entries()) data.push_back(Json::array({z.real(), z.imag()}));
    return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline ComplexMatrix matrix_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data")) {
        throw DomainError("matrix_from_json: expected {rows, cols, data}");
    }
    const std::size_t rows = j.at("rows").get<std::size_t>();
    const std::size_t cols = j.at("cols").get<std::size_t>();
    const Json& data = j.at("data");
    if (!data.is_array() || data.size() != rows * cols) {
        throw DomainError("matrix_from_json: data length must be rows*cols");
    }
    std::vector<Complex> entries;
    entries.reserve(data.size());
    for (const Json& pair : data) {
        if (!pair.is_array() || pair.size() != 2) {
            throw DomainError("matrix_from_json: each entry must be [re, im]");
        }
        entries.emplace_back(pair[0].get<double>(), pair[1].get<double>());
    }
    return ComplexMatrix(rows, cols, std::move(entries));
}

/// States use the matrix format as an N x 1 column.
inline Json state_to_json(const StateVector& psi) {
    MatrixBuffer m(psi.dimension(), 1);
    for (std::size_t i = 0; i < psi.dimension(); ++i) m(i, 0) = psi.amplitudes[i];
    return matrix_to_json(std::move(m).build());
}

inline StateVector state_from_json(const Json& j) {
    const ComplexMatrix m = matrix_from_json(j);
    if (m.cols() != 1) throw DomainError("state_from_json: expected a column (cols = 1)");
    return StateVector(std::vector<Complex>(m.entries().begin(), m.entries().end()));
}

inline Json certificate_to_json(const MetricCertificate& cert) {
    return Json{{"alpha0", cert.alpha0},
                {"alpha0_min", cert.alpha0_min},
                {"lambda_min", cert.lambda_min},
                {"min_eigenvalue", cert.min_eigenvalue},
                {"positive_definite", cert.positive_definite}};
}

inline MetricCertificate certificate_from_json(const Json& j) {
    MetricCertificate cert;
    cert.alpha0 = j.at("alpha0").get<double>();
    cert.alpha0_min = j.at("alpha0_min").get<double>();
    cert.lambda_min = j.at("lambda_min").get<double>();
    cert.min_eigenvalue = j.at("min_eigenvalue").get<double>();
    cert.positive_definite = j.at("positive_definite").get<bool>();
    return cert;
}

inline Json system_to_json(const PseudoHermitianSystem& sys) {
    return Json{{"n", sys.dimension()}, {"eta", matrix_to_json(sys.eta())},
                {"s", matrix_to_json(sys.s())},  {"a0", sys.a0()},
                {"a1", sys.a1()},                {"b", sys.b()}};
}

inline PseudoHermitianSystem system_from_json(const Json& j) {
    const std::size_t n = j.at("n").get<std::size_t>();
    ComplexMatrix eta = matrix_from_json(j.at("eta"));
    ComplexMatrix s = matrix_from_json(j.at("s"));
    if (eta.rows() != n || s.rows() != n) {
        throw DomainError("system_from_json: matrix dimensions disagree with n");
    }
    return compose(eta, s, j.at("a0").get<double>(), j.at("a1").get<double>(),
                   j.value("b", std::vector<double>{}));
}

namespace detail {

inline void reject_unknown_fields(const Json& j, const std::set<std::string>& allowed,
                                  const char* what) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.count(key)) {
            throw DomainError(std::string(what) + ": unknown field '" + key + "'");
        }
    }
}

}  // namespace detail

/// Lattice spec files:
///   {"kind":"generic", "n":..., "gamma0":..., "gamma":[...], "xi0":...,
///    "c":..., "boundary":"periodic"|"open"}
///   {"kind":"uniform", "n":..., "gamma0":..., "gamma":...}
///   {"kind":"ssh", "m":..., "gamma0":..., "delta1":..., "delta2":..., "c":...}
/// Unknown fields are rejected.
inline LatticeModel model_from_spec_json(const Json& j) {
    if (!j.is_object() || !j.contains("kind")) throw DomainError("lattice spec: missing 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "generic") {
        detail::reject_unknown_fields(j, {"kind", "n", "gamma0", "gamma", "xi0", "c", "boundary"},
                                      "lattice spec (generic)");
        LatticeSpec spec;
        spec.kind = LatticeKind::GenericBalanced;
        spec.n = j.at("n").get<std::size_t>();
        spec.gamma0 = j.at("gamma0").get<double>();
        spec.gamma = j.at("gamma").get<std::vector<double>>();
        spec.xi0 = j.at("xi0").get<double>();
        spec.c = j.at("c").get<double>();
        const std::string boundary = j.value("boundary", "periodic");
        if (boundary == "periodic") {
            spec.boundary = Boundary::Periodic;
        } else if (boundary == "open") {
            spec.boundary = Boundary::Open;
        } else {
            throw DomainError("lattice spec: boundary must be 'periodic' or 'open'");
        }
        return build_generic_balanced(spec);
    }
    if (kind == "uniform") {
        detail::reject_unknown_fields(j, {"kind", "n", "gamma0", "gamma"}, "lattice spec (uniform)");
        if (!j.at("gamma").is_number()) {
            throw DomainError("lattice spec: uniform chains take a scalar gamma");
        }
        return build_uniform(j.at("n").get<std::size_t>(), j.at("gamma0").get<double>(),
                             j.at("gamma").get<double>());
    }
    if (kind == "ssh") {
        detail::reject_unknown_fields(j, {"kind", "m", "gamma0", "delta1", "delta2", "c"},
                                      "lattice spec (ssh)");
        return build_ssh(j.at("m").get<std::size_t>(), j.at("gamma0").get<double>(),
                         j.at("delta1").get<double>(), j.at("delta2").get<double>(),
                         j.at("c").get<double>());
    }
    throw DomainError("lattice spec: kind must be 'generic', 'uniform' or 'ssh'");
}

inline Json lattice_spec_to_json(const LatticeSpec& spec) {
    switch (spec.kind) {
        case LatticeKind::GenericBalanced:
            return Json{{"kind", "generic"},
                        {"n", spec.n},
                        {"gamma0", spec.gamma0},
                        {"gamma", spec.gamma},
                        {"xi0", spec.xi0},
                        {"c", spec.c},
                        {"boundary", spec.boundary == Boundary::Periodic ? "periodic" : "open"}};
        case LatticeKind::Uniform:
            return Json{{"kind", "uniform"},
                        {"n", spec.n},
                        {"gamma0", spec.gamma0},
                        {"gamma", spec.gamma.empty() ? 0.0 : spec.gamma.front()}};
        case LatticeKind::Ssh:
            return Json{{"kind", "ssh"},
                        {"m", spec.n / 2},
                        {"gamma0", spec.gamma0},
                        {"delta1", spec.gamma.empty() ? 0.0 : spec.gamma[0]},
                        {"delta2", spec.gamma.size() > 1 ? spec.gamma[1] : 0.0},
                        {"c", spec.c}};
    }
    throw DomainError("lattice_spec_to_json: unknown kind");
}

/// Self-contained model bundle written by the build command and consumed by
/// spectrum/verify/evolve.
inline Json model_to_json(const LatticeModel& model) {
    return Json{{"spec", lattice_spec_to_json(model.spec)},
                {"h", matrix_to_json(model.hamiltonian)},
                {"eta", matrix_to_json(model.eta)},
                {"certificate", certificate_to_json(model.certificate)}};
}

inline LatticeModel model_from_json(const Json& j) {
    LatticeModel model{LatticeSpec{}, matrix_from_json(j.at("h")), matrix_from_json(j.at("eta")),
                       certificate_from_json(j.at("certificate"))};
    const Json& spec = j.at("spec");
    const std::string kind = spec.at("kind").get<std::string>();
    if (kind == "generic") {
        model.spec.kind = LatticeKind::GenericBalanced;
        model.spec.n = spec.at("n").get<std::size_t>();
        model.spec.gamma0 = spec.at("gamma0").get<double>();
        model.spec.gamma = spec.at("gamma").get<std::vector<double>>();
        model.spec.xi0 = spec.at("xi0").get<double>();
        model.spec.c = spec.at("c").get<double>();
        model.spec.boundary =
            spec.at("boundary").get<std::string>() == "open" ? Boundary::Open : Boundary::Periodic;
    } else if (kind == "uniform") {
        model.spec.kind = LatticeKind::Uniform;
        model.spec.n = spec.at("n").get<std::size_t>();
        model.spec.gamma0 = spec.at("gamma0").get<double>();
        model.spec.gamma.assign(model.spec.n, spec.at("gamma").get<double>());
        model.spec.gamma[model.spec.n - 1] = 0.0;
        model.spec.xi0 = 0.0;
        model.spec.c = 1.0;
        model.spec.boundary = Boundary::Open;
    } else if (kind == "ssh") {
        model.spec.kind = LatticeKind::Ssh;
        const std::size_t m = spec.at("m").get<std::size_t>();
        model.spec.n = 2 * m;
        model.spec.gamma0 = spec.at("gamma0").get<double>();
        model.spec.gamma.resize(2 * m);
        for (std::size_t i = 0; i < 2 * m; ++i) {
            model.spec.gamma[i] = (i % 2 == 0) ? spec.at("delta1").get<double>()
                                               : spec.at("delta2").get<double>();
        }
        model.spec.xi0 = 0.0;
        model.spec.c = spec.at("c").get<double>();
        model.spec.boundary = Boundary::Periodic;
    } else {
        throw DomainError("model_from_json: unknown spec kind");
    }
    if (model.hamiltonian.rows() != model.spec.n || model.eta.rows() != model.spec.n) {
        throw DomainError("model_from_json: matrix dimensions disagree with spec");
    }
    return model;
}

/// One JSON object per line for every canonical nonzero triple, f entries on
/// strictly increasing (a,b,c), d entries on non-decreasing triples; lines
/// carry both tensors with zeros where only one is nonzero.
inline void write_structure_constants_jsonl(std::ostream& os, const StructureConstants& fd) {
    std::set<StructureConstants::Triple> keys;
    for (const auto& [key, value] : fd.f_canonical()) keys.insert(key);
    for (const auto& [key, value] : fd.d_canonical()) keys.insert(key);
    for (const auto& key : keys) {
        const auto fit = fd.f_canonical().find(key);
        const auto dit = fd.d_canonical().find(key);
        Json line{{"a", key[0]},
                  {"b", key[1]},
                  {"c", key[2]},
                  {"f", fit == fd.f_canonical().end() ? 0.0 : fit->second},
                  {"d", dit == fd.d_canonical().end() ? 0.0 : dit->second}};
        os << line.dump() << "\n";
    }
}

}  // namespace pseudoherm
