#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pseudoherm/eigen.hpp"
#include "pseudoherm/errors.hpp"
#include "pseudoherm/lattice.hpp"
#include "pseudoherm/pseudo_hermitian.hpp"
#include "pseudoherm/serialize.hpp"
#include "pseudoherm/su_basis.hpp"

namespace pseudoherm::cli {

struct CliOptions {
    double tol_eig = default_eig_tol;
    double tol_pd = default_pd_tol;
    bool force_tensor = false;
};

/// Outcome of one command. `status` is pass exactly when every entry of
/// `residuals` is at or below the tolerance of the same name.
struct RunReport {
    std::string command;
    Json inputs;
    std::vector<std::string> outputs;
    std::map<std::string, double> residuals;
    std::map<std::string, double> tolerances;
    Json details = Json::object();
    std::vector<std::string> notes;
    bool pass = true;

    void add_check(const std::string& name, double value, double tolerance) {
        residuals[name] = value;
        tolerances[name] = tolerance;
        if (!(value <= tolerance)) pass = false;
    }

    Json to_json() const {
        return Json{{"command", command},   {"inputs", inputs},       {"outputs", outputs},
                    {"residuals", residuals}, {"tolerances", tolerances}, {"details", details},
                    {"notes", notes},       {"status", pass ? "pass" : "fail"}};
    }
};

inline std::string format_sig17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace detail {

inline Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return Json::parse(in);
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

inline void write_json_file(const std::filesystem::path& path, const Json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

inline double tr_product_entrywise(const ComplexMatrix& a, const ComplexMatrix& b, double target) {
    Complex sum(0.0, 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) sum += a(i, j) * b(j, i);
    return std::abs(sum - target);
}

inline double det_residual(const ComplexMatrix& h, const std::vector<double>& eigenvalues) {
    const std::size_t n = h.rows();
    const double scale = std::max(frobenius_norm(h), 1e-300);
    double worst = 0.0;
    for (double lambda : eigenvalues) {
        MatrixBuffer shifted(h);
        for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= lambda;
        const double r = std::abs(determinant(std::move(shifted).build())) / std::pow(scale, n);
        worst = std::max(worst, r);
    }
    return worst;
}

}  // namespace detail

/// Writes the N^2 generator matrices and the structure-constant tensor dump.
/// The tensor computation is gated at N <= 12 unless forced.
inline RunReport cmd_basis(std::size_t n, const std::filesystem::path& out_dir,
                           const CliOptions& opts) {
    if (n < 2) throw DomainError("basis: N must be >= 2");
    if (n > structure_constant_dim_cap && !opts.force_tensor) {
        throw DomainError("basis: N > 12 makes the tensor dump expensive; pass --force-tensor to override");
    }
    RunReport report;
    report.command = "basis";
    report.inputs = Json{{"n", n}, {"out", out_dir.string()}};

    const SuBasis basis = build_basis(n);
    std::filesystem::create_directories(out_dir);
    for (std::size_t a = 0; a < basis.count(); ++a) {
        const auto path = out_dir / ("T" + std::to_string(a) + ".json");
        detail::write_json_file(path, matrix_to_json(basis.generator(a)));
        report.outputs.push_back(path.string());
    }

    double ortho = 0.0;
    for (std::size_t a = 1; a < basis.count(); ++a)
        for (std::size_t b = a; b < basis.count(); ++b) {
            const double target = a == b ? 2.0 : 0.0;
            ortho = std::max(ortho,
                             detail::tr_product_entrywise(basis.generator(a), basis.generator(b), target));
        }
    report.add_check("orthogonality", ortho, 1e-12);

    const StructureConstants fd = structure_constants(basis, opts.force_tensor);
    std::ofstream jsonl(out_dir / "structure_constants.jsonl", std::ios::binary);
    if (!jsonl) throw IoError("cannot write " + (out_dir / "structure_constants.jsonl").string());
    write_structure_constants_jsonl(jsonl, fd);
    report.outputs.push_back((out_dir / "structure_constants.jsonl").string());
    report.details["nonzero_f"] = fd.f_canonical().size();
    report.details["nonzero_d"] = fd.d_canonical().size();
    return report;
}

/// Builds a lattice model from a spec file; writes H, eta, the certificate
/// and a self-contained model bundle. An indefinite metric is a warning, not
/// a failure; the spectrum command is gated on the certificate.
inline RunReport cmd_build(const std::filesystem::path& spec_path,
                           const std::filesystem::path& out_dir, const CliOptions& opts) {
    const Json spec_json = detail::read_json_file(spec_path);
    const LatticeModel model = model_from_spec_json(spec_json);

    RunReport report;
    report.command = "build";
    report.inputs = lattice_spec_to_json(model.spec);

    std::filesystem::create_directories(out_dir);
    detail::write_json_file(out_dir / "h.json", matrix_to_json(model.hamiltonian));
    detail::write_json_file(out_dir / "eta.json", matrix_to_json(model.eta));
    detail::write_json_file(out_dir / "certificate.json", certificate_to_json(model.certificate));
    detail::write_json_file(out_dir / "model.json", model_to_json(model));
    for (const char* name : {"h.json", "eta.json", "certificate.json", "model.json"}) {
        report.outputs.push_back((out_dir / name).string());
    }

    report.add_check("pseudo_hermiticity", verify_pseudo_hermiticity(model.hamiltonian, model.eta),
                     opts.tol_eig);
    report.details["certificate"] = certificate_to_json(model.certificate);
    if (!model.certificate.positive_definite) {
        report.notes.push_back("metric is not positive-definite: spectrum is gated");
    }
    return report;
}

/// Ascending real spectrum of a stored model, one eigenvalue per line at 17
/// significant digits. Refuses models whose metric is not positive-definite.
inline RunReport cmd_spectrum(const std::filesystem::path& model_path,
                              const std::filesystem::path& out_path, const CliOptions& opts) {
    const LatticeModel model = model_from_json(detail::read_json_file(model_path));
    const MetricCertificate cert = certify_metric(model.eta, opts.tol_pd);
    if (!cert.positive_definite) {
        throw NotPositiveDefiniteError(
            "spectrum: metric is not positive-definite (min eigenvalue " +
                format_sig17(cert.min_eigenvalue) + "); no real spectrum is certified",
            cert.min_eigenvalue);
    }

    const std::vector<double> spectrum = real_spectrum(model.hamiltonian, model.eta, opts.tol_pd);
    std::string csv;
    for (double v : spectrum) csv += format_sig17(v) + "\n";
    detail::write_text_file(out_path, csv);

    RunReport report;
    report.command = "spectrum";
    report.inputs = Json{{"model", model_path.string()}, {"out", out_path.string()}};
    report.outputs.push_back(out_path.string());
    report.add_check("pseudo_hermiticity", verify_pseudo_hermiticity(model.hamiltonian, model.eta),
                     opts.tol_eig);
    report.add_check("determinant", detail::det_residual(model.hamiltonian, spectrum), 1e-8);
    report.details["certificate"] = certificate_to_json(cert);
    report.details["eigenvalue_count"] = spectrum.size();
    return report;
}

/// Re-checks a stored model: pseudo-hermiticity residual, certificate
/// values, and the corner couplings.
inline RunReport cmd_verify(const std::filesystem::path& model_path, const CliOptions& opts) {
    const LatticeModel model = model_from_json(detail::read_json_file(model_path));

    RunReport report;
    report.command = "verify";
    report.inputs = Json{{"model", model_path.string()}};
    report.add_check("pseudo_hermiticity", verify_pseudo_hermiticity(model.hamiltonian, model.eta),
                     opts.tol_eig);

    const MetricCertificate cert = certify_metric(model.eta, opts.tol_pd);
    report.details["certificate"] = certificate_to_json(cert);
    report.details["verdicts"] =
        Json{{"pseudo_hermitian", report.residuals.at("pseudo_hermiticity") <= opts.tol_eig},
             {"positive_definite", cert.positive_definite}};
    const auto corners = corner_elements(model);
    Json corner_json = Json::array();
    for (const Complex& z : corners) corner_json.push_back(Json::array({z.real(), z.imag()}));
    report.details["corner_elements"] = corner_json;

    std::cout << "pseudo-hermiticity residual: " << format_sig17(report.residuals.at("pseudo_hermiticity"))
              << "\nalpha0_min: " << format_sig17(cert.alpha0_min)
              << "\nlambda_min: " << format_sig17(cert.lambda_min)
              << "\nmin eigenvalue: " << format_sig17(cert.min_eigenvalue)
              << "\npositive definite: " << (cert.positive_definite ? "true" : "false") << "\n";
    return report;
}

/// Pseudo-unitary time evolution of an initial state over a uniform time
/// grid. Emits CSV rows t, re/im amplitudes per site, standard norm,
/// eta-norm; the eta-norm column must stay constant to 1e-9 relative.
inline RunReport cmd_evolve(const std::filesystem::path& model_path,
                            const std::filesystem::path& psi0_path, double t_start, double t_end,
                            double t_step, const std::filesystem::path& out_path,
                            const CliOptions& opts) {
    if (!(t_step > 0.0) || t_end < t_start) {
        throw DomainError("evolve: require t-step > 0 and t-end >= t-start");
    }
    const LatticeModel model = model_from_json(detail::read_json_file(model_path));
    const StateVector psi0 = state_from_json(detail::read_json_file(psi0_path));
    if (psi0.dimension() != model.spec.n) {
        throw ShapeError("evolve: initial state dimension does not match the model");
    }

    const Hermitization herm = hermitize(model.hamiltonian, model.eta, opts.tol_pd);
    const auto eig = hermitian_eig(herm.h);
    const std::size_t n = model.spec.n;

    // psi(t) = rho^{-1} Q exp(-i t diag) Q^dagger rho psi0.
    const auto rho_psi = apply_matrix(herm.rho, psi0.amplitudes);
    std::vector<Complex> w(n, Complex(0.0, 0.0));
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) w[k] += std::conj(eig.vectors(i, k)) * rho_psi[i];

    std::string csv = "t";
    for (std::size_t i = 1; i <= n; ++i) {
        csv += ",re_" + std::to_string(i) + ",im_" + std::to_string(i);
    }
    csv += ",norm,eta_norm\n";

    double eta_norm0 = 0.0;
    double drift = 0.0;
    const std::size_t steps = static_cast<std::size_t>(std::floor((t_end - t_start) / t_step + 0.5)) + 1;
    for (std::size_t step = 0; step < steps; ++step) {
        const double t = t_start + static_cast<double>(step) * t_step;
        std::vector<Complex> v(n, Complex(0.0, 0.0));
        for (std::size_t k = 0; k < n; ++k) {
            const Complex phase = std::exp(Complex(0.0, -t * eig.eigenvalues[k])) * w[k];
            for (std::size_t i = 0; i < n; ++i) v[i] += phase * eig.vectors(i, k);
        }
        const auto psi_t = apply_matrix(herm.rho_inv, v);

        double norm_sq = 0.0;
        for (const Complex& z : psi_t) norm_sq += std::norm(z);
        const auto eta_psi = apply_matrix(model.eta, psi_t);
        Complex eta_norm_c(0.0, 0.0);
        for (std::size_t i = 0; i < n; ++i) eta_norm_c += std::conj(psi_t[i]) * eta_psi[i];
        const double eta_norm = eta_norm_c.real();
        if (step == 0) {
            eta_norm0 = eta_norm;
        } else {
            drift = std::max(drift, std::abs(eta_norm - eta_norm0) / std::max(std::abs(eta_norm0), 1e-300));
        }

        csv += format_sig17(t);
        for (const Complex& z : psi_t) {
            csv += "," + format_sig17(z.real()) + "," + format_sig17(z.imag());
        }
        csv += "," + format_sig17(std::sqrt(norm_sq)) + "," + format_sig17(eta_norm) + "\n";
    }
    detail::write_text_file(out_path, csv);

    RunReport report;
    report.command = "evolve";
    report.inputs = Json{{"model", model_path.string()}, {"psi0", psi0_path.string()},
                         {"t_start", t_start},           {"t_end", t_end},
                         {"t_step", t_step},             {"out", out_path.string()}};
    report.outputs.push_back(out_path.string());
    report.add_check("eta_norm_drift", drift, 1e-9);
    report.details["rows"] = steps;
    return report;
}

inline int run_cli(int argc, const char* const* argv) {
    CLI::App app{"pseudo-hermitian matrix construction and balanced loss-gain lattice models"};
    app.require_subcommand(1);
    app.fallthrough();

    CliOptions opts;
    std::string out;
    app.add_option("--tol-eig", opts.tol_eig, "relative tolerance for Hermiticity/residual checks");
    app.add_option("--tol-pd", opts.tol_pd, "absolute tolerance on the minimum metric eigenvalue");
    app.add_flag("--force-tensor", opts.force_tensor, "allow structure-constant dumps beyond N = 12");
    app.add_option("--out", out, "output file or directory");

    std::size_t basis_n = 0;
    auto* basis_cmd = app.add_subcommand("basis", "write SU(N) generators and structure constants");
    basis_cmd->add_option("--n", basis_n, "dimension N")->required();

    std::string spec_path;
    auto* build_cmd = app.add_subcommand("build", "build a lattice model from a spec file");
    build_cmd->add_option("--spec", spec_path, "lattice spec JSON")->required();

    std::string model_path;
    auto* spectrum_cmd = app.add_subcommand("spectrum", "real spectrum of a stored model");
    spectrum_cmd->add_option("--model", model_path, "model bundle JSON")->required();

    auto* verify_cmd = app.add_subcommand("verify", "re-check a stored model");
    verify_cmd->add_option("--model", model_path, "model bundle JSON")->required();

    std::string psi0_path;
    double t_start = 0.0, t_end = 1.0, t_step = 0.1;
    auto* evolve_cmd = app.add_subcommand("evolve", "pseudo-unitary time evolution");
    evolve_cmd->add_option("--model", model_path, "model bundle JSON")->required();
    evolve_cmd->add_option("--psi0", psi0_path, "initial state JSON (N x 1 matrix)")->required();
    evolve_cmd->add_option("--t-start", t_start, "first time sample");
    evolve_cmd->add_option("--t-end", t_end, "last time sample");
    evolve_cmd->add_option("--t-step", t_step, "time step");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 3;
    }

    try {
        RunReport report;
        if (basis_cmd->parsed()) {
            report = cmd_basis(basis_n, out.empty() ? "." : out, opts);
        } else if (build_cmd->parsed()) {
            report = cmd_build(spec_path, out.empty() ? "." : out, opts);
        } else if (spectrum_cmd->parsed()) {
            if (out.empty()) throw DomainError("spectrum: --out is required");
            report = cmd_spectrum(model_path, out, opts);
        } else if (verify_cmd->parsed()) {
            report = cmd_verify(model_path, opts);
        } else if (evolve_cmd->parsed()) {
            if (out.empty()) throw DomainError("evolve: --out is required");
            report = cmd_evolve(model_path, psi0_path, t_start, t_end, t_step, out, opts);
        }
        std::cout << report.to_json().dump(2) << "\n";
        return report.pass ? 0 : 4;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const Json::parse_error& e) {
        std::cerr << "invalid json: " << e.what() << "\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 3;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace pseudoherm::cli
