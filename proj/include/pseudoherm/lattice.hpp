#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "pseudoherm/eigen.hpp"
#include "pseudoherm/errors.hpp"
#include "pseudoherm/matrix.hpp"
#include "pseudoherm/pseudo_hermitian.hpp"

namespace pseudoherm {

enum class Boundary { Periodic, Open };
enum class LatticeKind { GenericBalanced, Uniform, Ssh };

/// Parameters of a balanced loss-gain chain. `gamma` holds the N bond
/// weights gamma_1..gamma_N with the cyclic identification
/// gamma_{N+j} = gamma_j; an open chain is realized by gamma_N = 0, which
/// removes the three corner couplings. `c` ties the gauge parameters to the
/// bonds as xi_i = -C gamma_i.
struct LatticeSpec {
    LatticeKind kind = LatticeKind::GenericBalanced;
    std::size_t n = 0;
    double gamma0 = 0.0;
    std::vector<double> gamma;
    double xi0 = 0.0;
    double c = 0.0;
    Boundary boundary = Boundary::Periodic;

    void validate() const {
        if (n < 3) throw DomainError("LatticeSpec: site count must be >= 3");
        if (gamma.size() != n) throw DomainError("LatticeSpec: need one bond weight per site");
        for (double g : gamma) {
            if (!std::isfinite(g)) throw DomainError("LatticeSpec: non-finite bond weight");
        }
        if (!std::isfinite(gamma0) || !std::isfinite(xi0) || !std::isfinite(c)) {
            throw DomainError("LatticeSpec: non-finite parameter");
        }
        if (boundary == Boundary::Open && gamma[n - 1] != 0.0) {
            throw DomainError("LatticeSpec: open boundary requires gamma_N = 0");
        }
        if (kind == LatticeKind::Ssh) {
            if (n % 2 != 0) throw DomainError("LatticeSpec: SSH chain needs an even site count");
            for (std::size_t i = 0; i < n; ++i) {
                if (gamma[i] != gamma[i % 2]) {
                    throw DomainError("LatticeSpec: SSH bond weights must alternate");
                }
            }
        }
    }
};

struct LatticeModel {
    LatticeSpec spec;
    ComplexMatrix hamiltonian;
    ComplexMatrix eta;
    MetricCertificate certificate;
};

namespace detail {

/// eta = gamma0 I + sum_j gamma_j Lambda^S_{j,j+1} with cyclic wrap.
inline ComplexMatrix lattice_metric(std::size_t n, double gamma0, std::span<const double> gamma) {
    MatrixBuffer eta(n, n);
    for (std::size_t i = 0; i < n; ++i) eta(i, i) = gamma0;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t next = (j + 1) % n;
        eta.add(j, next, gamma[j]);
        eta.add(next, j, gamma[j]);
    }
    return std::move(eta).build();
}

/// The balanced loss-gain operator, including the gamma0 xi0 I shift:
///   O = gamma0 xi0 I
///       + sum_j (conj(Gamma_j) |j><j+1| + i C gamma_j gamma_{j+1} |j><j+2| + h.c.)
///       - i C sum_j (gamma_j^2 - gamma_{j+1}^2) |j+1><j+1|
/// with Gamma_j = (xi0 - i C gamma0) gamma_j and sites identified mod N.
inline ComplexMatrix balanced_operator(std::size_t n, double gamma0, std::span<const double> gamma,
                                       double xi0, double c) {
    MatrixBuffer h(n, n);
    const Complex coupling(xi0, -c * gamma0);  // Gamma_j / gamma_j
    for (std::size_t i = 0; i < n; ++i) h(i, i) = gamma0 * xi0;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t s1 = (j + 1) % n;
        const std::size_t s2 = (j + 2) % n;
        const Complex nn = std::conj(coupling) * gamma[j];
        h.add(j, s1, nn);
        h.add(s1, j, std::conj(nn));
        const Complex nnn(0.0, c * gamma[j] * gamma[s1]);
        h.add(j, s2, nnn);
        h.add(s2, j, std::conj(nnn));
        h.add(s1, s1, Complex(0.0, -c * (gamma[j] * gamma[j] - gamma[s1] * gamma[s1])));
    }
    return std::move(h).build();
}

inline LatticeModel finish_model(LatticeSpec spec, ComplexMatrix h, ComplexMatrix eta) {
    const double residual = pseudo_hermiticity_residual(h, eta);
    if (residual > 1e-10) {
        throw NumericalError("lattice builder: pseudo-hermiticity residual above 1e-10");
    }
    MetricCertificate cert = certify_metric(eta);
    return LatticeModel{std::move(spec), std::move(h), std::move(eta), cert};
}

}  // namespace detail

/// Generic NN+NNN chain with balanced loss-gain at every site. The stored
/// operator retains the constant gamma0 xi0 I shift.
inline LatticeModel build_generic_balanced(const LatticeSpec& spec) {
    if (spec.kind != LatticeKind::GenericBalanced) {
        throw DomainError("build_generic_balanced: spec kind mismatch");
    }
    spec.validate();
    ComplexMatrix h = detail::balanced_operator(spec.n, spec.gamma0, spec.gamma, spec.xi0, spec.c);
    ComplexMatrix eta = detail::lattice_metric(spec.n, spec.gamma0, spec.gamma);
    return detail::finish_model(spec, std::move(h), std::move(eta));
}

/// Same chain built as the raw product O = S eta from
/// S = xi0 I + sum_j xi_j Lambda^A_{j,j+1} with a free xi vector. With
/// xi_i = -C gamma_i this reproduces build_generic_balanced; the two routes
/// cross-validate each other.
inline LatticeModel build_from_ansatz(const LatticeSpec& spec, std::span<const double> xi) {
    spec.validate();
    if (xi.size() != spec.n) throw DomainError("build_from_ansatz: need one xi per site");
    const std::size_t n = spec.n;
    MatrixBuffer s(n, n);
    for (std::size_t i = 0; i < n; ++i) s(i, i) = spec.xi0;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t next = (j + 1) % n;
        s.add(j, next, Complex(0.0, -xi[j]));
        s.add(next, j, Complex(0.0, xi[j]));
    }
    ComplexMatrix eta = detail::lattice_metric(n, spec.gamma0, spec.gamma);
    PseudoHermitianSystem sys = compose(eta, std::move(s).build(), 1.0, 0.0);
    return detail::finish_model(spec, sys.op(), std::move(eta));
}

/// Tight-binding chain with uniform NN and NNN couplings and loss-gain
/// defects on the two end sites:
///   H = i gamma0 sum_{j<N} (|j><j+1| - |j+1><j|)
///       + i gamma sum_{j<N-1} (|j><j+2| - |j+2><j|)
///       + i gamma (|1><1| - |N><N|),
/// pseudo-hermitian against the tridiagonal metric
/// eta = gamma0 I + gamma sum Lambda^S_{i,i+1}. Equals the generic chain at
/// gamma_1..gamma_{N-1} = gamma, gamma_N = 0, xi0 = 0 divided by C gamma.
inline LatticeModel build_uniform(std::size_t n, double gamma0, double gamma) {
    if (n < 3) throw DomainError("build_uniform: site count must be >= 3");
    MatrixBuffer h(n, n);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        h(j, j + 1) = Complex(0.0, gamma0);
        h(j + 1, j) = Complex(0.0, -gamma0);
    }
    for (std::size_t j = 0; j + 2 < n; ++j) {
        h(j, j + 2) = Complex(0.0, gamma);
        h(j + 2, j) = Complex(0.0, -gamma);
    }
    h.add(0, 0, Complex(0.0, gamma));
    h.add(n - 1, n - 1, Complex(0.0, -gamma));

    LatticeSpec spec;
    spec.kind = LatticeKind::Uniform;
    spec.n = n;
    spec.gamma0 = gamma0;
    spec.gamma.assign(n, gamma);
    spec.gamma[n - 1] = 0.0;
    spec.xi0 = 0.0;
    spec.c = 1.0;
    spec.boundary = Boundary::Open;

    ComplexMatrix eta = detail::lattice_metric(n, gamma0, spec.gamma);
    return detail::finish_model(std::move(spec), std::move(h).build(), std::move(eta));
}

/// Closed-form spectrum e_k = gamma0 + 2 gamma cos(k pi / (N+1)) of the
/// uniform tridiagonal metric, returned ascending. Mirror pairs are
/// constructed to sum to exactly 2 gamma0.
inline std::vector<double> uniform_metric_eigenvalues(std::size_t n, double gamma0, double gamma) {
    if (n < 1) throw DomainError("uniform_metric_eigenvalues: need at least one site");
    std::vector<double> e(n);
    for (std::size_t k = 1; 2 * k <= n; ++k) {
        const double value = gamma0 + 2.0 * gamma * std::cos(k * std::numbers::pi / (n + 1.0));
        e[k - 1] = value;
        e[n - k] = 2.0 * gamma0 - value;
    }
    if (n % 2 == 1) e[n / 2] = gamma0;
    std::sort(e.begin(), e.end());
    return e;
}

/// gamma0 > 2 |gamma| cos(pi/(N+1)): all metric eigenvalues positive, hence
/// entirely real spectra for the uniform chain.
inline bool uniform_reality_condition(std::size_t n, double gamma0, double gamma) {
    return gamma0 > 2.0 * std::abs(gamma) * std::cos(std::numbers::pi / (n + 1.0));
}

/// Orthogonal sine transform [O]_ij = sqrt(2/(N+1)) sin(i j pi/(N+1)) that
/// diagonalizes the uniform tridiagonal metric.
inline ComplexMatrix uniform_diagonalizer(std::size_t n) {
    if (n < 1) throw DomainError("uniform_diagonalizer: need at least one site");
    MatrixBuffer o(n, n);
    const double scale = std::sqrt(2.0 / (n + 1.0));
    for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = 1; j <= n; ++j) {
            o(i - 1, j - 1) = scale * std::sin(static_cast<double>(i) * j * std::numbers::pi / (n + 1.0));
        }
    return std::move(o).build();
}

/// SSH chain with balanced loss-gain: N = 2m sites, bond weights
/// alternating delta1 (intra-cell) and delta2 (inter-cell), periodic wrap,
/// H = O / C where O is the generic balanced operator at xi0 = 0.
inline LatticeModel build_ssh(std::size_t m, double gamma0, double delta1, double delta2, double c) {
    if (m < 2) throw DomainError("build_ssh: need at least two cells");
    if (c == 0.0) throw DomainError("build_ssh: coupling constant C must be nonzero");
    const std::size_t n = 2 * m;

    LatticeSpec spec;
    spec.kind = LatticeKind::Ssh;
    spec.n = n;
    spec.gamma0 = gamma0;
    spec.gamma.resize(n);
    for (std::size_t i = 0; i < n; ++i) spec.gamma[i] = (i % 2 == 0) ? delta1 : delta2;
    spec.xi0 = 0.0;
    spec.c = c;
    spec.boundary = Boundary::Periodic;
    spec.validate();

    ComplexMatrix o = detail::balanced_operator(n, gamma0, spec.gamma, 0.0, c);
    ComplexMatrix h = Complex(1.0 / c, 0.0) * o;
    ComplexMatrix eta = detail::lattice_metric(n, gamma0, spec.gamma);
    return detail::finish_model(std::move(spec), std::move(h), std::move(eta));
}

/// gamma0 > sqrt(m (delta1^2 + delta2^2)) guarantees a positive-definite SSH
/// metric; coincides with the sufficient bound alpha0 > alpha0_min for this
/// metric.
inline bool ssh_sufficient_condition(std::size_t m, double gamma0, double delta1, double delta2) {
    return gamma0 > std::sqrt(static_cast<double>(m) * (delta1 * delta1 + delta2 * delta2));
}

/// The three wrap entries [H]_{1,N-1}, [H]_{1,N}, [H]_{2,N} (1-based), as
/// assembled. For small N these positions overlap the NN/NNN band and then
/// carry band couplings rather than pure boundary terms.
inline std::array<Complex, 3> corner_elements(const LatticeModel& model) {
    const ComplexMatrix& h = model.hamiltonian;
    const std::size_t n = h.rows();
    return {h(0, n - 2), h(0, n - 1), h(1, n - 1)};
}

}  // namespace pseudoherm
