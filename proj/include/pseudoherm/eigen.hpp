#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <vector>

#include "pseudoherm/errors.hpp"
#include "pseudoherm/matrix.hpp"

namespace pseudoherm {

/// Relative tolerance for Hermiticity validation and residual contracts.
inline constexpr double default_eig_tol = 1e-10;
/// Absolute tolerance on the minimum eigenvalue for positive-definiteness.
inline constexpr double default_pd_tol = 1e-12;

/// Eigenvalues ascending; columns of `vectors` are the matching
/// orthonormal eigenvectors.
struct HermitianEigenDecomposition {
    std::vector<double> eigenvalues;
    ComplexMatrix vectors;
};

namespace detail {

// One cyclic Jacobi pass, rotating away a(p,q) for all p < q. The rotation
// J differs from identity only in J(p,p)=c, J(p,q)=s, J(q,p)=-conj(s),
// J(q,q)=c with c real and c^2 + |s|^2 = 1; A <- J^dagger A J.
inline void jacobi_rotate(std::vector<Complex>& a, std::vector<Complex>& q,
                          std::size_t n, std::size_t p, std::size_t r) {
    const Complex apq = a[p * n + r];
    const double aapq = std::abs(apq);
    if (aapq == 0.0) return;

    const double app = a[p * n + p].real();
    const double aqq = a[r * n + r].real();
    const double tau = (aqq - app) / (2.0 * aapq);
    const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const Complex s = (t * c) * (apq / aapq);
    const Complex sbar = std::conj(s);

    // Columns: A <- A J.
    for (std::size_t i = 0; i < n; ++i) {
        const Complex aip = a[i * n + p];
        const Complex aiq = a[i * n + r];
        a[i * n + p] = c * aip - sbar * aiq;
        a[i * n + r] = s * aip + c * aiq;
    }
    // Rows: A <- J^dagger A.
    for (std::size_t j = 0; j < n; ++j) {
        const Complex apj = a[p * n + j];
        const Complex aqj = a[r * n + j];
        a[p * n + j] = c * apj - s * aqj;
        a[r * n + j] = sbar * apj + c * aqj;
    }
    // Accumulate eigenvectors: Q <- Q J.
    for (std::size_t i = 0; i < n; ++i) {
        const Complex qip = q[i * n + p];
        const Complex qiq = q[i * n + r];
        q[i * n + p] = c * qip - sbar * qiq;
        q[i * n + r] = s * qip + c * qiq;
    }
}

inline double offdiag_norm_sq(const std::vector<Complex>& a, std::size_t n) {
    double sum = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
        for (std::size_t r = p + 1; r < n; ++r) sum += std::norm(a[p * n + r]) + std::norm(a[r * n + p]);
    return sum;
}

}  // namespace detail

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
/// Input must satisfy ||H - H^dagger||_F <= tol * ||H||_F.
inline HermitianEigenDecomposition hermitian_eig(const ComplexMatrix& h, double tol = default_eig_tol) {
    if (!h.is_square()) throw ShapeError("hermitian_eig: matrix is not square");
    const std::size_t n = h.rows();

    const double hnorm = frobenius_norm(h);
    {
        double dev = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) dev += std::norm(h(i, j) - std::conj(h(j, i)));
        if (std::sqrt(dev) > tol * hnorm) {
            throw ContractViolation("hermitian_eig: input is not Hermitian within tolerance");
        }
    }

    std::vector<Complex> a(h.entries().begin(), h.entries().end());
    // Fold the (tiny) anti-hermitian residue away so the iteration sees an
    // exactly Hermitian matrix.
    for (std::size_t i = 0; i < n; ++i) {
        a[i * n + i] = Complex(a[i * n + i].real(), 0.0);
        for (std::size_t j = i + 1; j < n; ++j) {
            const Complex avg = 0.5 * (a[i * n + j] + std::conj(a[j * n + i]));
            a[i * n + j] = avg;
            a[j * n + i] = std::conj(avg);
        }
    }

    std::vector<Complex> q(n * n, Complex(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i) q[i * n + i] = 1.0;

    const double stop = 1e-15 * std::max(hnorm, 1e-300);
    const int max_sweeps = 64;
    bool converged = (n == 1);
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        if (detail::offdiag_norm_sq(a, n) <= stop * stop) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t r = p + 1; r < n; ++r) detail::jacobi_rotate(a, q, n, p, r);
    }
    if (!converged && detail::offdiag_norm_sq(a, n) > stop * stop) {
        throw NumericalError("hermitian_eig: Jacobi iteration did not converge");
    }

    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = a[i * n + i].real();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });

    std::vector<double> sorted(n);
    MatrixBuffer vecs(n, n);
    for (std::size_t col = 0; col < n; ++col) {
        sorted[col] = values[order[col]];
        for (std::size_t i = 0; i < n; ++i) vecs(i, col) = q[i * n + order[col]];
    }
    return HermitianEigenDecomposition{std::move(sorted), std::move(vecs).build()};
}

/// Rebuilds Q f(diag) Q^dagger for a scalar spectral map f given as the
/// per-eigenvalue complex factors.
inline ComplexMatrix spectral_assemble(const HermitianEigenDecomposition& eig,
                                       const std::vector<Complex>& factors) {
    const std::size_t n = eig.vectors.rows();
    MatrixBuffer out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const Complex fk = factors[k];
        if (fk == Complex(0.0, 0.0)) continue;
        for (std::size_t i = 0; i < n; ++i) {
            const Complex lhs = fk * eig.vectors(i, k);
            for (std::size_t j = 0; j < n; ++j) out.add(i, j, lhs * std::conj(eig.vectors(j, k)));
        }
    }
    return std::move(out).build();
}

struct SpdSqrt {
    ComplexMatrix root;
    ComplexMatrix inverse_root;
};

/// Hermitian square root and inverse square root of a positive-definite
/// matrix. Any eigenvalue at or below `pd_tol` raises
/// NotPositiveDefiniteError carrying that eigenvalue.
inline SpdSqrt sqrt_spd(const ComplexMatrix& h, double pd_tol = default_pd_tol) {
    const auto eig = hermitian_eig(h);
    if (eig.eigenvalues.front() <= pd_tol) {
        throw NotPositiveDefiniteError("sqrt_spd: matrix is not positive-definite", eig.eigenvalues.front());
    }
    const std::size_t n = h.rows();
    std::vector<Complex> roots(n), inv_roots(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double r = std::sqrt(eig.eigenvalues[k]);
        roots[k] = r;
        inv_roots[k] = 1.0 / r;
    }
    return SpdSqrt{spectral_assemble(eig, roots), spectral_assemble(eig, inv_roots)};
}

/// exp(-i t H) for Hermitian H, through the spectral decomposition. The
/// result is unitary to within the eigensolver residual.
inline ComplexMatrix exp_antihermitian_from(const ComplexMatrix& h, double t) {
    const auto eig = hermitian_eig(h);
    const std::size_t n = h.rows();
    std::vector<Complex> phases(n);
    for (std::size_t k = 0; k < n; ++k) {
        phases[k] = std::exp(Complex(0.0, -t * eig.eigenvalues[k]));
    }
    return spectral_assemble(eig, phases);
}

struct LeastSquaresResult {
    std::vector<double> x;
    double max_residual = 0.0;  // max |(Ax - b)_i|
};

/// Minimum-norm least-squares solution of a real system A x = b. Singular
/// values are obtained from the eigendecomposition of [[0, A], [A^T, 0]],
/// which keeps them accurate in absolute terms; values at or below
/// rank_tol * sigma_max are treated as zero.
inline LeastSquaresResult least_squares_min_norm(std::size_t rows, std::size_t cols,
                                                 std::span<const double> a_rowmajor,
                                                 std::span<const double> b,
                                                 double rank_tol = 1e-10) {
    if (a_rowmajor.size() != rows * cols || b.size() != rows) {
        throw ShapeError("least_squares_min_norm: inconsistent dimensions");
    }
    const std::size_t m = rows + cols;
    MatrixBuffer w(m, m);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            w(i, rows + j) = a_rowmajor[i * cols + j];
            w(rows + j, i) = a_rowmajor[i * cols + j];
        }
    const auto eig = hermitian_eig(std::move(w).build());

    const double sigma_max = std::max(std::abs(eig.eigenvalues.front()), std::abs(eig.eigenvalues.back()));
    const double cutoff = rank_tol * sigma_max;

    LeastSquaresResult result;
    result.x.assign(cols, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        const double sigma = eig.eigenvalues[k];
        if (sigma <= cutoff || sigma <= 0.0) continue;
        // Eigenvector (u/sqrt2, v/sqrt2) of the embedding with A v = sigma u.
        double ub = 0.0;
        for (std::size_t i = 0; i < rows; ++i) ub += eig.vectors(i, k).real() * b[i];
        const double coef = 2.0 * ub / sigma;
        for (std::size_t j = 0; j < cols; ++j) result.x[j] += coef * eig.vectors(rows + j, k).real();
    }
    for (std::size_t i = 0; i < rows; ++i) {
        double ri = -b[i];
        for (std::size_t j = 0; j < cols; ++j) ri += a_rowmajor[i * cols + j] * result.x[j];
        result.max_residual = std::max(result.max_residual, std::abs(ri));
    }
    return result;
}

}  // namespace pseudoherm
