#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "pseudoherm/eigen.hpp"
#include "pseudoherm/errors.hpp"
#include "pseudoherm/matrix.hpp"
#include "pseudoherm/su_basis.hpp"

namespace pseudoherm {

/// Positivity certificate for a Hermitian metric. alpha0 is the identity
/// coefficient Tr(eta)/N, alpha0_min the sufficient lower bound
/// sqrt(Tr((eta - alpha0 I)^2)/2), lambda_min the magnitude of the lowest
/// negative eigenvalue of the traceless part (0 when there is none).
/// The sufficient bound alpha0 > alpha0_min implies positive_definite; the
/// exact test is min_eigenvalue > pd_tol. No metric with alpha0 <= 0 can be
/// positive-definite.
struct MetricCertificate {
    double alpha0 = 0.0;
    double alpha0_min = 0.0;
    double lambda_min = 0.0;
    double min_eigenvalue = 0.0;
    bool positive_definite = false;
};

inline MetricCertificate certify_metric(const ComplexMatrix& eta, double pd_tol = default_pd_tol) {
    if (!eta.is_square()) throw ShapeError("certify_metric: matrix is not square");
    if (!is_hermitian(eta, default_eig_tol)) {
        throw ContractViolation("certify_metric: metric is not Hermitian");
    }
    const std::size_t n = eta.rows();
    MetricCertificate cert;
    cert.alpha0 = trace(eta).real() / static_cast<double>(n);

    MatrixBuffer traceless(eta);
    for (std::size_t i = 0; i < n; ++i) traceless(i, i) -= cert.alpha0;
    const ComplexMatrix deviation = std::move(traceless).build();
    cert.alpha0_min = frobenius_norm(deviation) / std::sqrt(2.0);

    const auto eig = hermitian_eig(deviation);
    const double mu_min = eig.eigenvalues.front();
    cert.lambda_min = mu_min < 0.0 ? -mu_min : 0.0;
    cert.min_eigenvalue = cert.alpha0 + mu_min;
    cert.positive_definite = cert.min_eigenvalue > pd_tol;
    return cert;
}

/// ||O^dagger eta - eta O||_F / (||eta||_F ||O||_F); no invertibility
/// requirement, since the identity O^dagger eta = eta O needs none.
inline double pseudo_hermiticity_residual(const ComplexMatrix& op, const ComplexMatrix& eta) {
    require_same_square(op, eta, "pseudo_hermiticity_residual");
    if (!is_hermitian(eta, default_eig_tol)) {
        throw ContractViolation("pseudo_hermiticity_residual: metric is not Hermitian");
    }
    const double num = frobenius_norm(matmul(adjoint(op), eta) - matmul(eta, op));
    if (num == 0.0) return 0.0;
    const double den = frobenius_norm(eta) * frobenius_norm(op);
    return num / std::max(den, 1e-300);
}

/// Same residual with the metric contract enforced: a singular eta is
/// rejected. The caller compares the result with its tolerance.
inline double verify_pseudo_hermiticity(const ComplexMatrix& op, const ComplexMatrix& eta,
                                        double pd_tol = default_pd_tol) {
    require_same_square(op, eta, "verify_pseudo_hermiticity");
    if (!is_hermitian(eta, default_eig_tol)) {
        throw ContractViolation("verify_pseudo_hermiticity: metric is not Hermitian");
    }
    const auto eig = hermitian_eig(eta);
    double min_abs = std::abs(eig.eigenvalues.front());
    for (double v : eig.eigenvalues) min_abs = std::min(min_abs, std::abs(v));
    if (min_abs <= pd_tol) {
        throw InvalidMetricError("verify_pseudo_hermiticity: metric is singular");
    }
    return pseudo_hermiticity_residual(op, eta);
}

/// rho = sqrt(eta), its inverse, and the Hermitian image h = rho O rho^{-1}
/// that is isospectral with O.
struct Hermitization {
    ComplexMatrix h;
    ComplexMatrix rho;
    ComplexMatrix rho_inv;
};

inline Hermitization hermitize(const ComplexMatrix& op, const ComplexMatrix& eta,
                               double pd_tol = default_pd_tol) {
    require_same_square(op, eta, "hermitize");
    auto roots = sqrt_spd(eta, pd_tol);
    ComplexMatrix h = matmul(matmul(roots.root, op), roots.inverse_root);
    return Hermitization{std::move(h), std::move(roots.root), std::move(roots.inverse_root)};
}

/// Ascending real eigenvalues of a pseudo-hermitian operator with
/// positive-definite metric, computed through hermitization. General
/// non-symmetric eigensolvers are deliberately not used anywhere.
inline std::vector<double> real_spectrum(const ComplexMatrix& op, const ComplexMatrix& eta,
                                         double pd_tol = default_pd_tol) {
    const Hermitization herm = hermitize(op, eta, pd_tol);
    return hermitian_eig(herm.h).eigenvalues;
}

/// O = a0 S eta + a1 sum_k b_k eta^k with Hermitian S and Hermitian
/// invertible eta. Pseudo-hermitian with respect to eta by construction.
/// Immutable after compose(); the hermitization is computed at most once and
/// shared between copies.
class PseudoHermitianSystem {
public:
    std::size_t dimension() const noexcept { return eta_.rows(); }
    const ComplexMatrix& eta() const noexcept { return eta_; }
    const ComplexMatrix& s() const noexcept { return s_; }
    const ComplexMatrix& op() const noexcept { return op_; }
    double a0() const noexcept { return a0_; }
    double a1() const noexcept { return a1_; }
    const std::vector<double>& b() const noexcept { return b_; }

    /// Residual of the pseudo-hermiticity identity, recorded at compose time.
    double pseudo_hermiticity_residual() const noexcept { return residual_; }

    /// Cached; throws NotPositiveDefiniteError when the metric is indefinite.
    const Hermitization& hermitization() const {
        std::call_once(cache_->once, [this] { cache_->data.emplace(hermitize(op_, eta_, pd_tol_)); });
        return *cache_->data;
    }

private:
    friend PseudoHermitianSystem compose(const ComplexMatrix&, const ComplexMatrix&, double, double,
                                         std::vector<double>, double);

    PseudoHermitianSystem(ComplexMatrix eta, ComplexMatrix s, double a0, double a1,
                          std::vector<double> b, ComplexMatrix op, double residual, double pd_tol)
        : eta_(std::move(eta)),
          s_(std::move(s)),
          a0_(a0),
          a1_(a1),
          b_(std::move(b)),
          op_(std::move(op)),
          residual_(residual),
          pd_tol_(pd_tol),
          cache_(std::make_shared<Cache>()) {}

    struct Cache {
        std::once_flag once;
        std::optional<Hermitization> data;
    };

    ComplexMatrix eta_;
    ComplexMatrix s_;
    double a0_;
    double a1_;
    std::vector<double> b_;
    ComplexMatrix op_;
    double residual_;
    double pd_tol_;
    std::shared_ptr<Cache> cache_;
};

inline PseudoHermitianSystem compose(const ComplexMatrix& eta, const ComplexMatrix& s, double a0,
                                     double a1, std::vector<double> b = {},
                                     double pd_tol = default_pd_tol) {
    require_same_square(eta, s, "compose");
    if (!is_hermitian(eta, default_eig_tol) || !is_hermitian(s, default_eig_tol)) {
        throw ContractViolation("compose: eta and S must be Hermitian");
    }
    const std::size_t n = eta.rows();
    if (b.size() > n - 1) {
        throw DomainError("compose: polynomial degree of M exceeds N-1");
    }
    {
        const auto eig = hermitian_eig(eta);
        double min_abs = std::abs(eig.eigenvalues.front());
        for (double v : eig.eigenvalues) min_abs = std::min(min_abs, std::abs(v));
        if (min_abs <= pd_tol) throw InvalidMetricError("compose: metric is singular");
    }

    ComplexMatrix op = Complex(a0, 0.0) * matmul(s, eta);
    if (a1 != 0.0 && !b.empty()) {
        ComplexMatrix power = eta;  // eta^k, k starting at 1
        MatrixBuffer acc(n, n);
        for (std::size_t k = 0; k < b.size(); ++k) {
            if (k > 0) power = matmul(power, eta);
            if (b[k] == 0.0) continue;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) acc.add(i, j, b[k] * power(i, j));
        }
        op = op + Complex(a1, 0.0) * std::move(acc).build();
    }

    const double residual = pseudo_hermiticity_residual(op, eta);
    if (residual > 1e-10) {
        throw NumericalError("compose: pseudo-hermiticity residual above 1e-10");
    }
    return PseudoHermitianSystem(eta, s, a0, a1, std::move(b), std::move(op), residual, pd_tol);
}

/// Splits O into the Hermitian part (a0/2){S,eta} + a1 M and the
/// anti-hermitian part (a0/2)[S,eta]; the latter is traceless.
inline std::pair<ComplexMatrix, ComplexMatrix> split_hermitian_parts(const PseudoHermitianSystem& sys) {
    const ComplexMatrix dag = adjoint(sys.op());
    return {Complex(0.5, 0.0) * (sys.op() + dag), Complex(0.5, 0.0) * (sys.op() - dag)};
}

inline const Hermitization& hermitize(const PseudoHermitianSystem& sys) { return sys.hermitization(); }

inline std::vector<double> real_spectrum(const PseudoHermitianSystem& sys) {
    return hermitian_eig(sys.hermitization().h).eigenvalues;
}

/// Complex amplitudes of a state; entries must be finite.
struct StateVector {
    StateVector() = default;
    explicit StateVector(std::vector<Complex> amps) : amplitudes(std::move(amps)) {
        for (const Complex& z : amplitudes) {
            if (!is_finite(z)) throw DomainError("StateVector: non-finite amplitude");
        }
    }
    std::size_t dimension() const noexcept { return amplitudes.size(); }
    std::vector<Complex> amplitudes;
};

inline std::vector<Complex> apply_matrix(const ComplexMatrix& m, std::span<const Complex> v) {
    if (m.cols() != v.size()) throw ShapeError("apply: dimension mismatch");
    std::vector<Complex> out(m.rows(), Complex(0.0, 0.0));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out[i] += m(i, j) * v[j];
    return out;
}

/// <<u, v>>_eta = u^dagger eta v.
inline Complex metric_inner_product(const ComplexMatrix& eta, const StateVector& u, const StateVector& v) {
    if (!eta.is_square() || eta.rows() != u.dimension() || u.dimension() != v.dimension()) {
        throw ShapeError("metric_inner_product: dimension mismatch");
    }
    const auto ev = apply_matrix(eta, v.amplitudes);
    Complex sum(0.0, 0.0);
    for (std::size_t i = 0; i < ev.size(); ++i) sum += std::conj(u.amplitudes[i]) * ev[i];
    return sum;
}

/// psi(t) = rho^{-1} exp(-i t h) rho psi(0); conserves the eta-norm. Uses
/// the intertwining of exp(-i t O) with the hermitized evolution instead of
/// a series expansion.
inline StateVector pseudo_unitary_evolve(const PseudoHermitianSystem& sys, double t,
                                         const StateVector& psi0) {
    if (psi0.dimension() != sys.dimension()) {
        throw ShapeError("pseudo_unitary_evolve: state dimension mismatch");
    }
    const Hermitization& herm = sys.hermitization();
    const ComplexMatrix u = exp_antihermitian_from(herm.h, t);
    auto v = apply_matrix(herm.rho, psi0.amplitudes);
    v = apply_matrix(u, v);
    v = apply_matrix(herm.rho_inv, v);
    return StateVector(std::move(v));
}

/// Complex coefficients (delta_0 .. delta_{N^2-1}) of O = S eta in the
/// T-basis, obtained from the expansions of eta and S through the
/// structure-constant tensors:
///   delta_0 = alpha_0 beta_0 + (2/N) sum_a alpha_a beta_a
///   delta_a = alpha_0 beta_a + beta_0 alpha_a
///             + sum_{b,c} (d^{abc} - i f^{abc}) alpha_b beta_c.
struct DeltaCoefficients {
    std::size_t dimension = 0;
    std::vector<Complex> delta;
};

inline DeltaCoefficients delta_coefficients(const SuBasis& basis, const StructureConstants& fd,
                                            const BasisExpansion& alpha, const BasisExpansion& beta) {
    const std::size_t dim = basis.dimension();
    if (fd.dimension() != dim || alpha.dimension != dim || beta.dimension != dim) {
        throw ShapeError("delta_coefficients: dimension mismatch");
    }
    const std::size_t count = dim * dim;
    const auto& av = alpha.coefficients;
    const auto& bv = beta.coefficients;

    DeltaCoefficients out{dim, std::vector<Complex>(count, Complex(0.0, 0.0))};
    double dot = 0.0;
    for (std::size_t a = 1; a < count; ++a) dot += av[a] * bv[a];
    out.delta[0] = av[0] * bv[0] + (2.0 / static_cast<double>(dim)) * dot;
    for (std::size_t a = 1; a < count; ++a) {
        out.delta[a] = av[0] * bv[a] + bv[0] * av[a];
    }
    for (const auto& [key, value] : fd.d_canonical()) {
        detail::for_each_permutation(key, value, false,
                                     [&](std::size_t a, std::size_t b, std::size_t c, double v) {
                                         out.delta[a] += v * av[b] * bv[c];
                                     });
    }
    for (const auto& [key, value] : fd.f_canonical()) {
        detail::for_each_permutation(key, value, true,
                                     [&](std::size_t a, std::size_t b, std::size_t c, double v) {
                                         out.delta[a] += Complex(0.0, -v) * (av[b] * bv[c]);
                                     });
    }
    return out;
}

/// Flat indices whose coefficients may be nonzero for a tridiagonal-band
/// operator: the symmetric nearest-neighbour labels a = k^2+2k-2 and the
/// diagonal labels a = n^2-1.
inline std::set<std::size_t> tridiagonal_pattern(std::size_t dim) {
    std::set<std::size_t> pattern;
    for (std::size_t k = 1; k + 1 <= dim; ++k) pattern.insert(k * k + 2 * k - 2);
    for (std::size_t n = 2; n <= dim; ++n) pattern.insert(n * n - 1);
    return pattern;
}

/// All labels touching sites at chain distance <= width, both symmetric and
/// antisymmetric, plus every diagonal label. With `periodic`, bonds wrapping
/// the chain ends are included as their flat labels (k, j) with j - k close
/// to the dimension.
inline std::set<std::size_t> band_pattern(std::size_t dim, std::size_t width, bool periodic) {
    std::set<std::size_t> pattern;
    for (std::size_t k = 1; k <= dim; ++k) {
        for (std::size_t w = 1; w <= width; ++w) {
            std::size_t lo = k, hi = k + w;
            if (hi > dim) {
                if (!periodic) continue;
                hi -= dim;  // wrapped bond (hi, lo) with hi < lo
                std::swap(lo, hi);
            }
            if (lo == hi) continue;
            pattern.insert(flat_index({GeneratorKind::Symmetric, lo, hi, 0, 0}, dim));
            pattern.insert(flat_index({GeneratorKind::Antisymmetric, lo, hi, 0, 0}, dim));
        }
    }
    for (std::size_t n = 2; n <= dim; ++n) pattern.insert(n * n - 1);
    return pattern;
}

/// delta coefficients split by band membership, both parts ordered by
/// ascending flat index. A configuration satisfies a band-sparsity condition
/// system when every off_band magnitude is below tolerance and the on_band
/// values meet their targets.
struct BandPartition {
    std::vector<Complex> on_band;
    std::vector<Complex> off_band;
};

inline BandPartition band_condition_residuals(const DeltaCoefficients& delta,
                                              const std::set<std::size_t>& pattern) {
    const std::size_t count = delta.dimension * delta.dimension;
    for (std::size_t a : pattern) {
        if (a < 1 || a >= count) throw DomainError("band_condition_residuals: pattern index out of range");
    }
    BandPartition part;
    for (std::size_t a = 1; a < count; ++a) {
        (pattern.count(a) ? part.on_band : part.off_band).push_back(delta.delta[a]);
    }
    return part;
}

struct BandSolveResult {
    std::optional<BasisExpansion> solution;
    double max_residual = 0.0;  // max per-equation magnitude
};

/// Solves the band-sparsity condition system for the metric coefficients
/// alpha_a (a >= 1), treating alpha_0 and the full beta expansion as fixed
/// parameters: for each flat index a in `pattern`, delta_a(alpha) must equal
/// the matching entry of `targets`. The system is linear in alpha; it is
/// solved by minimum-norm least squares with rank tolerance 1e-10 and
/// accepted only if every equation residual is <= 1e-8.
inline BandSolveResult solve_band_conditions(const SuBasis& basis, const StructureConstants& fd,
                                             const BasisExpansion& beta, double alpha0,
                                             const std::set<std::size_t>& pattern,
                                             const std::vector<Complex>& targets) {
    const std::size_t dim = basis.dimension();
    if (fd.dimension() != dim || beta.dimension != dim) {
        throw ShapeError("solve_band_conditions: dimension mismatch");
    }
    if (targets.size() != pattern.size()) {
        throw ShapeError("solve_band_conditions: one target per pattern index required");
    }
    const std::size_t m = dim * dim - 1;
    std::vector<std::size_t> rows(pattern.begin(), pattern.end());
    for (std::size_t a : rows) {
        if (a < 1 || a > m) throw DomainError("solve_band_conditions: pattern index out of range");
    }
    const std::size_t k = rows.size();

    BasisExpansion result{dim, std::vector<double>(dim * dim, 0.0)};
    result.coefficients[0] = alpha0;
    if (k == 0) return BandSolveResult{std::move(result), 0.0};

    std::vector<std::size_t> row_of(m + 1, k);  // k = not constrained
    for (std::size_t r = 0; r < k; ++r) row_of[rows[r]] = r;

    const auto& bv = beta.coefficients;
    // Complex coefficient matrix G of the constrained equations:
    // delta_a = alpha0 beta_a + sum_b G[a][b] alpha_b.
    std::vector<Complex> g(k * m, Complex(0.0, 0.0));
    for (std::size_t r = 0; r < k; ++r) g[r * m + (rows[r] - 1)] += bv[0];
    for (const auto& [key, value] : fd.d_canonical()) {
        detail::for_each_permutation(key, value, false,
                                     [&](std::size_t a, std::size_t b, std::size_t c, double v) {
                                         if (row_of[a] < k) g[row_of[a] * m + (b - 1)] += v * bv[c];
                                     });
    }
    for (const auto& [key, value] : fd.f_canonical()) {
        detail::for_each_permutation(key, value, true,
                                     [&](std::size_t a, std::size_t b, std::size_t c, double v) {
                                         if (row_of[a] < k) g[row_of[a] * m + (b - 1)] += Complex(0.0, -v) * bv[c];
                                     });
    }
    std::vector<Complex> rhs(k);
    for (std::size_t r = 0; r < k; ++r) rhs[r] = targets[r] - alpha0 * bv[rows[r]];

    // Stack real and imaginary parts into a real system.
    std::vector<double> a_real(2 * k * m), b_real(2 * k);
    for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t col = 0; col < m; ++col) {
            a_real[r * m + col] = g[r * m + col].real();
            a_real[(k + r) * m + col] = g[r * m + col].imag();
        }
        b_real[r] = rhs[r].real();
        b_real[k + r] = rhs[r].imag();
    }
    const auto ls = least_squares_min_norm(2 * k, m, a_real, b_real, 1e-10);

    BandSolveResult out;
    for (std::size_t r = 0; r < k; ++r) {
        Complex ri = -rhs[r];
        for (std::size_t col = 0; col < m; ++col) ri += g[r * m + col] * ls.x[col];
        out.max_residual = std::max(out.max_residual, std::abs(ri));
    }
    if (out.max_residual <= 1e-8) {
        std::copy(ls.x.begin(), ls.x.end(), result.coefficients.begin() + 1);
        out.solution = std::move(result);
    }
    return out;
}

}  // namespace pseudoherm
