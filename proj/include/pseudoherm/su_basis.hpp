#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pseudoherm/errors.hpp"
#include "pseudoherm/matrix.hpp"

namespace pseudoherm {

enum class GeneratorKind { Identity, Symmetric, Antisymmetric, Diagonal };

/// Label of one basis element of u(N) = span{I} + su(N). Site indices k < j
/// are 1-based; `n` is the level of a diagonal generator (2..N); `a` is the
/// flat index in 0..N^2-1.
struct GeneratorIndex {
    GeneratorKind kind = GeneratorKind::Identity;
    std::size_t k = 0;
    std::size_t j = 0;
    std::size_t n = 0;
    std::size_t a = 0;
};

/// Flat index law: Symmetric(k,j) -> j^2 + 2(k-j) - 1, Antisymmetric(k,j) ->
/// j^2 + 2(k-j), Diagonal(n) -> n^2 - 1, Identity -> 0.
inline std::size_t flat_index(const GeneratorIndex& idx, std::size_t dim) {
    switch (idx.kind) {
        case GeneratorKind::Identity:
            return 0;
        case GeneratorKind::Symmetric:
        case GeneratorKind::Antisymmetric: {
            if (idx.k < 1 || idx.k >= idx.j || idx.j > dim) {
                throw DomainError("flat_index: require 1 <= k < j <= N");
            }
            const std::size_t base = idx.j * idx.j + 2 * idx.k - 2 * idx.j - 1;
            return idx.kind == GeneratorKind::Symmetric ? base : base + 1;
        }
        case GeneratorKind::Diagonal:
            if (idx.n < 2 || idx.n > dim) throw DomainError("flat_index: require 2 <= n <= N");
            return idx.n * idx.n - 1;
    }
    throw DomainError("flat_index: unknown generator kind");
}

inline GeneratorIndex label_of(std::size_t a, std::size_t dim) {
    if (a >= dim * dim) throw DomainError("label_of: flat index out of range");
    if (a == 0) return GeneratorIndex{GeneratorKind::Identity, 0, 0, 0, 0};
    // Indices (j-1)^2 .. j^2-1 belong to column block j: symmetric and
    // antisymmetric pairs for k = 1..j-1, then the diagonal generator.
    std::size_t j = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(a)))) + 1;
    while (j > 1 && (j - 1) * (j - 1) > a) --j;  // guard the float sqrt at block edges
    while (j * j <= a) ++j;
    if (j * j == a + 1) return GeneratorIndex{GeneratorKind::Diagonal, 0, 0, j, a};
    const std::size_t offset = a - (j - 1) * (j - 1);
    const std::size_t k = offset / 2 + 1;
    const auto kind = (offset % 2 == 0) ? GeneratorKind::Symmetric : GeneratorKind::Antisymmetric;
    return GeneratorIndex{kind, k, j, 0, a};
}

/// The N^2 Hermitian basis matrices of an N-dimensional operator space:
/// T^0 = I, then the generalized Gell-Mann matrices T^1..T^{N^2-1} with
/// Tr(T^a T^b) = 2 delta^{ab} for a,b >= 1.
class SuBasis {
public:
    explicit SuBasis(std::size_t dim) : dim_(dim) {
        if (dim < 2) throw DomainError("SuBasis: dimension must be >= 2");
        generators_.reserve(dim * dim);
        labels_.reserve(dim * dim);
        for (std::size_t a = 0; a < dim * dim; ++a) {
            GeneratorIndex idx = label_of(a, dim);
            labels_.push_back(idx);
            generators_.push_back(make_generator(idx));
        }
    }

    std::size_t dimension() const noexcept { return dim_; }
    std::size_t count() const noexcept { return generators_.size(); }

    const ComplexMatrix& generator(std::size_t a) const {
        if (a >= generators_.size()) throw DomainError("SuBasis: flat index out of range");
        return generators_[a];
    }

    const GeneratorIndex& label(std::size_t a) const {
        if (a >= labels_.size()) throw DomainError("SuBasis: flat index out of range");
        return labels_[a];
    }

private:
    ComplexMatrix make_generator(const GeneratorIndex& idx) const {
        MatrixBuffer m(dim_, dim_);
        switch (idx.kind) {
            case GeneratorKind::Identity:
                for (std::size_t i = 0; i < dim_; ++i) m(i, i) = 1.0;
                break;
            case GeneratorKind::Symmetric:
                m(idx.k - 1, idx.j - 1) = 1.0;
                m(idx.j - 1, idx.k - 1) = 1.0;
                break;
            case GeneratorKind::Antisymmetric:
                m(idx.k - 1, idx.j - 1) = Complex(0.0, -1.0);
                m(idx.j - 1, idx.k - 1) = Complex(0.0, 1.0);
                break;
            case GeneratorKind::Diagonal: {
                const double scale = std::sqrt(2.0 / (static_cast<double>(idx.n) * idx.n - idx.n));
                for (std::size_t i = 0; i + 1 < idx.n; ++i) m(i, i) = scale;
                m(idx.n - 1, idx.n - 1) = -scale * (static_cast<double>(idx.n) - 1.0);
                break;
            }
        }
        return std::move(m).build();
    }

    std::size_t dim_;
    std::vector<ComplexMatrix> generators_;
    std::vector<GeneratorIndex> labels_;
};

inline SuBasis build_basis(std::size_t dim) { return SuBasis(dim); }

/// Real coefficients (alpha_0 .. alpha_{N^2-1}) of a Hermitian matrix in the
/// T-basis: H = sum_a alpha_a T^a.
struct BasisExpansion {
    std::size_t dimension = 0;
    std::vector<double> coefficients;
};

/// Coefficients of an arbitrary square matrix in the T-basis, complex in
/// general: slot 0 holds Tr(M)/N, slot a >= 1 holds Tr(M T^a)/2. Uses the
/// sparsity of the generators; O(N^2) overall.
inline std::vector<Complex> expand_complex(const SuBasis& basis, const ComplexMatrix& m) {
    const std::size_t dim = basis.dimension();
    if (!m.is_square() || m.rows() != dim) throw ShapeError("expand_complex: dimension mismatch");
    std::vector<Complex> coeffs(dim * dim);

    Complex tr(0.0, 0.0);
    std::vector<Complex> diag_prefix(dim + 1, Complex(0.0, 0.0));
    for (std::size_t i = 0; i < dim; ++i) {
        tr += m(i, i);
        diag_prefix[i + 1] = diag_prefix[i] + m(i, i);
    }
    coeffs[0] = tr / static_cast<double>(dim);

    for (std::size_t a = 1; a < dim * dim; ++a) {
        const GeneratorIndex& idx = basis.label(a);
        switch (idx.kind) {
            case GeneratorKind::Symmetric:
                coeffs[a] = 0.5 * (m(idx.j - 1, idx.k - 1) + m(idx.k - 1, idx.j - 1));
                break;
            case GeneratorKind::Antisymmetric:
                coeffs[a] = Complex(0.0, -0.5) * (m(idx.j - 1, idx.k - 1) - m(idx.k - 1, idx.j - 1));
                break;
            case GeneratorKind::Diagonal: {
                const double scale = std::sqrt(2.0 / (static_cast<double>(idx.n) * idx.n - idx.n));
                coeffs[a] = 0.5 * scale *
                            (diag_prefix[idx.n - 1] - (static_cast<double>(idx.n) - 1.0) * m(idx.n - 1, idx.n - 1));
                break;
            }
            case GeneratorKind::Identity:
                break;
        }
    }
    return coeffs;
}

/// Imaginary residue allowed when realifying coefficients that are exactly
/// real in exact arithmetic.
inline constexpr double imag_residue_tol = 1e-12;

inline BasisExpansion expand_hermitian(const SuBasis& basis, const ComplexMatrix& h) {
    if (!h.is_square() || h.rows() != basis.dimension()) {
        throw ShapeError("expand_hermitian: dimension mismatch");
    }
    if (!is_hermitian(h, 1e-10)) throw ContractViolation("expand_hermitian: input is not Hermitian");
    const auto coeffs = expand_complex(basis, h);
    const double bound = imag_residue_tol * std::max(1.0, frobenius_norm(h));
    BasisExpansion e{basis.dimension(), {}};
    e.coefficients.reserve(coeffs.size());
    for (const Complex& c : coeffs) {
        if (std::abs(c.imag()) > bound) {
            throw NumericalError("expand_hermitian: imaginary residue above bound");
        }
        e.coefficients.push_back(c.real());
    }
    return e;
}

inline ComplexMatrix reconstruct(const SuBasis& basis, std::span<const Complex> coefficients) {
    const std::size_t dim = basis.dimension();
    if (coefficients.size() != dim * dim) throw ShapeError("reconstruct: coefficient length must be N^2");
    MatrixBuffer m(dim, dim);
    for (std::size_t a = 0; a < coefficients.size(); ++a) {
        const Complex c = coefficients[a];
        if (c == Complex(0.0, 0.0)) continue;
        const ComplexMatrix& t = basis.generator(a);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) m.add(i, j, c * t(i, j));
    }
    return std::move(m).build();
}

inline ComplexMatrix reconstruct(const SuBasis& basis, const BasisExpansion& e) {
    if (e.dimension != basis.dimension()) throw ShapeError("reconstruct: dimension mismatch");
    std::vector<Complex> coeffs(e.coefficients.begin(), e.coefficients.end());
    return reconstruct(basis, std::span<const Complex>(coeffs));
}

/// Sparse structure-constant tensors of su(N): the totally antisymmetric
/// f^{abc} = Tr([T^a,T^b] T^c)/(4i) and totally symmetric
/// d^{abc} = Tr({T^a,T^b} T^c)/4, stored on canonically ordered triples and
/// recovered by permutation symmetry.
class StructureConstants {
public:
    using Triple = std::array<std::size_t, 3>;

    std::size_t dimension() const noexcept { return dim_; }

    double f(std::size_t a, std::size_t b, std::size_t c) const {
        check_range(a, b, c);
        if (a == b || b == c || a == c) return 0.0;
        Triple t{a, b, c};
        const int sign = sort_parity(t);
        const auto it = f_.find(t);
        return it == f_.end() ? 0.0 : sign * it->second;
    }

    double d(std::size_t a, std::size_t b, std::size_t c) const {
        check_range(a, b, c);
        Triple t{a, b, c};
        std::sort(t.begin(), t.end());
        const auto it = d_.find(t);
        return it == d_.end() ? 0.0 : it->second;
    }

    /// Canonical nonzero entries: f on strictly increasing triples, d on
    /// non-decreasing triples.
    const std::map<Triple, double>& f_canonical() const noexcept { return f_; }
    const std::map<Triple, double>& d_canonical() const noexcept { return d_; }

private:
    friend StructureConstants structure_constants(const SuBasis&, bool);

    static int sort_parity(Triple& t) {
        int sign = 1;
        if (t[0] > t[1]) { std::swap(t[0], t[1]); sign = -sign; }
        if (t[1] > t[2]) { std::swap(t[1], t[2]); sign = -sign; }
        if (t[0] > t[1]) { std::swap(t[0], t[1]); sign = -sign; }
        return sign;
    }

    void check_range(std::size_t a, std::size_t b, std::size_t c) const {
        const std::size_t m = dim_ * dim_ - 1;
        if (a < 1 || a > m || b < 1 || b > m || c < 1 || c > m) {
            throw DomainError("StructureConstants: index out of range 1..N^2-1");
        }
    }

    std::size_t dim_ = 0;
    std::map<Triple, double> f_;
    std::map<Triple, double> d_;
};

/// Full-tensor computation is capped at N <= 12 unless forced; the cost
/// grows as O(N^6) trace evaluations.
inline constexpr std::size_t structure_constant_dim_cap = 12;

inline StructureConstants structure_constants(const SuBasis& basis, bool force = false) {
    const std::size_t dim = basis.dimension();
    if (dim > structure_constant_dim_cap && !force) {
        throw DomainError("structure_constants: N > 12 requires the force flag");
    }
    StructureConstants out;
    out.dim_ = dim;
    const std::size_t m = dim * dim - 1;
    for (std::size_t a = 1; a <= m; ++a) {
        for (std::size_t b = a; b <= m; ++b) {
            const ComplexMatrix prod = matmul(basis.generator(a), basis.generator(b));
            // [T^a,T^b] = P - P^dagger and {T^a,T^b} = P + P^dagger for
            // Hermitian generators.
            MatrixBuffer comm(dim, dim), anti(dim, dim);
            for (std::size_t i = 0; i < dim; ++i) {
                for (std::size_t j = 0; j < dim; ++j) {
                    const Complex p = prod(i, j);
                    const Complex q = std::conj(prod(j, i));
                    comm(i, j) = p - q;
                    anti(i, j) = p + q;
                }
            }
            const auto comm_coeffs = expand_complex(basis, std::move(comm).build());
            const auto anti_coeffs = expand_complex(basis, std::move(anti).build());
            for (std::size_t c = b; c <= m; ++c) {
                // d^{abc} = Tr({T^a,T^b} T^c)/4 = anti_coeffs[c]/2.
                const Complex dval = 0.5 * anti_coeffs[c];
                if (std::abs(dval.imag()) > imag_residue_tol) {
                    throw NumericalError("structure_constants: imaginary residue in d above bound");
                }
                if (std::abs(dval.real()) > imag_residue_tol) {
                    out.d_.insert({{a, b, c}, dval.real()});
                }
                // f^{abc} = Tr([T^a,T^b] T^c)/(4i) = comm_coeffs[c]/(2i).
                if (a < b && c > b) {
                    const Complex fval = Complex(0.0, -0.5) * comm_coeffs[c];
                    if (std::abs(fval.imag()) > imag_residue_tol) {
                        throw NumericalError("structure_constants: imaginary residue in f above bound");
                    }
                    if (std::abs(fval.real()) > imag_residue_tol) {
                        out.f_.insert({{a, b, c}, fval.real()});
                    }
                }
            }
        }
    }
    return out;
}

/// Tr(T^a T^b T^c); equals 2(d^{abc} + i f^{abc}).
inline Complex triple_trace(const SuBasis& basis, std::size_t a, std::size_t b, std::size_t c) {
    const std::size_t m = basis.dimension() * basis.dimension() - 1;
    if (a < 1 || a > m || b < 1 || b > m || c < 1 || c > m) {
        throw DomainError("triple_trace: index out of range 1..N^2-1");
    }
    return trace(matmul(matmul(basis.generator(a), basis.generator(b)), basis.generator(c)));
}

/// Elementary projector |j+1><j+1| built from the identity and the diagonal
/// generators only (0 <= j <= N-1):
///   |j+1><j+1| = I/N - sqrt(j/(2(j+1))) T^{(j+1)^2-1}
///                + sum_{l=0}^{N-j-2} T^{(j+l+2)^2-1} / sqrt(2(j+l+1)(j+l+2)).
inline ComplexMatrix projector_from_diagonals(const SuBasis& basis, std::size_t j) {
    const std::size_t dim = basis.dimension();
    if (j >= dim) throw DomainError("projector_from_diagonals: site index out of range");
    std::vector<Complex> coeffs(dim * dim, Complex(0.0, 0.0));
    coeffs[0] = 1.0 / static_cast<double>(dim);
    if (j >= 1) {
        coeffs[(j + 1) * (j + 1) - 1] = -std::sqrt(static_cast<double>(j) / (2.0 * (j + 1)));
    }
    for (std::size_t l = 0; l + j + 2 <= dim; ++l) {
        const double den = std::sqrt(2.0 * (j + l + 1.0) * (j + l + 2.0));
        coeffs[(j + l + 2) * (j + l + 2) - 1] = 1.0 / den;
    }
    return reconstruct(basis, std::span<const Complex>(coeffs));
}

namespace detail {

/// Invokes fn(p, q, r, value) for every distinct index permutation of a
/// canonical tensor entry; `antisymmetric` applies the permutation sign.
template <typename Fn>
void for_each_permutation(std::array<std::size_t, 3> t, double value, bool antisymmetric, Fn&& fn) {
    const std::array<std::array<std::size_t, 3>, 6> perms{{{0, 1, 2},
                                                           {0, 2, 1},
                                                           {1, 0, 2},
                                                           {1, 2, 0},
                                                           {2, 0, 1},
                                                           {2, 1, 0}}};
    const std::array<int, 6> signs{1, -1, -1, 1, 1, -1};
    std::array<std::array<std::size_t, 3>, 6> seen{};
    std::size_t seen_count = 0;
    for (std::size_t p = 0; p < 6; ++p) {
        const std::array<std::size_t, 3> idx{t[perms[p][0]], t[perms[p][1]], t[perms[p][2]]};
        bool duplicate = false;
        for (std::size_t s = 0; s < seen_count; ++s) {
            if (seen[s] == idx) { duplicate = true; break; }
        }
        if (duplicate) continue;
        seen[seen_count++] = idx;
        fn(idx[0], idx[1], idx[2], antisymmetric ? signs[p] * value : value);
    }
}

}  // namespace detail

}  // namespace pseudoherm
