#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pseudoherm/errors.hpp"

namespace pseudoherm {

using Complex = std::complex<double>;

inline bool is_finite(Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Dense complex matrix with row-major storage. Value-semantic and immutable
/// once constructed; assemble entries through MatrixBuffer or the factory
/// constructors. Constructors reject non-finite entries.
class ComplexMatrix {
public:
    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), entries_(rows * cols, Complex(0.0, 0.0)) {
        check_shape();
    }

    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
        : rows_(rows), cols_(cols), entries_(std::move(entries)) {
        check_shape();
        if (entries_.size() != rows_ * cols_) {
            throw ShapeError("ComplexMatrix: entry count " + std::to_string(entries_.size()) +
                             " does not match " + std::to_string(rows_) + "x" + std::to_string(cols_));
        }
        check_finite();
    }

    ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
        : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
        check_shape();
        entries_.reserve(rows_ * cols_);
        for (const auto& row : rows) {
            if (row.size() != cols_) {
                throw ShapeError("ComplexMatrix: ragged initializer list");
            }
            entries_.insert(entries_.end(), row.begin(), row.end());
        }
        check_finite();
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.entries_[i * n + i] = 1.0;
        return m;
    }

    static ComplexMatrix diagonal(std::span<const double> values) {
        ComplexMatrix m(values.size(), values.size());
        for (std::size_t i = 0; i < values.size(); ++i) m.entries_[i * values.size() + i] = values[i];
        m.check_finite();
        return m;
    }

    static ComplexMatrix diagonal(std::span<const Complex> values) {
        ComplexMatrix m(values.size(), values.size());
        for (std::size_t i = 0; i < values.size(); ++i) m.entries_[i * values.size() + i] = values[i];
        m.check_finite();
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    const Complex& operator()(std::size_t i, std::size_t j) const {
        return entries_[i * cols_ + j];
    }

    std::span<const Complex> entries() const noexcept { return entries_; }

private:
    friend class MatrixBuffer;

    std::size_t rows_;
    std::size_t cols_;
    std::vector<Complex> entries_;

    void check_shape() const {
        if (rows_ < 1 || cols_ < 1) {
            throw DomainError("ComplexMatrix: rows and cols must be >= 1");
        }
    }

    void check_finite() const {
        for (const Complex& z : entries_) {
            if (!is_finite(z)) throw DomainError("ComplexMatrix: non-finite entry");
        }
    }
};

/// Mutable staging area for assembling a ComplexMatrix entry by entry.
class MatrixBuffer {
public:
    MatrixBuffer(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), entries_(rows * cols, Complex(0.0, 0.0)) {
        if (rows < 1 || cols < 1) throw DomainError("MatrixBuffer: rows and cols must be >= 1");
    }

    explicit MatrixBuffer(const ComplexMatrix& m)
        : rows_(m.rows()), cols_(m.cols()), entries_(m.entries().begin(), m.entries().end()) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    Complex& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

    void add(std::size_t i, std::size_t j, Complex value) { entries_[i * cols_ + j] += value; }

    /// Consumes the buffer; validates finiteness.
    ComplexMatrix build() && {
        ComplexMatrix m(rows_, cols_);
        m.entries_ = std::move(entries_);
        m.check_finite();
        return m;
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<Complex> entries_;
};

/// Conjugate transpose.
inline ComplexMatrix adjoint(const ComplexMatrix& a) {
    MatrixBuffer out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = std::conj(a(i, j));
    return std::move(out).build();
}

inline ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: inner dimensions " + std::to_string(a.cols()) + " and " +
                         std::to_string(b.rows()) + " do not match");
    }
    MatrixBuffer out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex(0.0, 0.0)) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out.add(i, j, aik * b(k, j));
        }
    }
    return std::move(out).build();
}

inline Complex trace(const ComplexMatrix& a) {
    if (!a.is_square()) throw ShapeError("trace: matrix is not square");
    Complex sum(0.0, 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) sum += a(i, i);
    return sum;
}

inline void require_same_square(const ComplexMatrix& a, const ComplexMatrix& b, const char* who) {
    if (!a.is_square() || !b.is_square() || a.rows() != b.rows()) {
        throw ShapeError(std::string(who) + ": operands must be square and of equal dimension");
    }
}

inline ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("operator+: shape mismatch");
    MatrixBuffer out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) + b(i, j);
    return std::move(out).build();
}

inline ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("operator-: shape mismatch");
    MatrixBuffer out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) - b(i, j);
    return std::move(out).build();
}

inline ComplexMatrix operator*(Complex scale, const ComplexMatrix& a) {
    MatrixBuffer out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = scale * a(i, j);
    return std::move(out).build();
}

inline ComplexMatrix operator*(double scale, const ComplexMatrix& a) {
    return Complex(scale, 0.0) * a;
}

inline ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    return matmul(a, b);
}

inline ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_square(a, b, "commutator");
    return matmul(a, b) - matmul(b, a);
}

inline ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_square(a, b, "anticommutator");
    return matmul(a, b) + matmul(b, a);
}

inline double frobenius_norm(const ComplexMatrix& a) {
    double sum = 0.0;
    for (const Complex& z : a.entries()) sum += std::norm(z);
    return std::sqrt(sum);
}

/// ||A - A^dagger||_F <= tol * max(1, ||A||_F). Non-square input is a shape error.
inline bool is_hermitian(const ComplexMatrix& a, double tol) {
    if (!a.is_square()) throw ShapeError("is_hermitian: matrix is not square");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) sum += std::norm(a(i, j) - std::conj(a(j, i)));
    return std::sqrt(sum) <= tol * std::max(1.0, frobenius_norm(a));
}

/// Determinant by LU factorization with partial pivoting. Used as a
/// verification oracle for spectra; never as an eigenvalue route.
inline Complex determinant(const ComplexMatrix& a) {
    if (!a.is_square()) throw ShapeError("determinant: matrix is not square");
    const std::size_t n = a.rows();
    std::vector<Complex> lu(a.entries().begin(), a.entries().end());
    Complex det(1.0, 0.0);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::abs(lu[col * n + col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            double mag = std::abs(lu[r * n + col]);
            if (mag > best) {
                best = mag;
                pivot = r;
            }
        }
        if (best == 0.0) return Complex(0.0, 0.0);
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu[pivot * n + j], lu[col * n + j]);
            det = -det;
        }
        const Complex d = lu[col * n + col];
        det *= d;
        for (std::size_t r = col + 1; r < n; ++r) {
            const Complex factor = lu[r * n + col] / d;
            if (factor == Complex(0.0, 0.0)) continue;
            for (std::size_t j = col; j < n; ++j) lu[r * n + j] -= factor * lu[col * n + j];
        }
    }
    return det;
}

}  // namespace pseudoherm
