#include "specmeter/matrix.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace specmeter {

Matrix::Matrix(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix dimension");
    data_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), cplx{});
}

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

bool Matrix::is_exactly_hermitian() const {
    if (!is_square()) return false;
    for (int i = 0; i < rows_; ++i) {
        if ((*this)(i, i).imag() != 0.0) return false;
        for (int j = i + 1; j < cols_; ++j) {
            if ((*this)(i, j) != std::conj((*this)(j, i))) return false;
        }
    }
    return true;
}

bool Matrix::is_real() const {
    for (const auto& z : data_) {
        if (z.imag() != 0.0) return false;
    }
    return true;
}

bool Matrix::all_finite() const {
    for (const auto& z : data_) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (const auto& z : data_) m = std::max(m, std::abs(z));
    return m;
}

double Matrix::hs_norm_squared() const {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return s;
}

Matrix Matrix::adjoint() const {
    Matrix out(cols_, rows_);
    for (int i = 0; i < rows_; ++i) {
        for (int j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
    }
    return out;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
    if (cols_ != rhs.rows_) throw std::invalid_argument("matrix product: shape mismatch");
    Matrix out(rows_, rhs.cols_);
    for (int i = 0; i < rows_; ++i) {
        for (int k = 0; k < cols_; ++k) {
            const cplx a = (*this)(i, k);
            if (a == cplx{}) continue;
            for (int j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
        }
    }
    return out;
}

Matrix Matrix::operator-(const Matrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw std::invalid_argument("matrix difference: shape mismatch");
    Matrix out = *this;
    for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] -= rhs.data_[k];
    return out;
}

Matrix Matrix::operator+(const Matrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw std::invalid_argument("matrix sum: shape mismatch");
    Matrix out = *this;
    for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] += rhs.data_[k];
    return out;
}

Matrix Matrix::scaled(double factor) const {
    Matrix out = *this;
    for (auto& z : out.data_) z *= factor;
    return out;
}

HermitianMatrix::HermitianMatrix(Matrix m) : m_(std::move(m)) {
    if (!m_.is_square()) {
        throw std::invalid_argument("Hermitian matrix must be square, got " + std::to_string(m_.rows()) +
                                    "x" + std::to_string(m_.cols()));
    }
    if (!m_.is_exactly_hermitian()) throw std::invalid_argument("matrix is not exactly Hermitian");
}

HermitianMatrix HermitianMatrix::diagonal(std::span<const double> values) {
    Matrix m(static_cast<int>(values.size()), static_cast<int>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) {
        m(static_cast<int>(i), static_cast<int>(i)) = values[i];
    }
    return HermitianMatrix(std::move(m));
}

double HermitianMatrix::trace() const {
    double t = 0.0;
    for (int i = 0; i < n(); ++i) t += m_(i, i).real();
    return t;
}

HermitianMatrix HermitianMatrix::combine(const HermitianMatrix& a, const HermitianMatrix& b,
                                         double lambda) {
    if (a.n() != b.n()) throw std::invalid_argument("combine: shape mismatch");
    Matrix out(a.n(), a.n());
    for (int i = 0; i < a.n(); ++i) {
        for (int j = i; j < a.n(); ++j) out(i, j) = lambda * a(i, j) + (1.0 - lambda) * b(i, j);
    }
    return HermitianMatrix(symmetrize_from_upper(std::move(out)));
}

Matrix symmetrize_from_upper(Matrix m) {
    for (int i = 0; i < m.rows(); ++i) {
        m(i, i) = m(i, i).real();
        for (int j = i + 1; j < m.cols(); ++j) m(j, i) = std::conj(m(i, j));
    }
    return m;
}

}  // namespace specmeter
