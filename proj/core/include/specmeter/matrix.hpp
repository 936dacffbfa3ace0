#pragma once

#include "specmeter/entries.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace specmeter {

// Dense complex matrix, row-major. Doubles as RectMatrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols);

    static Matrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    cplx& operator()(int i, int j) { return data_[index(i, j)]; }
    const cplx& operator()(int i, int j) const { return data_[index(i, j)]; }

    std::span<const cplx> data() const { return data_; }
    std::span<cplx> data() { return data_; }
    std::span<const cplx> row(int i) const {
        return std::span<const cplx>(data_).subspan(index(i, 0), static_cast<std::size_t>(cols_));
    }

    // Bitwise conjugate symmetry.
    bool is_exactly_hermitian() const;
    bool is_real() const;
    bool all_finite() const;
    double max_abs() const;
    double hs_norm_squared() const;

    Matrix adjoint() const;
    Matrix operator*(const Matrix& rhs) const;
    Matrix operator-(const Matrix& rhs) const;
    Matrix operator+(const Matrix& rhs) const;
    Matrix scaled(double factor) const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) +
               static_cast<std::size_t>(j);
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<cplx> data_;
};

using RectMatrix = Matrix;

// Square matrix whose conjugate symmetry holds bitwise.
class HermitianMatrix {
public:
    HermitianMatrix() = default;
    // Throws std::invalid_argument unless `m` is square and exactly Hermitian.
    explicit HermitianMatrix(Matrix m);

    static HermitianMatrix identity(int n) { return HermitianMatrix(Matrix::identity(n)); }
    static HermitianMatrix diagonal(std::span<const double> values);

    int n() const { return m_.rows(); }
    const cplx& operator()(int i, int j) const { return m_(i, j); }
    const Matrix& matrix() const { return m_; }

    double trace() const;
    double hs_norm_squared() const { return m_.hs_norm_squared(); }

    HermitianMatrix scaled(double factor) const { return HermitianMatrix(m_.scaled(factor)); }
    // lambda * a + (1 - lambda) * b, with the lower triangle mirrored so the
    // result stays bitwise Hermitian.
    static HermitianMatrix combine(const HermitianMatrix& a, const HermitianMatrix& b, double lambda);

    friend bool operator==(const HermitianMatrix&, const HermitianMatrix&) = default;

private:
    Matrix m_;
};

// Mirrors the upper triangle (conjugated) onto the lower and keeps only the
// real part of the diagonal.
Matrix symmetrize_from_upper(Matrix m);

}  // namespace specmeter
