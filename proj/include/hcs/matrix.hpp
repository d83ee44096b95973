#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hcs {

/// Dense row-major real matrix. Sized for the 2^d x 2^d blocks this library
/// works with and for the explicit acquisition matrices used as oracles.
class RealMatrix {
public:
    RealMatrix() = default;
    RealMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static RealMatrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    RealMatrix transposed() const;
    RealMatrix& operator*=(double s) noexcept;
    RealMatrix& operator+=(const RealMatrix& other);
    RealMatrix& operator-=(const RealMatrix& other);

    /// Frobenius norm.
    double norm() const noexcept;
    double max_abs() const noexcept;

    friend bool operator==(const RealMatrix&, const RealMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

RealMatrix operator*(const RealMatrix& a, const RealMatrix& b);
RealMatrix operator+(RealMatrix a, const RealMatrix& b);
RealMatrix operator-(RealMatrix a, const RealMatrix& b);
RealMatrix operator*(double s, RealMatrix a);
std::vector<double> operator*(const RealMatrix& a, std::span<const double> x);

/// AᵀA without forming the transpose.
RealMatrix gram(const RealMatrix& a);

/// Eigenvalues of a symmetric matrix, ascending. Cyclic Jacobi rotations;
/// converges to off-diagonal mass below `tol` relative to the Frobenius norm.
std::vector<double> symmetric_eigenvalues(const RealMatrix& a, double tol = 1e-12);

/// Singular values, descending, through the eigenvalues of AᵀA.
std::vector<double> singular_values(const RealMatrix& a);

/// Largest singular value of a square or rectangular matrix.
double sigma_max(const RealMatrix& a);

/// Smallest singular value of a symmetric positive semidefinite matrix. Read
/// off its eigenvalues directly so tiny values keep their absolute accuracy.
double sigma_min_psd(const RealMatrix& a);

}  // namespace hcs
