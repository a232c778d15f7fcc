#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace rtvae {

/// Dense row-major matrix of doubles.
///
/// Shape is fixed at construction. `Matrix::checked` additionally rejects
/// NaN and infinite entries; the plain constructors only check the size.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    /// Builds from nested rows, e.g. `Matrix::from_rows({{1, 2}, {3, 4}})`.
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static Matrix checked(std::size_t rows, std::size_t cols, std::vector<double> data);
    static Matrix scalar(double value) { return Matrix(1, 1, value); }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }
    const std::vector<double>& data() const noexcept { return data_; }

    /// Value of a 1x1 matrix.
    double item() const;

    bool same_shape(const Matrix& other) const noexcept {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }
    bool all_finite() const noexcept;
    std::string shape_string() const;

    /// Copies the listed rows, in order, into a new matrix.
    Matrix gather_rows(std::span<const std::size_t> indices) const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Kernels shared by the tape and the inference path. Reductions always run
// left to right so results are bit-reproducible.

/// out = a * b
Matrix matmul(const Matrix& a, const Matrix& b);
/// out = a^T * b
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// out = a * b^T
Matrix matmul_nt(const Matrix& a, const Matrix& b);
/// Adds the 1xC row `bias` to every row of `a`.
Matrix add_row_broadcast(const Matrix& a, const Matrix& bias);
/// Row-wise softmax with max subtraction.
Matrix softmax_rows(const Matrix& m);
Matrix tanh(const Matrix& m);
/// 1xC vector of column sums.
Matrix column_sums(const Matrix& m);
Matrix column_slice(const Matrix& m, std::size_t offset, std::size_t width);

} // namespace rtvae
