#include "rtvae/numerics/matrix.hpp"

#include "rtvae/errors.hpp"

#include <algorithm>
#include <cmath>

namespace rtvae {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw ShapeError("matrix data length " + std::to_string(data_.size()) +
                         " does not match shape " + shape_string());
    }
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    std::vector<double> data;
    data.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) {
            throw ShapeError("ragged row list passed to Matrix::from_rows");
        }
        data.insert(data.end(), row.begin(), row.end());
    }
    return Matrix(r, c, std::move(data));
}

Matrix Matrix::checked(std::size_t rows, std::size_t cols, std::vector<double> data) {
    Matrix m(rows, cols, std::move(data));
    if (!m.all_finite()) {
        throw NumericError("non-finite entry in matrix of shape " + m.shape_string());
    }
    return m;
}

double Matrix::item() const {
    if (rows_ != 1 || cols_ != 1) {
        throw ShapeError("item() on non-scalar matrix " + shape_string());
    }
    return data_[0];
}

bool Matrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

std::string Matrix::shape_string() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
}

Matrix Matrix::gather_rows(std::span<const std::size_t> indices) const {
    Matrix out(indices.size(), cols_);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= rows_) {
            throw ShapeError("row index out of range in gather_rows");
        }
        std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(indices[i] * cols_), cols_,
                    out.data_.begin() + static_cast<std::ptrdiff_t>(i * cols_));
    }
    return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul shape mismatch " + a.shape_string() + " * " + b.shape_string());
    }
    Matrix out(a.rows(), b.cols());
    const std::size_t n = b.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* o = out.row(i).data();
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            const double* brow = b.row(k).data();
            for (std::size_t j = 0; j < n; ++j) {
                o[j] += aik * brow[j];
            }
        }
    }
    return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) {
        throw ShapeError("matmul_tn shape mismatch " + a.shape_string() + "^T * " +
                         b.shape_string());
    }
    Matrix out(a.cols(), b.cols());
    const std::size_t n = b.cols();
    for (std::size_t k = 0; k < a.rows(); ++k) {
        const double* brow = b.row(k).data();
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = a(k, i);
            double* o = out.row(i).data();
            for (std::size_t j = 0; j < n; ++j) {
                o[j] += aki * brow[j];
            }
        }
    }
    return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) {
        throw ShapeError("matmul_nt shape mismatch " + a.shape_string() + " * " +
                         b.shape_string() + "^T");
    }
    Matrix out(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.row(i).data();
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const double* brow = b.row(j).data();
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) {
                acc += arow[k] * brow[k];
            }
            out(i, j) = acc;
        }
    }
    return out;
}

Matrix add_row_broadcast(const Matrix& a, const Matrix& bias) {
    if (bias.rows() != 1 || bias.cols() != a.cols()) {
        throw ShapeError("bias shape " + bias.shape_string() + " incompatible with " +
                         a.shape_string());
    }
    Matrix out = a;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto r = out.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) {
            r[j] += bias(0, j);
        }
    }
    return out;
}

Matrix softmax_rows(const Matrix& m) {
    Matrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto in = m.row(i);
        auto o = out.row(i);
        const double mx = *std::max_element(in.begin(), in.end());
        double total = 0.0;
        for (std::size_t j = 0; j < in.size(); ++j) {
            o[j] = std::exp(in[j] - mx);
            total += o[j];
        }
        for (double& v : o) {
            v /= total;
        }
    }
    return out;
}

Matrix tanh(const Matrix& m) {
    Matrix out = m;
    for (double& v : out.values()) {
        v = std::tanh(v);
    }
    return out;
}

Matrix column_sums(const Matrix& m) {
    Matrix out(1, m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto r = m.row(i);
        for (std::size_t j = 0; j < m.cols(); ++j) {
            out(0, j) += r[j];
        }
    }
    return out;
}

Matrix column_slice(const Matrix& m, std::size_t offset, std::size_t width) {
    if (offset + width > m.cols()) {
        throw ShapeError("column slice [" + std::to_string(offset) + ", " +
                         std::to_string(offset + width) + ") out of range for " +
                         m.shape_string());
    }
    Matrix out(m.rows(), width);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        std::copy_n(m.row(i).begin() + static_cast<std::ptrdiff_t>(offset), width,
                    out.row(i).begin());
    }
    return out;
}

} // namespace rtvae
