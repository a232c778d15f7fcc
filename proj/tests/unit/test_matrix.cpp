#include "rtvae/errors.hpp"
#include "rtvae/numerics/matrix.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

namespace rtvae {
namespace {

TEST(Matrix, ConstructsWithShapeAndFill) {
    const Matrix m(2, 3, 1.5);
    EXPECT_EQ(m.rows(), 2u);
    EXPECT_EQ(m.cols(), 3u);
    EXPECT_EQ(m.size(), 6u);
    for (double v : m.values()) {
        EXPECT_EQ(v, 1.5);
    }
}

TEST(Matrix, RejectsDataOfWrongLength) {
    EXPECT_THROW(Matrix(2, 2, std::vector<double>{1, 2, 3}), ShapeError);
}

TEST(Matrix, CheckedRejectsNonFinite) {
    EXPECT_THROW(Matrix::checked(1, 2, {1.0, std::numeric_limits<double>::quiet_NaN()}),
                 NumericError);
    EXPECT_THROW(Matrix::checked(1, 1, {std::numeric_limits<double>::infinity()}), NumericError);
    EXPECT_NO_THROW(Matrix::checked(1, 2, {1.0, -2.0}));
}

TEST(Matrix, FromRowsIsRowMajor) {
    const Matrix m = Matrix::from_rows({{1, 2}, {3, 4}});
    EXPECT_EQ(m(0, 1), 2.0);
    EXPECT_EQ(m(1, 0), 3.0);
    EXPECT_EQ(m.data(), (std::vector<double>{1, 2, 3, 4}));
    EXPECT_THROW(Matrix::from_rows({{1, 2}, {3}}), ShapeError);
}

TEST(Matrix, ItemRequiresOneByOne) {
    EXPECT_EQ(Matrix::scalar(4.0).item(), 4.0);
    EXPECT_THROW(Matrix(1, 2).item(), ShapeError);
}

TEST(Matrix, MatmulHandExample) {
    const Matrix a = Matrix::from_rows({{1, 2}});
    const Matrix b = Matrix::from_rows({{3}, {4}});
    EXPECT_EQ(matmul(a, b), Matrix::scalar(11.0));
    EXPECT_THROW(matmul(a, a), ShapeError);
}

TEST(Matrix, TransposedProductsAgreeWithExplicitTranspose) {
    const Matrix a = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}});
    const Matrix b = Matrix::from_rows({{1, 0}, {2, 1}});
    const Matrix at = Matrix::from_rows({{1, 4}, {2, 5}, {3, 6}});
    EXPECT_EQ(matmul_tn(a, b), matmul(at, b));
    const Matrix c = Matrix::from_rows({{1, 1, 0}, {0, 2, 1}});
    const Matrix ct = Matrix::from_rows({{1, 0}, {1, 2}, {0, 1}});
    EXPECT_EQ(matmul_nt(a, c), matmul(a, ct));
}

TEST(Matrix, SoftmaxRowsExamples) {
    const Matrix half = softmax_rows(Matrix::from_rows({{0, 0}}));
    EXPECT_DOUBLE_EQ(half(0, 0), 0.5);
    EXPECT_DOUBLE_EQ(half(0, 1), 0.5);

    const Matrix third = softmax_rows(Matrix::from_rows({{1, 1, 1}}));
    for (double v : third.values()) {
        EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
    }

    const Matrix weights =
        softmax_rows(Matrix::from_rows({{std::log(1.0), std::log(2.0), std::log(3.0)}}));
    EXPECT_NEAR(weights(0, 0), 1.0 / 6.0, 1e-15);
    EXPECT_NEAR(weights(0, 1), 2.0 / 6.0, 1e-15);
    EXPECT_NEAR(weights(0, 2), 3.0 / 6.0, 1e-15);
}

TEST(Matrix, SoftmaxIsStableForLargeInputs) {
    const Matrix s = softmax_rows(Matrix::from_rows({{700, -700, 699}}));
    EXPECT_TRUE(s.all_finite());
    EXPECT_NEAR(s(0, 0) + s(0, 1) + s(0, 2), 1.0, 1e-12);
}

TEST(Matrix, BroadcastSliceAndSums) {
    const Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
    EXPECT_EQ(add_row_broadcast(a, Matrix::from_rows({{10, 20}})),
              Matrix::from_rows({{11, 22}, {13, 24}}));
    EXPECT_THROW(add_row_broadcast(a, Matrix::from_rows({{1, 2, 3}})), ShapeError);
    EXPECT_EQ(column_sums(a), Matrix::from_rows({{4, 6}}));
    EXPECT_EQ(column_slice(a, 1, 1), Matrix::from_rows({{2}, {4}}));
    EXPECT_THROW(column_slice(a, 1, 2), ShapeError);
}

TEST(Matrix, GatherRowsKeepsRequestedOrder) {
    const Matrix a = Matrix::from_rows({{1}, {2}, {3}});
    const std::vector<std::size_t> idx{2, 0, 2};
    EXPECT_EQ(a.gather_rows(idx), Matrix::from_rows({{3}, {1}, {3}}));
}

} // namespace
} // namespace rtvae
