#include "rtvae/numerics/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace rtvae {
namespace {

// Reference values from a separate big-integer implementation of splitmix64
// seeding followed by xoshiro256++.
TEST(Rng, MatchesReferenceStream) {
    Rng rng(42);
    EXPECT_EQ(rng.next_u64(), 15021278609987233951ULL);
    EXPECT_EQ(rng.next_u64(), 5881210131331364753ULL);
    EXPECT_EQ(rng.next_u64(), 18149643915985481100ULL);
}

TEST(Rng, Mix64IsSplitmix64Finalizer) {
    // First output of splitmix64 seeded with 1234567.
    EXPECT_EQ(mix64(1234567), 6457827717110365317ULL);
}

TEST(Rng, EqualSeedsGiveEqualSequences) {
    Rng a(7);
    Rng b(7);
    for (int i = 0; i < 1000; ++i) {
        ASSERT_EQ(a.next_u64(), b.next_u64());
        ASSERT_EQ(a.normal(), b.normal());
    }
    EXPECT_EQ(a, b);
    Rng c(8);
    EXPECT_NE(Rng(7).next_u64(), c.next_u64());
}

TEST(Rng, StreamsAreDistinctAndReproducible) {
    EXPECT_EQ(Rng::stream(1, 2).next_u64(), Rng::stream(1, 2).next_u64());
    EXPECT_NE(Rng::stream(1, 2).next_u64(), Rng::stream(1, 3).next_u64());
    EXPECT_NE(Rng::stream(1, 2).next_u64(), Rng::stream(2, 2).next_u64());
}

TEST(Rng, UniformStaysInUnitInterval) {
    Rng rng(3);
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(Rng, UniformIndexCoversRangeEvenly) {
    Rng rng(4);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) {
        const auto k = rng.uniform_index(7);
        ASSERT_LT(k, 7u);
        ++counts[k];
    }
    for (int c : counts) {
        EXPECT_NEAR(c, 10000, 500);
    }
    EXPECT_EQ(rng.uniform_index(1), 0u);
    EXPECT_EQ(rng.uniform_index(0), 0u);
}

TEST(Rng, NormalMomentsOverOneMillionDraws) {
    Rng rng(2024);
    constexpr int n = 1'000'000;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sum_sq += z * z;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    EXPECT_LT(std::abs(mean), 0.02);
    EXPECT_LT(std::abs(var - 1.0), 0.05);
}

TEST(Rng, NormalMatrixHasRequestedShape) {
    Rng rng(1);
    const Matrix m = rng.normal_matrix(3, 5);
    EXPECT_EQ(m.rows(), 3u);
    EXPECT_EQ(m.cols(), 5u);
    EXPECT_TRUE(m.all_finite());
}

TEST(Rng, PermutationIsAPermutation) {
    Rng rng(9);
    for (std::size_t n : {0u, 1u, 2u, 17u, 1000u}) {
        auto p = rng.permutation(n);
        ASSERT_EQ(p.size(), n);
        std::sort(p.begin(), p.end());
        std::vector<std::size_t> expected(n);
        std::iota(expected.begin(), expected.end(), std::size_t{0});
        EXPECT_EQ(p, expected);
    }
}

TEST(Rng, PermutationsOfThreeAreAllReachable) {
    Rng rng(10);
    std::set<std::vector<std::size_t>> seen;
    for (int i = 0; i < 600; ++i) {
        seen.insert(rng.permutation(3));
    }
    EXPECT_EQ(seen.size(), 6u);
}

} // namespace
} // namespace rtvae
