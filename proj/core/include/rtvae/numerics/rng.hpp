#pragma once

#include "rtvae/numerics/matrix.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace rtvae {

/// xoshiro256++ generator seeded through splitmix64.
///
/// Only integer arithmetic feeds the state, so a seed reproduces the same
/// stream on every platform. Normal variates use Box-Muller on the uniform
/// stream and cache the second value of each pair.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0);

    /// Independent generator for a named sub-stream of this seed.
    static Rng stream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64();
    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform();
    /// Uniform integer in [0, bound), rejection-sampled.
    std::uint64_t uniform_index(std::uint64_t bound);
    double normal();
    Matrix normal_matrix(std::size_t rows, std::size_t cols);

    /// Fisher-Yates shuffle of [0, n).
    std::vector<std::size_t> permutation(std::size_t n);

    bool operator==(const Rng&) const = default;

private:
    std::uint64_t seed_;
    std::array<std::uint64_t, 4> state_{};
    std::optional<double> spare_normal_;
};

/// 64-bit finalizer used to derive seeds and fingerprints.
std::uint64_t mix64(std::uint64_t x) noexcept;

} // namespace rtvae
