#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace sketchbench {

/// Identifies one independent random stream. The same triple always
/// reproduces the same stream, bit for bit, whatever thread consumes it.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint32_t trial = 0;
    std::uint32_t distribution_id = 0;

    /// Single 64-bit label for logs and CSV rows.
    std::uint64_t stream_key() const noexcept;

    friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

/// Philox4x32-10 block cipher (Salmon et al., SC'11) used as a counter-based
/// generator: key = master seed, counter = (block index, trial, distribution id).
class Philox4x32 {
public:
    using block_type = std::array<std::uint32_t, 4>;
    using key_type = std::array<std::uint32_t, 2>;

    static block_type encrypt(block_type counter, key_type key) noexcept;
};

/// Sequential reader over one Philox stream. Satisfies
/// UniformRandomBitGenerator so it also plugs into <random> algorithms.
class RandomStream {
public:
    using result_type = std::uint64_t;

    explicit RandomStream(const SeedSpec& seed) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
    result_type operator()() noexcept { return next_u64(); }

    std::uint64_t next_u64() noexcept;
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Uniform on (0, 1); never returns 0, safe for log().
    double uniform_open() noexcept;
    /// Uniform integer on [0, n), unbiased.
    std::uint64_t uniform_index(std::uint64_t n) noexcept;
    double normal() noexcept;
    double exponential() noexcept;
    /// Gamma(shape, 1) via Marsaglia-Tsang; shape > 0.
    double gamma(double shape) noexcept;
    /// Poisson(mean) by inversion for small means, transformed rejection otherwise.
    std::uint64_t poisson(double mean) noexcept;

private:
    void refill() noexcept;

    Philox4x32::key_type key_{};
    Philox4x32::block_type counter_{};
    std::uint64_t block_index_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int buffered_ = 0;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

} // namespace sketchbench
