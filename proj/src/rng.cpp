#include "sketchbench/rng.hpp"

#include <cmath>
#include <numbers>

namespace sketchbench {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

} // namespace

std::uint64_t SeedSpec::stream_key() const noexcept {
    return splitmix64(master_seed ^ splitmix64((std::uint64_t(trial) << 32) | distribution_id));
}

Philox4x32::block_type Philox4x32::encrypt(block_type ctr, key_type key) noexcept {
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t(kMul0) * ctr[0];
        const std::uint64_t p1 = std::uint64_t(kMul1) * ctr[2];
        const std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
        const std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

RandomStream::RandomStream(const SeedSpec& seed) noexcept {
    key_ = {std::uint32_t(seed.master_seed), std::uint32_t(seed.master_seed >> 32)};
    counter_ = {0u, 0u, seed.trial, seed.distribution_id};
}

void RandomStream::refill() noexcept {
    counter_[0] = std::uint32_t(block_index_);
    counter_[1] = std::uint32_t(block_index_ >> 32);
    ++block_index_;
    const auto out = Philox4x32::encrypt(counter_, key_);
    buffer_[0] = (std::uint64_t(out[1]) << 32) | out[0];
    buffer_[1] = (std::uint64_t(out[3]) << 32) | out[2];
    buffered_ = 2;
}

std::uint64_t RandomStream::next_u64() noexcept {
    if (buffered_ == 0) refill();
    return buffer_[2 - buffered_--];
}

double RandomStream::uniform() noexcept {
    return double(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform_open() noexcept {
    return (double(next_u64() >> 12) + 0.5) * 0x1.0p-52;
}

std::uint64_t RandomStream::uniform_index(std::uint64_t n) noexcept {
    // Lemire's multiply-shift with rejection of the biased low region.
    unsigned __int128 m = (unsigned __int128)next_u64() * n;
    std::uint64_t low = std::uint64_t(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            m = (unsigned __int128)next_u64() * n;
            low = std::uint64_t(m);
        }
    }
    return std::uint64_t(m >> 64);
}

double RandomStream::normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_open()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_normal_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

double RandomStream::exponential() noexcept { return -std::log(uniform_open()); }

double RandomStream::gamma(double shape) noexcept {
    if (shape < 1.0) {
        // Boost to shape+1 and correct with U^{1/shape}.
        const double g = gamma(shape + 1.0);
        return g * std::pow(uniform_open(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_open();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

std::uint64_t RandomStream::poisson(double mean) noexcept {
    if (mean <= 0.0) return 0;
    if (mean < 30.0) {
        const double u = uniform();
        double p = std::exp(-mean);
        double cdf = p;
        std::uint64_t k = 0;
        while (u > cdf && k < 1000) {
            ++k;
            p *= mean / double(k);
            cdf += p;
        }
        return k;
    }
    // PTRS, Hormann (1993).
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    while (true) {
        const double u = uniform() - 0.5;
        const double v = uniform_open();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) return std::uint64_t(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            -mean + k * loglam - std::lgamma(k + 1.0)) {
            return std::uint64_t(k);
        }
    }
}

} // namespace sketchbench
