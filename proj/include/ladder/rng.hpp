#pragma once

#include <cstdint>
#include <array>
#include <cmath>

namespace ladder {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
/// A block cipher over a 128-bit counter with a 64-bit key; every
/// (key, counter) pair maps to 128 independent output bits, so streams
/// can be split freely and results do not depend on scheduling.
struct Philox4x32 {
    static constexpr uint32_t M0 = 0xD2511F53u;
    static constexpr uint32_t M1 = 0xCD9E8D57u;
    static constexpr uint32_t W0 = 0x9E3779B9u;
    static constexpr uint32_t W1 = 0xBB67AE85u;

    static std::array<uint32_t, 4> block(std::array<uint32_t, 4> ctr,
                                         std::array<uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += W0;
                key[1] += W1;
            }
            const uint64_t p0 = static_cast<uint64_t>(M0) * ctr[0];
            const uint64_t p1 = static_cast<uint64_t>(M1) * ctr[2];
            const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
            const uint32_t lo0 = static_cast<uint32_t>(p0);
            const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
            const uint32_t lo1 = static_cast<uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }
};

/// One logical random stream, identified by (seed, stream id).
/// Draws are a pure function of (seed, stream, position), independent of
/// any other stream. The generator name recorded in artifacts is
/// "philox4x32-10".
class RngStream {
public:
    RngStream() : RngStream(0, 0) {}
    RngStream(uint64_t seed, uint64_t stream)
        : seed_(seed), stream_(stream), block_(0), have_second_(false), second_(0) {}

    uint64_t seed() const { return seed_; }
    uint64_t stream() const { return stream_; }

    uint64_t next_u64() {
        if (have_second_) {
            have_second_ = false;
            return second_;
        }
        const std::array<uint32_t, 4> out = Philox4x32::block(
            {static_cast<uint32_t>(block_), static_cast<uint32_t>(block_ >> 32),
             static_cast<uint32_t>(stream_), static_cast<uint32_t>(stream_ >> 32)},
            {static_cast<uint32_t>(seed_), static_cast<uint32_t>(seed_ >> 32)});
        ++block_;
        second_ = (static_cast<uint64_t>(out[3]) << 32) | out[2];
        have_second_ = true;
        return (static_cast<uint64_t>(out[1]) << 32) | out[0];
    }

    /// Uniform on [0,1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer in [0, n).
    uint64_t below(uint64_t n) {
        // n is tiny in all our uses; modulo bias is < n / 2^64.
        return next_u64() % n;
    }

    double exponential(double rate) {
        return -std::log1p(-uniform()) / rate;
    }

    /// Standard normal via Box-Muller (no state carried over).
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log1p(-u1));
        return r * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    uint64_t seed_;
    uint64_t stream_;
    uint64_t block_;
    bool have_second_;
    uint64_t second_;
};

inline constexpr const char* kRngName = "philox4x32-10";

/// Stable stream ids: combine an experiment-level purpose tag with a
/// replica index so replicas never share a stream regardless of thread
/// assignment.
inline uint64_t stream_id(uint32_t purpose, uint32_t replica) {
    return (static_cast<uint64_t>(purpose) << 32) | replica;
}

}  // namespace ladder
