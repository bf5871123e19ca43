#pragma once

// Counter-based random number generation (Philox4x32-10).
//
// Every draw is a pure function of (seed, stream, counter), so a stream can be
// split across workers at any granularity and still produce bit-identical
// sequences. Salmon et al., "Parallel random numbers: as easy as 1, 2, 3",
// SC 2011.

#include <array>
#include <cstdint>
#include <stdexcept>

namespace latmom {

namespace detail {

inline void mul_hi_lo(uint32_t a, uint32_t b, uint32_t& lo, uint32_t& hi) {
    uint64_t p = static_cast<uint64_t>(a) * b;
    lo = static_cast<uint32_t>(p);
    hi = static_cast<uint32_t>(p >> 32);
}

}  // namespace detail

struct Philox4x32 {
    static constexpr uint32_t kM0 = 0xD2511F53u;
    static constexpr uint32_t kM1 = 0xCD9E8D57u;
    static constexpr uint32_t kW0 = 0x9E3779B9u;
    static constexpr uint32_t kW1 = 0xBB67AE85u;

    static std::array<uint32_t, 4> block(std::array<uint32_t, 4> ctr,
                                         std::array<uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            uint32_t lo0, hi0, lo1, hi1;
            detail::mul_hi_lo(kM0, ctr[0], lo0, hi0);
            detail::mul_hi_lo(kM1, ctr[2], lo1, hi1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kW0;
            key[1] += kW1;
        }
        return ctr;
    }
};

// A stream of uniform random numbers identified by (seed, stream_index).
// Distinct stream indices give statistically independent streams; the draw
// counter advances by one 128-bit block per two 64-bit outputs.
class RngStream {
  public:
    RngStream(uint64_t seed, uint64_t stream_index)
        : key_{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)},
          stream_(stream_index) {}

    uint64_t stream_index() const { return stream_; }

    uint64_t next_u64() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        std::array<uint32_t, 4> ctr = {
            static_cast<uint32_t>(counter_), static_cast<uint32_t>(counter_ >> 32),
            static_cast<uint32_t>(stream_), static_cast<uint32_t>(stream_ >> 32)};
        ++counter_;
        auto out = Philox4x32::block(ctr, key_);
        spare_ = (static_cast<uint64_t>(out[3]) << 32) | out[2];
        have_spare_ = true;
        return (static_cast<uint64_t>(out[1]) << 32) | out[0];
    }

    // Uniform on [0,1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1]; never returns 0.
    double uniform_open01() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Unbiased uniform integer in [0, n).
    uint64_t uniform_below(uint64_t n) {
        if (n == 0) throw std::invalid_argument("uniform_below: n must be positive");
        uint64_t limit = ~uint64_t{0} - (~uint64_t{0} % n + 1) % n;
        uint64_t v = next_u64();
        while (v > limit) v = next_u64();
        return v % n;
    }

  private:
    std::array<uint32_t, 2> key_;
    uint64_t stream_;
    uint64_t counter_ = 0;
    uint64_t spare_ = 0;
    bool have_spare_ = false;
};

// Stream-index layout: a small component tag in the top 16 bits, a sample
// index below. Keeps per-sample substreams of different experiment components
// disjoint for a fixed seed.
enum class StreamTag : uint64_t {
    kGeneric = 0,
    kFirstMoment = 1,
    kSecondMoment = 2,
    kConeFirst = 3,
    kConeSecond = 4,
    kKernelPairs = 5,
    kSchmidt = 6,
    kKhintchine = 7,
    kCalibration = 8,
    kEtaSlab = 9,
};

inline uint64_t substream(StreamTag tag, uint64_t index) {
    if (index >> 48) throw std::invalid_argument("substream: index exceeds 48 bits");
    return (static_cast<uint64_t>(tag) << 48) | index;
}

}  // namespace latmom
