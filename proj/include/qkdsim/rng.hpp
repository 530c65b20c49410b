#pragma once

#include <cstdint>

namespace qkdsim {

// Counter-based RNG (Philox4x32-10). A stream is addressed by
// (seed, stream_id); draws within a stream advance a 64-bit counter.
// Identical (seed, stream_id) sequences are produced no matter how
// shots are scheduled across workers.
class ShotRng {
public:
    ShotRng(uint64_t seed, uint64_t stream_id)
        : key0_(static_cast<uint32_t>(seed)),
          key1_(static_cast<uint32_t>(seed >> 32)),
          stream_lo_(static_cast<uint32_t>(stream_id)),
          stream_hi_(static_cast<uint32_t>(stream_id >> 32)) {}

    uint64_t next_u64() {
        if (cache_full_) {
            cache_full_ = false;
            return cache_;
        }
        uint32_t c0 = static_cast<uint32_t>(counter_);
        uint32_t c1 = static_cast<uint32_t>(counter_ >> 32);
        ++counter_;
        uint32_t x0 = c0, x1 = c1, x2 = stream_lo_, x3 = stream_hi_;
        uint32_t k0 = key0_, k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            uint64_t p0 = 0xD2511F53ull * x0;
            uint64_t p1 = 0xCD9E8D57ull * x2;
            uint32_t h0 = static_cast<uint32_t>(p0 >> 32), l0 = static_cast<uint32_t>(p0);
            uint32_t h1 = static_cast<uint32_t>(p1 >> 32), l1 = static_cast<uint32_t>(p1);
            uint32_t y0 = h1 ^ x1 ^ k0;
            uint32_t y1 = l1;
            uint32_t y2 = h0 ^ x3 ^ k1;
            uint32_t y3 = l0;
            x0 = y0; x1 = y1; x2 = y2; x3 = y3;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        cache_ = (static_cast<uint64_t>(x2) << 32) | x3;
        cache_full_ = true;
        return (static_cast<uint64_t>(x0) << 32) | x1;
    }

    // Uniform double in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool next_bit() { return (next_u64() >> 63) != 0; }

    bool bernoulli(double p) { return next_double() < p; }

    // Uniform integer in [0, n).
    uint64_t next_below(uint64_t n) {
        return static_cast<uint64_t>(next_double() * static_cast<double>(n)) % n;
    }

private:
    uint32_t key0_, key1_;
    uint32_t stream_lo_, stream_hi_;
    uint64_t counter_ = 0;
    uint64_t cache_ = 0;
    bool cache_full_ = false;
};

}  // namespace qkdsim
