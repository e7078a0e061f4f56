#pragma once

#include <cstdint>

namespace lexsteer {

// splitmix64 finalizer. Foundation of the counter-based random streams used
// for sampling and seed derivation.
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline uint64_t combine_key(uint64_t h, uint64_t v) {
    return mix64(h ^ mix64(v));
}

// Counter-based random stream. A draw is a pure function of (key, counter),
// so trajectories replay identically regardless of evaluation order.
class RngStream {
  public:
    explicit RngStream(uint64_t key) : key_(key) {}

    // Uniform in [0, 1) with 53 random bits.
    double next_uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    uint64_t next_u64() {
        return mix64(key_ ^ mix64(counter_++));
    }

  private:
    uint64_t key_;
    uint64_t counter_ = 0;
};

// Stream for one (seed, block, step, position) cell of a decode.
inline RngStream decode_rng(uint64_t seed, uint64_t block, uint64_t step, uint64_t position) {
    return RngStream(combine_key(combine_key(combine_key(seed, block), step), position));
}

// Per-sequence seeds for multi-sample experiments, derived from a master seed.
inline uint64_t derive_seed(uint64_t master, uint64_t index) {
    return combine_key(master, index + 1);
}

}  // namespace lexsteer
