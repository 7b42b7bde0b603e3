#pragma once

#include <cstdint>

namespace hslice {

// splitmix64; used for seeding and deterministic key derivation.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256** stream, derived deterministically from (master seed, stream id).
// Streams with distinct ids are independent for our purposes; the same
// (master, id) pair always replays the identical sequence, which is what the
// worker-count-invariance guarantees are built on.
class RngStream {
  public:
    RngStream(uint64_t master, uint64_t stream_id) {
        uint64_t seed = master ^ (0x9e3779b97f4a7c15ULL * (stream_id + 1));
        for (auto& word : s_) word = splitmix64(seed);
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
    }

    uint64_t next_u64() {
        uint64_t result = rotl(s_[1] * 5, 7) * 9;
        uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform on [0,1), 53 random bits
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform on [-1,1); the missing right endpoint has measure zero
    double uniform_pm1() { return 2.0 * uniform01() - 1.0; }

    int sign() { return (next_u64() >> 63) ? 1 : -1; }

    // unbiased integer in [0, bound); Lemire's multiply-with-rejection
    uint64_t bounded(uint64_t bound) {
        unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
        auto low = static_cast<uint64_t>(m);
        if (low < bound) {
            uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(next_u64()) * bound;
                low = static_cast<uint64_t>(m);
            }
        }
        return static_cast<uint64_t>(m >> 64);
    }

  private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t s_[4];
};

}  // namespace hslice
