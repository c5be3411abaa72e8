#pragma once

#include <array>
#include <cstdint>

namespace divtest {

/// Counter-based random source: Philox4x32-10 keyed by a 64-bit seed, with a
/// 64-bit stream id occupying the upper half of the 128-bit counter.  The
/// same (seed, stream) always reproduces the same draw sequence, and distinct
/// stream ids index non-overlapping counter ranges, so streams can be handed
/// to parallel workers without coordination.
///
/// The generator family is fixed; see README ("Reproducibility").
class SeededSource {
public:
    SeededSource(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    std::uint64_t seed() const noexcept {
        return static_cast<std::uint64_t>(key_[0]) | (static_cast<std::uint64_t>(key_[1]) << 32);
    }
    std::uint64_t stream() const noexcept { return stream_; }

    /// Derived source for a sub-stream (e.g. one Monte Carlo block).
    SeededSource substream(std::uint64_t offset) const { return SeededSource(seed(), stream_ + offset); }

    std::uint64_t next_u64() {
        if (pos_ >= 4) refill();
        const std::uint64_t lo = buf_[pos_];
        const std::uint64_t hi = buf_[pos_ + 1];
        pos_ += 2;
        return lo | (hi << 32);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// One Philox4x32-10 block for the given counter/key (exposed for the
    /// known-answer tests).
    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            const std::uint64_t m0 = 0xD2511F53ull * ctr[0];
            const std::uint64_t m1 = 0xCD9E8D57ull * ctr[2];
            ctr = {static_cast<std::uint32_t>(m1 >> 32) ^ ctr[1] ^ key[0],
                   static_cast<std::uint32_t>(m1),
                   static_cast<std::uint32_t>(m0 >> 32) ^ ctr[3] ^ key[1],
                   static_cast<std::uint32_t>(m0)};
        }
        return ctr;
    }

private:
    void refill() {
        buf_ = block({static_cast<std::uint32_t>(block_counter_),
                      static_cast<std::uint32_t>(block_counter_ >> 32),
                      static_cast<std::uint32_t>(stream_),
                      static_cast<std::uint32_t>(stream_ >> 32)},
                     key_);
        ++block_counter_;
        pos_ = 0;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t block_counter_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
};

}  // namespace divtest
