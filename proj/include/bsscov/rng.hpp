#ifndef BSSCOV_RNG_HPP
#define BSSCOV_RNG_HPP

#include <array>
#include <cstdint>

namespace bsscov {

/// Philox4x32-10 counter-based generator. Streams are addressed by a
/// 64-bit key; Monte Carlo paths get disjoint substreams from
/// (seed, path index, tag) without any sequential dependency, so paths
/// can be generated on any thread in any order with identical output.
class Philox4x32 {
  public:
    Philox4x32(std::uint64_t key, std::uint64_t counter_hi = 0)
        : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
          ctr_{0, 0, static_cast<std::uint32_t>(counter_hi),
               static_cast<std::uint32_t>(counter_hi >> 32)} {}

    std::uint32_t next_u32();
    double next_u01(); // in (0,1)

  private:
    void refill();
    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> ctr_;
    std::array<std::uint32_t, 4> out_{};
    int have_ = 0;
};

/// Standard normals via Box-Muller on a Philox substream; deterministic
/// and independent of thread scheduling.
class NormalStream {
  public:
    explicit NormalStream(std::uint64_t key) : gen_(key) {}
    double next();
    Philox4x32& raw() { return gen_; }

  private:
    Philox4x32 gen_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

/// Mixes (seed, path, tag) into a substream key (splitmix64 finalizer).
std::uint64_t substream_key(std::uint64_t seed, std::uint64_t path, std::uint64_t tag = 0);

} // namespace bsscov

#endif
