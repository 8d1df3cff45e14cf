#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace deepmou {

// Counter-based random stream (Philox4x32-10). The key is the 64-bit seed
// and the upper half of the 128-bit counter is the stream id, so every
// (seed, stream_id) pair addresses a disjoint 2^64-block sequence. Satisfies
// UniformRandomBitGenerator, so it plugs into <random> distributions.
//
// Not thread-safe; use one stream per logical task.
class RngStream {
public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed = 0, std::uint64_t stream_id = 0)
      : seed_(seed), stream_id_(stream_id) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    if (buffered_ == 0) refill();
    --buffered_;
    return buffer_[buffered_];
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1): never returns 0, safe to take logs of.
  double uniform_pos() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  // Child stream sharing the seed; the caller chooses ids that do not
  // collide with other streams in use.
  RngStream substream(std::uint64_t stream_id) const {
    return RngStream(seed_, stream_id);
  }

private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

// Pure Philox4x32-10 block function, exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

}  // namespace deepmou
