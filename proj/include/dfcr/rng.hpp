#pragma once

// Counter-based random streams. A stream is identified by (seed, stream id);
// its i-th block of output is a pure function of (seed, id, i), so results do
// not depend on how work is scheduled across threads.

#include <array>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace dfcr {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// SplitMix64 finalizer; used to hash stream coordinates into ids.
std::uint64_t mix64(std::uint64_t x);

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Child stream whose id is a hash of this id and the path components.
  /// Different paths give different streams with overwhelming probability.
  RngStream derive(std::initializer_list<std::uint64_t> path) const;

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform01();
  /// Uniform on the open interval (lo, hi).
  double uniform(double lo, double hi);
  /// Standard normal via Box-Muller; consumes two uniforms per call.
  double normal();
  /// Uniform integer in [0, bound), bound >= 1, without modulo bias.
  std::uint64_t below(std::uint64_t bound);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
};

/// `count` independent streams (ids 0..count-1) under one master seed.
std::vector<RngStream> make_streams(std::uint64_t master_seed, std::size_t count);

}  // namespace dfcr
