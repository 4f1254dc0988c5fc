#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//
// Every random draw in the library comes from a stream addressed by
// (seed, period, firm, purpose), so traces do not depend on the order in
// which periods, firms or replicas are processed.

#include <array>
#include <cstdint>
#include <limits>

namespace infoshare {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// One Philox4x32 block with 10 rounds.
PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

/// What a stream is used for; keeps independent draws in the same period apart.
enum class StreamPurpose : std::uint32_t {
  Signal = 1,
  Tester = 2,
  Strategy = 3,
  ReplicaSeed = 4,
};

struct StreamId {
  std::uint64_t seed = 0;
  std::uint32_t period = 0;
  std::uint32_t firm = 0;
  StreamPurpose purpose = StreamPurpose::Signal;
};

/// Sequential view over one Philox substream. Models UniformRandomBitGenerator.
class PhiloxStream {
 public:
  using result_type = std::uint64_t;

  explicit PhiloxStream(const StreamId& id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();
  bool bernoulli(double p) { return uniform01() < p; }
  /// Uniform integer in [0, n), n > 0, without modulo bias.
  std::uint64_t below(std::uint64_t n);

 private:
  PhiloxKey key_;
  PhiloxCounter ctr_;
  PhiloxCounter block_{};
  int used_ = 4;  // 32-bit words consumed from block_
};

/// Seed for replica `replica` derived from `base_seed` through Philox.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t replica);

}  // namespace infoshare
