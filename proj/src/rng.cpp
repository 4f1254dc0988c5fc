#include "infoshare/rng.hpp"

namespace infoshare {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = std::uint64_t{a} * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

PhiloxKey split(std::uint64_t v) {
  return {static_cast<std::uint32_t>(v), static_cast<std::uint32_t>(v >> 32)};
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

PhiloxStream::PhiloxStream(const StreamId& id)
    : key_(split(id.seed)),
      ctr_{0u, id.period, id.firm, static_cast<std::uint32_t>(id.purpose)} {}

PhiloxStream::result_type PhiloxStream::operator()() {
  if (used_ > 2) {
    block_ = philox4x32_10(ctr_, key_);
    ++ctr_[0];
    used_ = 0;
  }
  const std::uint64_t lo = block_[static_cast<std::size_t>(used_)];
  const std::uint64_t hi = block_[static_cast<std::size_t>(used_ + 1)];
  used_ += 2;
  return (hi << 32) | lo;
}

double PhiloxStream::uniform01() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

std::uint64_t PhiloxStream::below(std::uint64_t n) {
  // Rejection on the top of the range keeps every residue equally likely.
  const std::uint64_t limit = max() - max() % n;
  std::uint64_t x;
  do {
    x = (*this)();
  } while (x >= limit);
  return x % n;
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t replica) {
  const PhiloxCounter ctr{static_cast<std::uint32_t>(replica),
                          static_cast<std::uint32_t>(replica >> 32), 0u,
                          static_cast<std::uint32_t>(StreamPurpose::ReplicaSeed)};
  const auto out = philox4x32_10(ctr, split(base_seed));
  return (std::uint64_t{out[1]} << 32) | out[0];
}

}  // namespace infoshare
