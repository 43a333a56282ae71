#pragma once

#include <cstdint>

namespace nru {

// SplitMix64 used in counter mode: the n-th output of stream (seed, id) is
// mix64(key + n * 0x9E3779B97F4A7C15) with key = mix64(seed ^ mix64(id)).
// Being a pure function of (seed, stream id, counter), any port that
// implements mix64 reproduces the same draws.
class CounterRng {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  CounterRng(std::uint64_t seed, std::uint64_t stream_id) noexcept;

  static std::uint64_t mix64(std::uint64_t z) noexcept;

  std::uint64_t next_u64() noexcept { return mix64(key_ + (++counter_) * kGamma); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  // Uniform integer on {0, ..., n-1}; n > 0. Rejection keeps it exactly uniform.
  std::uint64_t below(std::uint64_t n) noexcept;
  double exponential(double rate) noexcept;
  bool bernoulli(double p) noexcept { return uniform() < p; }

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Stage identifiers for stream splitting.
enum class RngStage : std::uint64_t {
  resq_arrivals = 1,
  resq_service = 2,
  resq_demand = 3,
  lbt_backoff = 10,
  lbt_blockage = 11,
  geometry_mc = 20,
  population_mc = 21,
};

inline CounterRng make_stream(std::uint64_t seed, RngStage stage, std::uint64_t replica = 0) noexcept {
  return CounterRng(seed, (static_cast<std::uint64_t>(stage) << 32) ^ replica);
}

}  // namespace nru
