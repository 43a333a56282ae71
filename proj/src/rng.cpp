#include "nru/rng.hpp"

#include <cmath>

namespace nru {

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream_id) noexcept
    : key_(mix64(seed ^ mix64(stream_id))) {}

std::uint64_t CounterRng::mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t CounterRng::below(std::uint64_t n) noexcept {
  if (n <= 1) return 0;
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return x % n;
}

double CounterRng::exponential(double rate) noexcept { return -std::log1p(-uniform()) / rate; }

}  // namespace nru
