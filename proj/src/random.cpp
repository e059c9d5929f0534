#include "errsynth/random.hpp"

#include <limits>

#include "errsynth/text.hpp"

namespace errsynth {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t run_seed, std::string_view report_id) {
  return splitmix64(run_seed ^ text::fnv1a64(report_id));
}

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t salt) {
  return splitmix64(seed + splitmix64(salt));
}

std::size_t Rng::index(std::size_t n) {
  const std::uint64_t range = n;
  // reject the tail that would bias the modulo
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return static_cast<std::size_t>(x % range);
}

}  // namespace errsynth
