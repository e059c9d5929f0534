#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace errsynth {

std::uint64_t splitmix64(std::uint64_t x);

/// Per-report seed: stable in (run seed, report id) and independent of
/// corpus order.
std::uint64_t derive_seed(std::uint64_t run_seed, std::string_view report_id);

/// Independent sub-stream of a seed (plan draw, injection sites, re-plans).
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t salt);

/// mt19937_64 with hand-rolled draws. The std distributions are not
/// specified bit-for-bit, so they would make outputs library dependent.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [0, n). n must be positive.
  std::size_t index(std::size_t n);

  template <typename Seq>
  const auto& pick(const Seq& seq) {
    return seq[index(seq.size())];
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace errsynth
