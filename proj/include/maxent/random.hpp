#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace maxent {

// 64-bit Mersenne Twister with a platform-independent uniform mapping.
// std::mt19937_64 and std::seed_seq are fully specified by the standard, so a
// given seed yields the same stream everywhere; the distributions in <random>
// are not, which is why uniform draws are formed by hand.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent stream for replication `stream` of an experiment seeded with
  // `seed`. The engine state is expanded from the words
  // {lo(seed), hi(seed), lo(stream), hi(stream), tag} by std::seed_seq, so
  // streams depend only on (seed, stream) and not on scheduling order.
  static Rng substream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32), kStreamTag};
    return Rng(seq);
  }

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  // Uniform on (0, 1] with 53 bits of resolution.
  double uniform_open_closed() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  static constexpr std::uint32_t kStreamTag = 0x6d617865u;  // "maxe"

  explicit Rng(std::seed_seq& seq) : engine_(seq) {}

  std::mt19937_64 engine_;
};

}  // namespace maxent
