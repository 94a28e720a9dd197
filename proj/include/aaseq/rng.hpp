#pragma once

#include <cstdint>
#include <random>

namespace aaseq {

/// Seeded generator with platform-independent derived draws.
///
/// The standard distributions (`std::normal_distribution`,
/// `std::uniform_int_distribution`) are implementation-defined, so identical
/// seeds can yield different streams across standard libraries. Every draw
/// here is a fixed transform of raw `std::mt19937_64` output, whose sequence
/// is pinned by the standard.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) built from the top 53 bits of one engine word.
  double uniform();

  /// Uniform integer in [0, bound) by rejection sampling. `bound` must be > 0.
  std::uint64_t index(std::uint64_t bound);

  /// Standard normal draw via the Box-Muller transform. Draws come in pairs;
  /// the second value of each pair is cached for the next call.
  double normal();

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace aaseq
