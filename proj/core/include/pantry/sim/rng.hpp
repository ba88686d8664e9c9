#pragma once

#include <cstdint>
#include <random>

namespace pantry::sim {

/// mt19937_64 seeded through std::seed_seq. Both algorithms are fully specified by the C++
/// standard, and the draws below are built from raw 64-bit outputs (no std::*_distribution),
/// so sequences are identical on every conforming platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent stream for one (household, repetition) pair of a seeded run.
  static Rng stream(std::uint64_t seed, std::uint64_t household, std::uint64_t repetition, std::uint64_t purpose = 0);

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 bits.
  double uniform();
  double uniform(double lo, double hi);
  /// Uniform integer on [lo, hi] by rejection, no modulo bias.
  int uniform_int(int lo, int hi);
  bool bernoulli(double p);

 private:
  explicit Rng(std::seed_seq& seq) : engine_(seq) {}

  std::mt19937_64 engine_;
};

}  // namespace pantry::sim
