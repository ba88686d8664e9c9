#include "pantry/sim/rng.hpp"

#include <limits>

#include "pantry/error.hpp"

namespace pantry::sim {

namespace {

std::uint32_t lo(std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); }
std::uint32_t hi(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::seed_seq seq{lo(seed), hi(seed)};
  engine_.seed(seq);
}

Rng Rng::stream(std::uint64_t seed, std::uint64_t household, std::uint64_t repetition, std::uint64_t purpose) {
  std::seed_seq seq{lo(seed), hi(seed), lo(household), hi(household), lo(repetition), hi(repetition), lo(purpose),
                    hi(purpose)};
  return Rng(seq);
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo_value, double hi_value) { return lo_value + (hi_value - lo_value) * uniform(); }

int Rng::uniform_int(int lo_value, int hi_value) {
  if (hi_value < lo_value) throw ContractViolation("uniform_int with empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(static_cast<std::int64_t>(hi_value) - lo_value) + 1;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t draw = engine_();
  while (draw >= limit) draw = engine_();
  return static_cast<int>(static_cast<std::int64_t>(lo_value) + static_cast<std::int64_t>(draw % span));
}

bool Rng::bernoulli(double p) { return uniform() < p; }

}  // namespace pantry::sim
