#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mfglab {

/// Random stream owned by one (replication, player) pair. The engine is
/// seeded from (seed, replication, player) through std::seed_seq, so a
/// replication's draws do not depend on which thread runs it or in what
/// order replications are scheduled.
class PlayerStream {
 public:
  PlayerStream(std::uint64_t seed, std::uint64_t replication, std::uint64_t player) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(replication),
                      static_cast<std::uint32_t>(replication >> 32),
                      static_cast<std::uint32_t>(player), static_cast<std::uint32_t>(player >> 32)};
    engine_.seed(seq);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Exponential waiting time with the given rate.
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mfglab
