#pragma once

#include <cstdint>
#include <random>

namespace wnh {

using Engine = std::mt19937_64;

// A (master seed, stream index) pair. Each Monte Carlo trial gets its own
// stream, so results do not depend on which worker runs which trial.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t index = 0;

  Engine engine() const;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace wnh
