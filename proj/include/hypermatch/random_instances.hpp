#pragma once

// Seeded random matchings for soak runs. Only raw std::mt19937_64 output is
// used (no distributions or std::shuffle), so a seed gives the same
// instances with every standard library.

#include <cstdint>
#include <random>
#include <vector>

#include "hypermatch/cube.hpp"

namespace hypermatch {

struct RandomInstance {
  Matching matching;
  std::uint32_t u = 0;
  std::uint32_t v = 0;  // opposite parity to u
};

/// A random matching of Q_n whose edges use at most d directions (a random
/// d-subset), with a random number of insertion attempts below 2^n, and a
/// random pair of endpoints of opposite parity.
inline RandomInstance random_instance(int n, int d, std::mt19937_64& rng) {
  check_dim(n);
  if (d < 1 || d > n) throw InvalidArgument("need 1 <= d <= n");
  const std::uint32_t count = std::uint32_t{1} << n;
  std::vector<int> dirs;
  for (int i = 1; i <= n; ++i) dirs.push_back(i);
  for (std::size_t k = dirs.size() - 1; k > 0; --k) std::swap(dirs[k], dirs[rng() % (k + 1)]);

  RandomInstance out{Matching(n), 0, 0};
  const std::uint64_t attempts = rng() % count;
  for (std::uint64_t k = 0; k < attempts; ++k) {
    const int dir = dirs[rng() % static_cast<unsigned>(d)];
    const std::uint32_t b = static_cast<std::uint32_t>(rng() % count) & ~bit_of(dir);
    if (!out.matching.covers(b) && !out.matching.covers(b | bit_of(dir))) out.matching.insert({b, dir});
  }
  out.u = static_cast<std::uint32_t>(rng() % count);
  out.v = static_cast<std::uint32_t>(rng() % count);
  if (parity_of(out.u) == parity_of(out.v)) out.v ^= 1;
  return out;
}

}  // namespace hypermatch
