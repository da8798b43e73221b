#pragma once

// Reflected binary Gray code and recursive Hamilton paths of Q_m between
// prescribed ends. No search: every path comes from splitting the cube on a
// coordinate where the ends differ.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <vector>

#include "hypermatch/certificate.hpp"
#include "hypermatch/cube.hpp"

namespace hypermatch {

/// i XOR (i >> 1) for i < 2^m. For m = 0 this is the single vertex 0.
inline std::vector<std::uint32_t> gray_sequence(int m) {
  if (m < 0 || m > kMaxDim) throw InvalidArgument("Gray code dimension out of range");
  std::vector<std::uint32_t> out(std::size_t{1} << m);
  for (std::uint32_t i = 0; i < out.size(); ++i) out[i] = i ^ (i >> 1);
  return out;
}

inline CycleCertificate gray_cycle(int m) {
  if (m < 2) throw InvalidArgument("Gray cycle needs m >= 2");
  return {m, gray_sequence(m)};
}

namespace detail {

inline std::uint32_t lowest_bit(std::uint32_t x) { return x & (~x + 1); }

// Path from a to b through the subcube where the bits in `free` vary and
// the rest are fixed to those of a (and b).
inline void split_path(std::uint32_t free, std::uint32_t a, std::uint32_t b, std::vector<std::uint32_t>& out) {
  if (std::popcount(free) == 1) {
    out.push_back(a);
    out.push_back(b);
    return;
  }
  const std::uint32_t k = lowest_bit(a ^ b);
  const std::uint32_t rest = free & ~k;
  const std::uint32_t c = a ^ lowest_bit(rest);
  split_path(rest, a, c, out);
  split_path(rest, c ^ k, b, out);
}

// Same, but a and b share a parity and z (opposite parity) is skipped.
inline void split_path_avoiding(std::uint32_t free, std::uint32_t a, std::uint32_t b, std::uint32_t z,
                                std::vector<std::uint32_t>& out) {
  if (std::popcount(free) == 2) {
    const std::uint32_t j1 = lowest_bit(free);
    const std::uint32_t w = (a ^ j1) == z ? a ^ (free & ~j1) : a ^ j1;
    out.insert(out.end(), {a, w, b});
    return;
  }
  const std::uint32_t k = lowest_bit(a ^ b);
  const std::uint32_t rest = free & ~k;
  if ((z & k) != (a & k)) {
    std::vector<std::uint32_t> rev;
    split_path_avoiding(free, b, a, z, rev);
    out.insert(out.end(), rev.rbegin(), rev.rend());
    return;
  }
  const std::uint32_t j1 = lowest_bit(rest);
  const std::uint32_t c = a ^ j1 ^ lowest_bit(rest & ~j1);
  split_path_avoiding(rest, a, c, z, out);
  split_path(rest, c ^ k, b, out);
}

}  // namespace detail

inline PathCertificate gray_path(int m, const Vertex& a, const Vertex& b) {
  if (m < 1 || a.dim != m || b.dim != m) throw InvalidArgument("dimension mismatch");
  if (a.parity() == b.parity()) throw InvalidArgument("path ends must have opposite parity");
  PathCertificate p{m, {}};
  p.vertices.reserve(std::size_t{1} << m);
  detail::split_path((std::uint32_t{1} << m) - 1, a.bits, b.bits, p.vertices);
  return p;
}

/// Hamilton path of Q_m - {z} from a to b.
inline PathCertificate gray_path_avoiding(int m, const Vertex& a, const Vertex& b, const Vertex& z) {
  if (m < 2 || a.dim != m || b.dim != m || z.dim != m) throw InvalidArgument("dimension mismatch");
  if (a.parity() != b.parity() || a.parity() == z.parity())
    throw InvalidArgument("ends need equal parity and the skipped vertex the other one");
  if (a.bits == b.bits) throw InvalidArgument("ends must differ");
  PathCertificate p{m, {}};
  detail::split_path_avoiding((std::uint32_t{1} << m) - 1, a.bits, b.bits, z.bits, p.vertices);
  return p;
}

}  // namespace hypermatch
