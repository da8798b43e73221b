#pragma once

// Flat vertex sets of Q_n as bit words. Q_n with n <= 6 fits a single
// uint64_t; larger cubes use std::bitset. Shifting a set by 2^(i-1) moves
// every vertex to its direction-i neighbor, which gives bit-parallel BFS.

#include <bit>
#include <bitset>
#include <cstdint>
#include <vector>

namespace hypermatch::detail {

template <class Set>
struct SetOps;

template <>
struct SetOps<std::uint64_t> {
  using Set = std::uint64_t;
  static constexpr int kMaxDim = 6;
  static Set single(std::uint32_t v) { return Set{1} << v; }
  static bool test(Set s, std::uint32_t v) { return (s >> v) & 1u; }
  static void set(Set& s, std::uint32_t v) { s |= Set{1} << v; }
  static void reset(Set& s, std::uint32_t v) { s &= ~(Set{1} << v); }
  static int count(Set s) { return std::popcount(s); }
  static bool none(Set s) { return s == 0; }
  static std::uint32_t first(Set s) { return static_cast<std::uint32_t>(std::countr_zero(s)); }
  static Set full(std::uint32_t n) { return n == 64 ? ~Set{0} : (Set{1} << n) - 1; }
};

template <std::size_t Bits>
struct SetOps<std::bitset<Bits>> {
  using Set = std::bitset<Bits>;
  static constexpr int kMaxDim = std::bit_width(Bits) - 1;
  static Set single(std::uint32_t v) {
    Set s;
    s.set(v);
    return s;
  }
  static bool test(const Set& s, std::uint32_t v) { return s.test(v); }
  static void set(Set& s, std::uint32_t v) { s.set(v); }
  static void reset(Set& s, std::uint32_t v) { s.reset(v); }
  static int count(const Set& s) { return static_cast<int>(s.count()); }
  static bool none(const Set& s) { return s.none(); }
  static std::uint32_t first(const Set& s) { return static_cast<std::uint32_t>(s._Find_first()); }
  static Set full(std::uint32_t n) {
    Set s;
    for (std::uint32_t v = 0; v < n; ++v) s.set(v);
    return s;
  }
};

/// Precomputed per-dimension masks: low[i] holds the vertices whose
/// direction-(i+1) coordinate is 0.
template <class Set>
struct CubeMasks {
  using Ops = SetOps<Set>;
  int dim = 0;
  std::vector<Set> low;
  std::vector<Set> adjacency;
  Set even{};

  explicit CubeMasks(int n) : dim(n), low(n), adjacency(std::size_t{1} << n) {
    const std::uint32_t count = std::uint32_t{1} << n;
    for (std::uint32_t v = 0; v < count; ++v)
      if (std::popcount(v) % 2 == 0) Ops::set(even, v);
    for (int i = 0; i < n; ++i)
      for (std::uint32_t v = 0; v < count; ++v)
        if (!(v & (1u << i))) Ops::set(low[i], v);
    for (std::uint32_t v = 0; v < count; ++v)
      for (int i = 0; i < n; ++i) Ops::set(adjacency[v], v ^ (1u << i));
  }

  /// Direction-(i+1) neighbors of the vertices of `s`.
  Set across(const Set& s, int i) const {
    const unsigned shift = 1u << i;
    return ((s & low[i]) << shift) | ((s >> shift) & low[i]);
  }

  /// All vertices adjacent to some vertex of `s`.
  Set expand(const Set& s) const {
    Set out{};
    for (int i = 0; i < dim; ++i) {
      const unsigned shift = 1u << i;
      out |= (s & low[i]) << shift;
      out |= (s >> shift) & low[i];
    }
    return out;
  }

  /// Vertices of `allowed` reachable from `seed` inside `allowed | seed`.
  Set flood(Set seed, const Set& allowed) const {
    Set reach = seed;
    for (;;) {
      Set next = reach | (expand(reach) & allowed);
      if (next == reach) return reach;
      reach = next;
    }
  }
};

}  // namespace hypermatch::detail
