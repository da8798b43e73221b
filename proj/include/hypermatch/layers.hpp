#pragma once

// Layers, half-layers and almost half-layers of a matching, and the three
// obstructions (C1/C2/C3) to extending a matching into a u-v Hamilton path.

#include <optional>
#include <vector>

#include "hypermatch/cube.hpp"

namespace hypermatch {

/// Half-layer in direction `dir` whose edges have 0-side endpoints of parity
/// `side_parity`. `missing` is set for almost half-layers and names the
/// 0-side endpoint of the absent edge.
struct HalfLayerDesc {
  int dir = 1;
  Parity side_parity = Parity::even;
  std::optional<std::uint32_t> missing;

  /// Whether `v` is an endpoint of some edge of the full half-layer.
  bool covers(std::uint32_t v) const { return parity_of(v & ~bit_of(dir)) == side_parity; }

  /// Endpoints of the absent edge of an almost half-layer.
  std::uint32_t missing_a() const { return *missing; }
  std::uint32_t missing_b() const { return *missing ^ bit_of(dir); }

  friend bool operator==(const HalfLayerDesc&, const HalfLayerDesc&) = default;
};

inline std::size_t half_layer_size(int n) { return std::size_t{1} << (n - 2); }

/// All edges of the half-layer (dir, side_parity) in Q_n.
inline std::vector<Edge> half_layer_edges(int n, int dir, Parity side_parity) {
  std::vector<Edge> out;
  out.reserve(half_layer_size(n));
  const std::uint32_t b = bit_of(dir);
  for (std::uint32_t w = 0; w < (std::uint32_t{1} << n); ++w)
    if (!(w & b) && parity_of(w) == side_parity) out.push_back(Edge{w, dir});
  return out;
}

namespace detail {

inline void require_layer_dim(const Matching& m) {
  if (m.dim() < 2) throw InvalidArgument("half-layers need dimension >= 2");
}

/// counts[2*(dir-1) + parity] = number of M-edges in that half-layer.
inline std::vector<std::size_t> half_layer_counts(const Matching& m) {
  std::vector<std::size_t> counts(2 * static_cast<std::size_t>(m.dim()), 0);
  for (const Edge& e : m.edges()) ++counts[2 * (e.dir - 1) + static_cast<int>(e.side_parity())];
  return counts;
}

}  // namespace detail

inline std::vector<HalfLayerDesc> half_layers_in(const Matching& m) {
  detail::require_layer_dim(m);
  const auto counts = detail::half_layer_counts(m);
  const std::size_t full = half_layer_size(m.dim());
  std::vector<HalfLayerDesc> out;
  for (int dir = 1; dir <= m.dim(); ++dir)
    for (int p = 0; p < 2; ++p)
      if (counts[2 * (dir - 1) + p] == full) out.push_back({dir, static_cast<Parity>(p), std::nullopt});
  return out;
}

/// Half-layers that lack exactly one edge in M.
inline std::vector<HalfLayerDesc> almost_half_layers_in(const Matching& m) {
  detail::require_layer_dim(m);
  const auto counts = detail::half_layer_counts(m);
  const std::size_t full = half_layer_size(m.dim());
  std::vector<HalfLayerDesc> out;
  for (int dir = 1; dir <= m.dim(); ++dir) {
    for (int p = 0; p < 2; ++p) {
      if (counts[2 * (dir - 1) + p] + 1 != full) continue;
      const std::uint32_t b = bit_of(dir);
      for (std::uint32_t w = 0; w < m.num_vertices(); ++w) {
        if ((w & b) || parity_of(w) != static_cast<Parity>(p)) continue;
        if (!m.contains_pair(w, w ^ b)) {
          out.push_back({dir, static_cast<Parity>(p), w});
          break;
        }
      }
    }
  }
  return out;
}

struct C2Witness {
  HalfLayerDesc almost;
  int i = 1;  // direction with v = u^i
  int j = 1;  // direction of the pinned edges u u^j and v v^j

  friend bool operator==(const C2Witness&, const C2Witness&) = default;
};

struct CConditionReport {
  std::optional<HalfLayerDesc> c1;
  std::optional<C2Witness> c2;
  bool c3 = false;

  bool any() const { return c1.has_value() || c2.has_value() || c3; }
};

namespace detail {

/// First direction j != i with a a^j and b b^j both in M, or 0.
inline int pinned_direction(const Matching& m, std::uint32_t a, std::uint32_t b, int i) {
  for (int j = 1; j <= m.dim(); ++j) {
    if (j == i) continue;
    if (m.contains_pair(a, a ^ bit_of(j)) && m.contains_pair(b, b ^ bit_of(j))) return j;
  }
  return 0;
}

}  // namespace detail

/// Which of C1/C2/C3 hold for (M, u, v). C2 is symmetric in u and v: the
/// almost half-layer must miss exactly the edge uv.
inline CConditionReport c_condition_report(const Matching& m, const Vertex& u, const Vertex& v) {
  if (u.dim != m.dim() || v.dim != m.dim()) throw InvalidArgument("dimension mismatch");
  detail::require_layer_dim(m);
  if (u.parity() == v.parity()) throw InvalidArgument("endpoints must have opposite parity");

  CConditionReport report;
  report.c3 = m.contains_pair(u.bits, v.bits);
  for (const HalfLayerDesc& h : half_layers_in(m)) {
    if (h.covers(u.bits) && h.covers(v.bits)) {
      report.c1 = h;
      break;
    }
  }
  const std::uint32_t diff = u.bits ^ v.bits;
  if (std::has_single_bit(diff)) {
    const int i = std::countr_zero(diff) + 1;
    for (const HalfLayerDesc& a : almost_half_layers_in(m)) {
      if (a.dir != i) continue;
      const std::uint32_t lo = u.bits & ~diff;
      if (a.missing_a() != lo) continue;
      if (int j = detail::pinned_direction(m, u.bits, v.bits, i)) {
        report.c2 = C2Witness{a, i, j};
        break;
      }
    }
  }
  return report;
}

/// True if some endpoint pair would be blocked by C1 or C2, i.e. M contains a
/// half-layer or the C2 configuration (almost half-layer plus pinned edges).
inline bool has_c_structure(const Matching& m) {
  if (m.dim() < 2) return false;
  if (!half_layers_in(m).empty()) return true;
  for (const HalfLayerDesc& a : almost_half_layers_in(m))
    if (detail::pinned_direction(m, a.missing_a(), a.missing_b(), a.dir)) return true;
  return false;
}

/// Completes a matching that contains a half-layer or an almost half-layer
/// in direction i to a perfect matching using only direction-i edges.
inline Matching unique_extension(const Matching& m) {
  detail::require_layer_dim(m);
  int dir = 0;
  if (auto full = half_layers_in(m); !full.empty()) {
    dir = full.front().dir;
  } else if (auto almost = almost_half_layers_in(m); !almost.empty()) {
    dir = almost.front().dir;
  } else {
    throw InvalidArgument("matching has no half-layer or almost half-layer");
  }
  Matching out = m;
  const std::uint32_t b = bit_of(dir);
  for (std::uint32_t w = 0; w < m.num_vertices(); ++w) {
    if (out.covers(w)) continue;
    if (out.covers(w ^ b)) throw InvalidArgument("matching is not uniquely extendable");
    out.insert(Edge::between(w, w ^ b));
  }
  return out;
}

}  // namespace hypermatch
