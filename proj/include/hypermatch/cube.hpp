#pragma once

// Hypercube primitives: vertices, edges, matchings and the left/right
// coordinate split used to cut Q_n into d-dimensional subcubes.
//
// Convention: direction i (1-based) is bit (i-1) of a vertex. The
// right part of a split holds the low d bits, the left part the rest.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypermatch {

inline constexpr int kMaxDim = 24;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad input: out-of-range direction, parity mismatch, malformed matching.
struct InvalidArgument : Error {
  using Error::Error;
};

/// A configured cap (solver dimension, full-cube fallback) was exceeded.
struct Unsupported : Error {
  using Error::Error;
};

/// A step that the verified base cases guarantee came back empty. Carries a
/// human-readable description of the failing subproblem.
struct CounterexampleArtifact : Error {
  using Error::Error;
};

enum class Parity : std::uint8_t { even = 0, odd = 1 };

inline constexpr Parity opposite(Parity p) {
  return p == Parity::even ? Parity::odd : Parity::even;
}

inline constexpr Parity parity_of(std::uint32_t bits) {
  return static_cast<Parity>(std::popcount(bits) & 1);
}

/// +1 for even vertices, -1 for odd ones.
inline constexpr int chi(std::uint32_t bits) {
  return parity_of(bits) == Parity::even ? 1 : -1;
}

inline constexpr std::uint32_t bit_of(int dir) { return std::uint32_t{1} << (dir - 1); }

inline void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("dimension out of range: " + std::to_string(dim));
}

struct Vertex {
  int dim = 1;
  std::uint32_t bits = 0;

  Vertex() = default;
  Vertex(int d, std::uint32_t b) : dim(d), bits(b) {
    check_dim(d);
    if (b >> d) throw InvalidArgument("vertex bits exceed dimension");
  }

  Parity parity() const { return parity_of(bits); }

  friend bool operator==(const Vertex&, const Vertex&) = default;
  friend auto operator<=>(const Vertex&, const Vertex&) = default;
};

inline Parity parity(const Vertex& v) { return v.parity(); }

inline Vertex neighbor(const Vertex& v, int dir) {
  if (dir < 1 || dir > v.dim) throw InvalidArgument("direction out of range: " + std::to_string(dir));
  return Vertex(v.dim, v.bits ^ bit_of(dir));
}

/// An edge stored by its endpoint with coordinate `dir` equal to 0.
struct Edge {
  std::uint32_t base = 0;
  int dir = 1;

  std::uint32_t other() const { return base ^ bit_of(dir); }
  bool touches(std::uint32_t v) const { return v == base || v == other(); }
  /// Parity of the 0-side endpoint; this is the edge's half-layer class.
  Parity side_parity() const { return parity_of(base); }

  static Edge between(std::uint32_t a, std::uint32_t b) {
    const std::uint32_t diff = a ^ b;
    if (!std::has_single_bit(diff)) throw InvalidArgument("vertices are not adjacent");
    const int dir = std::countr_zero(diff) + 1;
    return Edge{a & ~diff, dir};
  }

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Vertex-disjoint set of Q_n edges kept sorted by (base, dir), with a
/// partner table for O(1) coverage queries.
class Matching {
 public:
  static constexpr std::uint32_t kUncovered = 0xFFFFFFFFu;

  Matching() : Matching(1) {}
  explicit Matching(int dim) : dim_(dim) {
    check_dim(dim);
    partner_.assign(std::size_t{1} << dim, kUncovered);
  }

  static Matching from_edges(int dim, std::span<const Edge> edges) {
    Matching m(dim);
    for (const Edge& e : edges) {
      if (!m.insert(e)) throw InvalidArgument("edges do not form a matching");
    }
    return m;
  }

  int dim() const { return dim_; }
  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }
  std::uint32_t num_vertices() const { return std::uint32_t{1} << dim_; }
  std::span<const Edge> edges() const { return edges_; }

  bool valid_edge(const Edge& e) const {
    return e.dir >= 1 && e.dir <= dim_ && (e.base >> dim_) == 0 && !(e.base & bit_of(e.dir));
  }

  /// Adds `e`; returns false (and changes nothing) if an endpoint is taken.
  bool insert(const Edge& e) {
    if (!valid_edge(e)) throw InvalidArgument("edge outside the cube");
    const std::uint32_t a = e.base, b = e.other();
    if (partner_[a] != kUncovered || partner_[b] != kUncovered) return false;
    partner_[a] = b;
    partner_[b] = a;
    edges_.insert(std::lower_bound(edges_.begin(), edges_.end(), e), e);
    return true;
  }

  bool erase(const Edge& e) {
    auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
    if (it == edges_.end() || *it != e) return false;
    edges_.erase(it);
    partner_[e.base] = kUncovered;
    partner_[e.other()] = kUncovered;
    return true;
  }

  bool covers(std::uint32_t v) const { return partner_[v] != kUncovered; }
  std::uint32_t partner_or_none(std::uint32_t v) const { return partner_[v]; }
  std::optional<std::uint32_t> partner(std::uint32_t v) const {
    if (partner_[v] == kUncovered) return std::nullopt;
    return partner_[v];
  }
  bool contains(const Edge& e) const { return valid_edge(e) && partner_[e.base] == e.other(); }
  bool contains_pair(std::uint32_t a, std::uint32_t b) const { return partner_[a] == b; }
  bool is_perfect() const { return edges_.size() * 2 == partner_.size(); }

  /// Bitmask of spanned directions: bit (i-1) set iff some edge has direction i.
  std::uint32_t spanned_mask() const {
    std::uint32_t mask = 0;
    for (const Edge& e : edges_) mask |= bit_of(e.dir);
    return mask;
  }

  std::vector<std::uint32_t> uncovered() const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t v = 0; v < partner_.size(); ++v)
      if (partner_[v] == kUncovered) out.push_back(v);
    return out;
  }

  friend bool operator==(const Matching& a, const Matching& b) {
    return a.dim_ == b.dim_ && a.edges_ == b.edges_;
  }

 private:
  int dim_;
  std::vector<Edge> edges_;
  std::vector<std::uint32_t> partner_;
};

inline std::vector<int> spanned_directions(const Matching& m) {
  std::vector<int> dirs;
  const std::uint32_t mask = m.spanned_mask();
  for (int i = 1; i <= m.dim(); ++i)
    if (mask & bit_of(i)) dirs.push_back(i);
  return dirs;
}

// ---------------------------------------------------------------------------
// Left/right split of Q_n = Q_{n-d} x Q_d.

struct Split {
  Vertex left;
  Vertex right;
};

inline Split project(const Vertex& v, int d) {
  if (d < 1 || d > v.dim) throw InvalidArgument("split width out of range");
  const std::uint32_t right = v.bits & ((std::uint32_t{1} << d) - 1);
  const std::uint32_t left = v.bits >> d;
  // Q_0 has a single vertex; represent it as a dim-1 zero so Vertex stays valid.
  const int ldim = v.dim - d;
  return Split{ldim == 0 ? Vertex(1, 0) : Vertex(ldim, left), Vertex(d, right)};
}

inline Vertex embed(const Vertex& left, const Vertex& right, int n) {
  return Vertex(n, (left.bits << right.dim) | right.bits);
}

inline std::uint32_t subcube_vertex(std::uint32_t left, std::uint32_t right, int d) {
  return (left << d) | right;
}

/// The edges of `m` inside the canonical copy of Q_d with left part `left`,
/// expressed in local d-dimensional coordinates.
inline Matching restrict_to_subcube(const Matching& m, int d, std::uint32_t left) {
  Matching local(d);
  const std::uint32_t lowmask = (std::uint32_t{1} << d) - 1;
  for (const Edge& e : m.edges()) {
    if (e.dir > d || (e.base >> d) != left) continue;
    local.insert(Edge{e.base & lowmask, e.dir});
  }
  return local;
}

/// Coordinate relabeling: `to_new[i-1]` is the new direction of old
/// direction i. Used to move the spanned directions into the low bits.
class Relabeling {
 public:
  Relabeling() = default;
  explicit Relabeling(std::vector<int> to_new) : to_new_(std::move(to_new)) {
    to_old_.assign(to_new_.size(), 0);
    for (std::size_t i = 0; i < to_new_.size(); ++i) to_old_.at(to_new_[i] - 1) = static_cast<int>(i) + 1;
  }

  static Relabeling identity(int n) {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i + 1;
    return Relabeling(std::move(p));
  }

  /// Sends the directions in `mask` (padded with the smallest unused ones up to
  /// `d` directions) to 1..d, keeping relative order; the rest go to d+1..n.
  static Relabeling low_directions(int n, std::uint32_t mask, int d) {
    std::vector<int> chosen, rest;
    for (int i = 1; i <= n; ++i) (mask & bit_of(i) ? chosen : rest).push_back(i);
    if (static_cast<int>(chosen.size()) > d) throw InvalidArgument("matching spans more than d directions");
    while (static_cast<int>(chosen.size()) < d) {
      chosen.push_back(rest.front());
      rest.erase(rest.begin());
    }
    std::sort(chosen.begin(), chosen.end());
    std::vector<int> to_new(n);
    int next = 1;
    for (int i : chosen) to_new[i - 1] = next++;
    for (int i : rest) to_new[i - 1] = next++;
    return Relabeling(std::move(to_new));
  }

  int dim() const { return static_cast<int>(to_new_.size()); }

  std::uint32_t forward(std::uint32_t v) const { return apply(v, to_new_); }
  std::uint32_t backward(std::uint32_t v) const { return apply(v, to_old_); }

  Matching forward(const Matching& m) const { return map(m, to_new_); }
  Matching backward(const Matching& m) const { return map(m, to_old_); }

 private:
  static std::uint32_t apply(std::uint32_t v, const std::vector<int>& p) {
    std::uint32_t out = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
      if (v & (std::uint32_t{1} << i)) out |= bit_of(p[i]);
    return out;
  }
  static Matching map(const Matching& m, const std::vector<int>& p) {
    Matching out(m.dim());
    for (const Edge& e : m.edges()) out.insert(Edge::between(apply(e.base, p), apply(e.other(), p)));
    return out;
  }

  std::vector<int> to_new_;
  std::vector<int> to_old_;
};

}  // namespace hypermatch
