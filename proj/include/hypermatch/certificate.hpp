#pragma once

// Path/cycle certificates and a validator that is deliberately independent
// of the search code: it only uses plain containers and the definitions.

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "hypermatch/cube.hpp"

namespace hypermatch {

struct PathCertificate {
  int dim = 1;
  std::vector<std::uint32_t> vertices;

  std::uint32_t front() const { return vertices.front(); }
  std::uint32_t back() const { return vertices.back(); }
  friend bool operator==(const PathCertificate&, const PathCertificate&) = default;
};

/// Closing edge back.front() is implicit.
struct CycleCertificate {
  int dim = 2;
  std::vector<std::uint32_t> vertices;
  friend bool operator==(const CycleCertificate&, const CycleCertificate&) = default;
};

struct Validation {
  bool ok = true;
  std::string message;

  explicit operator bool() const { return ok; }
  static Validation fail(std::string msg) { return {false, std::move(msg)}; }
};

namespace detail {

inline bool adjacent(std::uint32_t a, std::uint32_t b) {
  const std::uint32_t d = a ^ b;
  return d != 0 && (d & (d - 1)) == 0;
}

inline Validation check_walk(int dim, std::span<const std::uint32_t> vs, std::span<const std::uint32_t> removed,
                             bool closed) {
  const std::uint64_t n_vertices = std::uint64_t{1} << dim;
  std::set<std::uint32_t> skip(removed.begin(), removed.end());
  std::set<std::uint32_t> seen;
  for (std::size_t k = 0; k < vs.size(); ++k) {
    if (vs[k] >= n_vertices) return Validation::fail("vertex out of range at position " + std::to_string(k));
    if (skip.count(vs[k])) return Validation::fail("removed vertex visited at position " + std::to_string(k));
    if (!seen.insert(vs[k]).second) return Validation::fail("vertex repeated at position " + std::to_string(k));
    if (k > 0 && !adjacent(vs[k - 1], vs[k]))
      return Validation::fail("non-adjacent step at position " + std::to_string(k));
  }
  if (seen.size() + skip.size() != n_vertices) return Validation::fail("not every vertex is covered");
  if (closed && vs.size() > 2 && !adjacent(vs.back(), vs.front()))
    return Validation::fail("cycle does not close");
  return {};
}

inline Validation check_contains(std::span<const std::uint32_t> vs, const Matching& m, bool closed) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> used;
  auto add = [&](std::uint32_t a, std::uint32_t b) { used.insert({std::min(a, b), std::max(a, b)}); };
  for (std::size_t k = 1; k < vs.size(); ++k) add(vs[k - 1], vs[k]);
  if (closed && vs.size() > 2) add(vs.back(), vs.front());
  for (const Edge& e : m.edges()) {
    if (!used.count({e.base, e.other()}))
      return Validation::fail("matching edge " + std::to_string(e.base) + "/" + std::to_string(e.dir) +
                              " is not used");
  }
  return {};
}

}  // namespace detail

/// Hamilton path of Q_dim minus `removed` that uses every edge of `forced`.
inline Validation validate_path(const PathCertificate& p, const Matching& forced,
                                std::span<const std::uint32_t> removed = {}) {
  if (forced.dim() != p.dim) return Validation::fail("dimension mismatch");
  if (auto r = detail::check_walk(p.dim, p.vertices, removed, false); !r) return r;
  return detail::check_contains(p.vertices, forced, false);
}

inline Validation validate_path(const PathCertificate& p, const Matching& forced, std::uint32_t u, std::uint32_t v,
                                std::span<const std::uint32_t> removed = {}) {
  if (p.vertices.empty()) return Validation::fail("empty path");
  const bool forward = p.front() == u && p.back() == v;
  const bool reverse = p.front() == v && p.back() == u;
  if (!forward && !reverse) return Validation::fail("wrong endpoints");
  return validate_path(p, forced, removed);
}

inline Validation validate_cycle(const CycleCertificate& c, const Matching& forced) {
  if (forced.dim() != c.dim) return Validation::fail("dimension mismatch");
  if (c.vertices.size() != (std::size_t{1} << c.dim)) return Validation::fail("wrong length");
  if (auto r = detail::check_walk(c.dim, c.vertices, {}, true); !r) return r;
  return detail::check_contains(c.vertices, forced, true);
}

/// Undirected edge set of a path, as sorted Edge values.
inline std::vector<Edge> path_edges(std::span<const std::uint32_t> vs) {
  std::vector<Edge> out;
  for (std::size_t k = 1; k < vs.size(); ++k) out.push_back(Edge::between(vs[k - 1], vs[k]));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace hypermatch
