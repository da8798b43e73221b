#pragma once

// Maximal matchings of Q_n up to isomorphism.
//
// A maximal matching with uncovered set S is a perfect matching of Q_n - S
// where S is independent (an uncovered edge would contradict maximality).
// So the search is split by the isomorphism class of S: for a class
// representative S, perfect matchings of Q_n - S are generated and an
// isomorph is kept only if its code vector is minimal under the stabilizer
// of S. Matchings from different classes are never isomorphic.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "hypermatch/canon.hpp"
#include "hypermatch/cube.hpp"
#include "hypermatch/layers.hpp"

namespace hypermatch {

inline bool is_independent(int n, std::span<const std::uint32_t> s) {
  std::set<std::uint32_t> in(s.begin(), s.end());
  for (std::uint32_t v : s) {
    if (v >> n) return false;
    for (int i = 1; i <= n; ++i)
      if (in.count(v ^ bit_of(i))) return false;
  }
  return true;
}

inline bool is_maximal(const Matching& m) {
  for (std::uint32_t v : m.uncovered())
    for (int i = 1; i <= m.dim(); ++i)
      if (!m.covers(v ^ bit_of(i))) return false;
  return true;
}

/// Whether Q_n minus `removed` has a perfect matching (augmenting paths
/// from the even side).
inline bool has_perfect_matching_avoiding(int n, std::span<const std::uint32_t> removed) {
  const std::uint32_t count = 1u << n;
  std::vector<char> gone(count, 0);
  for (std::uint32_t r : removed) gone[r] = 1;
  std::size_t even = 0, odd = 0;
  for (std::uint32_t v = 0; v < count; ++v)
    if (!gone[v]) (parity_of(v) == Parity::even ? even : odd)++;
  if (even != odd) return false;
  std::vector<std::uint32_t> mate(count, Matching::kUncovered);
  std::vector<std::uint32_t> stamp(count, 0);
  std::uint32_t round = 0;
  std::function<bool(std::uint32_t)> augment = [&](std::uint32_t v) {
    for (int i = 0; i < n; ++i) {
      const std::uint32_t w = v ^ (1u << i);
      if (gone[w] || stamp[w] == round) continue;
      stamp[w] = round;
      if (mate[w] == Matching::kUncovered || augment(mate[w])) {
        mate[w] = v;
        return true;
      }
    }
    return false;
  };
  for (std::uint32_t v = 0; v < count; ++v) {
    if (gone[v] || parity_of(v) != Parity::even) continue;
    ++round;
    if (!augment(v)) return false;
  }
  return true;
}

struct UncoveredClass {
  std::vector<std::uint32_t> vertices;  // canonical representative
  CanonicalKey key;
  std::uint64_t orbit = 1;  // number of labeled sets in the class
  bool even_size = true;    // size parity allows it to be the uncovered set of a matching
  bool realizable = false;  // Q_n minus the set has a perfect matching
};

/// One representative per isomorphism class of independent vertex sets of
/// Q_n, empty set first, then by size and key.
inline std::vector<UncoveredClass> uncovered_classes(int n) {
  const CubeGroup& group = CubeGroup::of(n);
  const std::uint32_t count = 1u << n;
  std::set<CanonicalKey> keys;
  std::vector<std::uint8_t> code(count, 0);
  std::vector<std::uint8_t> blocked(count, 0);

  // Every non-empty class has a member containing vertex 0.
  std::function<void(std::uint32_t)> grow = [&](std::uint32_t next) {
    keys.insert(canonical_key_of_codes(n, code));
    for (std::uint32_t v = next; v < count; ++v) {
      if (blocked[v] || code[v]) continue;
      code[v] = 0x80;
      for (int i = 0; i < n; ++i) ++blocked[v ^ (1u << i)];
      grow(v + 1);
      for (int i = 0; i < n; ++i) --blocked[v ^ (1u << i)];
      code[v] = 0;
    }
  };
  code[0] = 0x80;
  for (int i = 0; i < n; ++i) ++blocked[1u << i];
  grow(1);

  std::vector<UncoveredClass> out;
  out.push_back({{}, canonical_key_of_codes(n, std::vector<std::uint8_t>(count, 0)), 1, true,
                 has_perfect_matching_avoiding(n, {})});
  for (const CanonicalKey& k : keys) {
    UncoveredClass c;
    for (std::uint32_t v = 0; v < count; ++v)
      if (k.bytes[v] & 0x80) c.vertices.push_back(v);
    c.key = k;
    c.orbit = group.order() / stabilizer_of_codes(n, k.bytes).size();
    c.even_size = c.vertices.size() % 2 == count % 2;
    c.realizable = has_perfect_matching_avoiding(n, c.vertices);
    out.push_back(std::move(c));
  }
  std::stable_sort(out.begin() + 1, out.end(), [](const UncoveredClass& a, const UncoveredClass& b) {
    return a.vertices.size() < b.vertices.size();
  });
  return out;
}

/// Class counts under the three natural conventions, each with and without
/// the empty set.
struct UncoveredClassCounts {
  std::size_t independent = 0;  // every independent set
  std::size_t even_size = 0;    // sizes a matching can leave uncovered
  std::size_t realizable = 0;   // uncovered set of some maximal matching
};

inline UncoveredClassCounts count_classes(std::span<const UncoveredClass> classes, bool include_empty) {
  UncoveredClassCounts c;
  for (const UncoveredClass& u : classes) {
    if (!include_empty && u.vertices.empty()) continue;
    ++c.independent;
    c.even_size += u.even_size;
    c.realizable += u.realizable;
  }
  return c;
}

struct EnumerationCounts {
  std::uint64_t non_isomorphic = 0;
  std::uint64_t with_duplicates = 0;  // sum of orbit sizes of the emitted representatives
  std::uint64_t labeled = 0;          // perfect matchings of Q_n - S for the given S

  EnumerationCounts& operator+=(const EnumerationCounts& o) {
    non_isomorphic += o.non_isomorphic;
    with_duplicates += o.with_duplicates;
    labeled += o.labeled;
    return *this;
  }
};

using MatchingSink = std::function<void(const Matching& m, std::uint64_t orbit_size)>;

/// Streams one representative per isomorphism class of maximal matchings of
/// Q_n whose uncovered set is exactly `required_uncovered`.
inline EnumerationCounts maximal_matchings(int n, std::span<const std::uint32_t> required_uncovered,
                                           const MatchingSink& sink = {}) {
  if (!is_independent(n, required_uncovered)) throw InvalidArgument("required uncovered set is not independent");
  const CubeGroup& group = CubeGroup::of(n);
  const std::uint32_t count = 1u << n;

  std::vector<std::uint8_t> code(count, 0);
  for (std::uint32_t v : required_uncovered) code[v] = 0x80;
  const auto set_stab = stabilizer_of_codes(n, code);

  EnumerationCounts counts;
  std::vector<std::uint8_t> work(count, 0);
  for (std::uint32_t v : required_uncovered) work[v] = 0xFF;  // never matched
  auto emit = [&] {
    ++counts.labeled;
    if (!is_minimal_codes(n, work, set_stab)) return;
    const auto stab = stabilizer_of_codes(n, work, set_stab);
    const std::uint64_t orbit = group.order() / stab.size();
    ++counts.non_isomorphic;
    counts.with_duplicates += orbit;
    if (sink) sink(decode_codes(n, work).first, orbit);
  };
  // 0xFF marks S while searching; swap to 0 so the code matches vertex_codes.
  std::function<void(std::uint32_t)> rec = [&](std::uint32_t from) {
    std::uint32_t v = from;
    while (v < count && work[v]) ++v;
    if (v == count) {
      for (std::uint32_t s : required_uncovered) work[s] = 0;
      emit();
      for (std::uint32_t s : required_uncovered) work[s] = 0xFF;
      return;
    }
    for (int i = 1; i <= n; ++i) {
      const std::uint32_t w = v ^ bit_of(i);
      if (w < v || work[w]) continue;
      work[v] = work[w] = static_cast<std::uint8_t>(i);
      rec(v + 1);
      work[v] = work[w] = 0;
    }
  };
  if (has_perfect_matching_avoiding(n, required_uncovered)) rec(0);
  return counts;
}

/// Runs maximal_matchings over every realizable uncovered class.
inline EnumerationCounts all_maximal_matchings(int n, const MatchingSink& sink = {}, bool include_perfect = true) {
  EnumerationCounts total;
  for (const UncoveredClass& c : uncovered_classes(n)) {
    if (!c.realizable || (!include_perfect && c.vertices.empty())) continue;
    total += maximal_matchings(n, c.vertices, sink);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Matchings one edge away from a C-condition structure.

struct OneEdgeAway {
  Matching matching;
  Edge restoring;  // adding this edge re-creates a C-condition structure
  CanonicalKey key;
};

namespace detail {

/// Removes edges in increasing order while the C-structure survives.
inline Matching minimal_c_configuration(const Matching& m) {
  Matching cur = m;
  const std::vector<Edge> edges(m.edges().begin(), m.edges().end());
  for (const Edge& e : edges) {
    cur.erase(e);
    if (!has_c_structure(cur)) cur.insert(e);
  }
  return cur;
}

}  // namespace detail

/// From every C-structured matching in `violating`: shrink it to a minimal
/// C-structured configuration, then delete each of its edges in turn, from
/// the minimal configuration and from the original matching. Results
/// without a C-structure are kept, one per isomorphism class.
inline std::vector<OneEdgeAway> one_edge_away_from(std::span<const Matching> violating) {
  std::map<CanonicalKey, OneEdgeAway> found;
  auto consider = [&](const Matching& base, const Edge& e) {
    Matching m = base;
    m.erase(e);
    if (has_c_structure(m)) return;
    CanonicalKey key = canonical_key(m);
    found.try_emplace(key, OneEdgeAway{m, e, key});
  };
  for (const Matching& m : violating) {
    if (!has_c_structure(m)) continue;
    const Matching minimal = detail::minimal_c_configuration(m);
    for (const Edge& e : minimal.edges()) {
      consider(minimal, e);
      consider(m, e);
    }
  }
  std::vector<OneEdgeAway> out;
  for (auto& [k, v] : found) out.push_back(std::move(v));
  return out;
}

inline std::vector<OneEdgeAway> one_edge_away_instances(int n) {
  if (n < 4) throw InvalidArgument("one-edge-away instances need n >= 4");
  std::vector<Matching> violating;
  all_maximal_matchings(n, [&](const Matching& m, std::uint64_t) {
    if (has_c_structure(m)) violating.push_back(m);
  });
  return one_edge_away_from(violating);
}

// ---------------------------------------------------------------------------
// DIMACS CNF export of the matching constraint system.

struct DimacsOptions {
  bool require_maximal = true;
  std::vector<std::uint32_t> forced_uncovered;
  std::vector<Matching> excluded;
};

/// Variables: edges in (base, dir) order are 1..E, then vertex v is E+1+v.
inline std::string emit_dimacs(int n, const DimacsOptions& options = {}) {
  check_dim(n);
  const std::uint32_t count = 1u << n;
  std::vector<Edge> edges;
  for (std::uint32_t w = 0; w < count; ++w)
    for (int i = 1; i <= n; ++i)
      if (!(w & bit_of(i))) edges.push_back({w, i});
  auto edge_var = [&](const Edge& e) {
    return static_cast<long>(std::lower_bound(edges.begin(), edges.end(), e) - edges.begin()) + 1;
  };
  const long num_edges = static_cast<long>(edges.size());
  auto vertex_var = [&](std::uint32_t v) { return num_edges + 1 + static_cast<long>(v); };

  std::vector<std::vector<long>> clauses;
  // At most one selected edge per vertex.
  for (std::uint32_t v = 0; v < count; ++v)
    for (int a = 1; a <= n; ++a)
      for (int b = a + 1; b <= n; ++b)
        clauses.push_back({-edge_var(Edge::between(v, v ^ bit_of(a))), -edge_var(Edge::between(v, v ^ bit_of(b)))});
  // A covered vertex has a selected incident edge.
  for (std::uint32_t v = 0; v < count; ++v) {
    std::vector<long> c;
    for (int i = 1; i <= n; ++i) c.push_back(edge_var(Edge::between(v, v ^ bit_of(i))));
    c.push_back(-vertex_var(v));
    clauses.push_back(std::move(c));
  }
  // A selected edge covers both endpoints.
  for (const Edge& e : edges) {
    clauses.push_back({-edge_var(e), vertex_var(e.base)});
    clauses.push_back({-edge_var(e), vertex_var(e.other())});
  }
  if (options.require_maximal)
    for (const Edge& e : edges) clauses.push_back({vertex_var(e.base), vertex_var(e.other())});
  for (std::uint32_t w : options.forced_uncovered) {
    if (w >= count) throw InvalidArgument("forced uncovered vertex outside the cube");
    clauses.push_back({-vertex_var(w)});
  }
  for (const Matching& f : options.excluded) {
    if (f.dim() != n) throw InvalidArgument("excluded matching has the wrong dimension");
    std::vector<long> c;
    for (const Edge& e : edges)
      if (!f.contains(e)) c.push_back(edge_var(e));
    clauses.push_back(std::move(c));
  }

  std::ostringstream out;
  out << "p cnf " << num_edges + count << ' ' << clauses.size() << '\n';
  for (const auto& c : clauses) {
    for (long lit : c) out << lit << ' ';
    out << "0\n";
  }
  return out.str();
}

}  // namespace hypermatch
