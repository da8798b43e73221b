#pragma once

// Hamilton cycles and paths of Q_n extending a matching that spans at most
// d directions. After relabeling, the matching lives in the low d bits, so
// Q_n splits into 2^(n-d) canonical copies of Q_d (the "cubes"), indexed by
// the high n-d bits. Exact search only ever runs on a single cube, except
// for the capped full-cube fallbacks.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hypermatch/certificate.hpp"
#include "hypermatch/cube.hpp"
#include "hypermatch/gray.hpp"
#include "hypermatch/layers.hpp"
#include "hypermatch/solver.hpp"

namespace hypermatch {

struct ConstructOptions {
  int solver_cap = 5;  // largest cube dimension handed to the exact search
  int full_cap = 7;    // largest n for a direct search on the whole of Q_n
  SolverOptions solver;
};

/// What a construction did, for tests and reports.
struct ConstructTrace {
  std::string branch;
  std::size_t subcube_solves = 0;
  bool full_fallback = false;
};

// ---------------------------------------------------------------------------
// Cube sequences.

/// The cubes along a path of Q_{n-d}, with the matching of each cube in
/// local d-bit coordinates.
struct CubeSequence {
  int n = 0;
  int d = 0;
  std::vector<std::uint32_t> trail;
  std::vector<Matching> matchings;
};

inline CubeSequence induced_sequence(const Matching& m, int d, std::span<const std::uint32_t> trail) {
  CubeSequence seq{m.dim(), d, {trail.begin(), trail.end()}, {}};
  for (std::uint32_t c : trail) seq.matchings.push_back(restrict_to_subcube(m, d, c));
  return seq;
}

/// Half-layers of one direction in every cube, all with the same global
/// parity (parity of the global 0-side endpoint of each edge).
struct HalfLayerSequence {
  int dir = 1;
  Parity global_parity = Parity::even;
  std::vector<Parity> local_parities;  // side parity inside each cube
};

struct SequencePath {
  std::optional<PathCertificate> path;  // Q_n coordinates
  std::optional<HalfLayerSequence> blocking;
  std::vector<std::size_t> junction_choices;  // usable crossing vertices at each junction
};

namespace detail {

inline bool contains_half_layer(const Matching& m, int dir, Parity side) {
  for (const Edge& e : half_layer_edges(m.dim(), dir, side))
    if (!m.contains(e)) return false;
  return true;
}

/// Memoized "is there a Hamilton path a -> b in Q_d extending m".
class Reach {
 public:
  Reach(const Matching& m, const SolverOptions& options)
      : m_(m), options_(options), memo_(std::size_t{1} << (2 * m.dim()), -1) {}

  bool operator()(std::uint32_t a, std::uint32_t b) {
    if (a == b || parity_of(a) == parity_of(b)) return false;
    const int d = m_.dim();
    auto& slot = memo_[(std::size_t{std::min(a, b)} << d) | std::max(a, b)];
    if (slot < 0) {
      ++solves;
      slot = hamilton_path(d, m_, Vertex(d, a), Vertex(d, b), {}, options_).has_value();
    }
    return slot == 1;
  }

  /// The path itself, oriented from a to b.
  std::vector<std::uint32_t> path(std::uint32_t a, std::uint32_t b) {
    const int d = m_.dim();
    ++solves;
    auto p = hamilton_path(d, m_, Vertex(d, a), Vertex(d, b), {}, options_);
    if (!p) throw CounterexampleArtifact("cube path vanished between searches");
    if (p->front() != a) std::reverse(p->vertices.begin(), p->vertices.end());
    return p->vertices;
  }

  const Matching& matching() const { return m_; }
  std::size_t solves = 0;

 private:
  Matching m_;
  SolverOptions options_;
  std::vector<std::int8_t> memo_;
};

/// Threads paths through cube sequences, sharing reachability memos
/// between calls on the same cube matchings.
class SequenceSolver {
 public:
  explicit SequenceSolver(const ConstructOptions& options) : options_(options) {}

  Reach& reach(const Matching& m) {
    std::vector<Edge> key(m.edges().begin(), m.edges().end());
    std::sort(key.begin(), key.end());
    auto& slot = cache_[{m.dim(), std::move(key)}];
    if (!slot) slot = std::make_unique<Reach>(m, options_.solver);
    return *slot;
  }

  std::size_t solves() const {
    std::size_t s = 0;
    for (auto& [k, r] : cache_) s += r->solves;
    return s;
  }

  struct FixedExit {
    std::size_t cube;
    std::uint32_t local;
  };

  /// Exact over paths that visit the cubes in trail order. With d >= 5 this
  /// is exact over all paths; with smaller d it may miss some.
  SequencePath solve(const CubeSequence& seq, std::uint32_t u, std::uint32_t v,
                     std::optional<FixedExit> fixed = std::nullopt) {
    const int d = seq.d;
    const std::size_t m = seq.trail.size();
    const std::uint32_t low = (std::uint32_t{1} << d) - 1;
    const std::uint32_t size = low + 1;
    if (m == 0 || seq.matchings.size() != m) throw InvalidArgument("malformed cube sequence");
    if ((u >> d) != seq.trail.front() || (v >> d) != seq.trail.back())
      throw InvalidArgument("path ends must lie in the first and last cube");
    if (parity_of(u) == parity_of(v)) throw InvalidArgument("path ends must have opposite global parity");
    const std::uint32_t ur = u & low, vr = v & low;

    std::vector<Reach*> cubes;
    for (const Matching& mm : seq.matchings) cubes.push_back(&reach(mm));

    // can[i][e]: from entry e of cube i the rest of the sequence can be
    // finished at v.
    std::vector<std::vector<char>> can(m, std::vector<char>(size, 0));
    auto exit_ok = [&](std::size_t i, std::uint32_t x) {
      return can[i + 1][x] && (!fixed || fixed->cube != i || fixed->local == x);
    };
    for (std::size_t i = m; i-- > 0;) {
      const Parity entry = static_cast<Parity>((static_cast<unsigned>(parity_of(ur)) + i) & 1);
      for (std::uint32_t e = 0; e < size; ++e) {
        if (i == 0 && e != ur) continue;
        if (parity_of(e) != entry) continue;
        if (i + 1 == m) {
          can[i][e] = (*cubes[i])(e, vr);
          continue;
        }
        for (std::uint32_t x = 0; x < size && !can[i][e]; ++x)
          if (exit_ok(i, x) && (*cubes[i])(e, x)) can[i][e] = 1;
      }
    }

    SequencePath out;
    if (!can[0][ur]) {
      out.blocking = blocking_sequence(seq, ur, vr);
      return out;
    }
    std::vector<std::uint32_t> path;
    auto append = [&](std::size_t i, const std::vector<std::uint32_t>& local) {
      for (std::uint32_t r : local) path.push_back((seq.trail[i] << d) | r);
    };
    std::uint32_t e = ur;
    for (std::size_t i = 0; i + 1 < m; ++i) {
      std::optional<std::uint32_t> pick;
      std::size_t choices = 0;
      for (std::uint32_t x = 0; x < size; ++x) {
        if (!exit_ok(i, x) || !(*cubes[i])(e, x)) continue;
        ++choices;
        if (!pick) pick = x;
      }
      out.junction_choices.push_back(choices);
      append(i, cubes[i]->path(e, *pick));
      e = *pick;
    }
    append(m - 1, cubes[m - 1]->path(e, vr));
    out.path = PathCertificate{seq.n, std::move(path)};
    return out;
  }

  static std::optional<HalfLayerSequence> blocking_sequence(const CubeSequence& seq, std::uint32_t ur,
                                                            std::uint32_t vr) {
    for (int dir = 1; dir <= seq.d; ++dir) {
      for (Parity g : {Parity::even, Parity::odd}) {
        HalfLayerSequence h{dir, g, {}};
        bool all = true;
        for (std::size_t i = 0; i < seq.trail.size() && all; ++i) {
          const Parity local = parity_of(seq.trail[i]) == Parity::even ? g : opposite(g);
          all = contains_half_layer(seq.matchings[i], dir, local);
          h.local_parities.push_back(local);
        }
        if (!all) continue;
        const HalfLayerDesc first{dir, h.local_parities.front(), std::nullopt};
        const HalfLayerDesc last{dir, h.local_parities.back(), std::nullopt};
        if (first.covers(ur) && last.covers(vr)) return h;
      }
    }
    return std::nullopt;
  }

 private:
  ConstructOptions options_;
  std::map<std::pair<int, std::vector<Edge>>, std::unique_ptr<Reach>> cache_;
};

inline void check_sequence(const CubeSequence& seq) {
  if (seq.d < 1 || seq.n < seq.d || seq.n > kMaxDim) throw InvalidArgument("bad sequence dimensions");
  if (seq.trail.size() < 2) throw InvalidArgument("a cube sequence needs at least two cubes");
  if (seq.matchings.size() != seq.trail.size()) throw InvalidArgument("one matching per cube is required");
  for (std::size_t i = 0; i < seq.trail.size(); ++i) {
    if (seq.trail[i] >> (seq.n - seq.d)) throw InvalidArgument("cube index out of range");
    if (seq.matchings[i].dim() != seq.d) throw InvalidArgument("cube matching has the wrong dimension");
    if (i > 0 && !std::has_single_bit(seq.trail[i] ^ seq.trail[i - 1]))
      throw InvalidArgument("consecutive cubes are not adjacent");
  }
}

}  // namespace detail

/// Hamilton path of the cube sequence from u (first cube) to v (last cube)
/// extending every cube matching. Without one, `blocking` names a half-layer
/// sequence covering u and v whenever such a sequence exists.
inline SequencePath sequence_path(const CubeSequence& seq, const Vertex& u, const Vertex& v,
                                  const ConstructOptions& options = {}) {
  detail::check_sequence(seq);
  if (u.dim != seq.n || v.dim != seq.n) throw InvalidArgument("dimension mismatch");
  if (seq.d > options.solver_cap) throw Unsupported("cube dimension above the solver cap");
  detail::SequenceSolver solver(options);
  SequencePath out = solver.solve(seq, u.bits, v.bits);
  if (!out.path && !out.blocking && seq.d >= 5)
    throw CounterexampleArtifact("no sequence path and no blocking half-layer sequence");
  return out;
}

// ---------------------------------------------------------------------------
// Attaching a cube to a path.

namespace detail {

/// Splices cube 2 into the first free edge of one of `paths` that admits a
/// path in cube 2. Cube 1 is the copy with bit d clear.
inline std::optional<PathCertificate> splice_second_cube(std::span<const PathCertificate> paths, const Matching& m1,
                                                         Reach& cube2) {
  const int d = m1.dim();
  const std::uint32_t up = std::uint32_t{1} << d;
  for (const PathCertificate& z : paths) {
    for (std::size_t k = 1; k < z.vertices.size(); ++k) {
      const std::uint32_t a = z.vertices[k - 1], b = z.vertices[k];
      if (m1.contains_pair(a, b) || !cube2(a, b)) continue;
      PathCertificate out{d + 1, {z.vertices.begin(), z.vertices.begin() + static_cast<std::ptrdiff_t>(k)}};
      for (std::uint32_t r : cube2.path(a, b)) out.vertices.push_back(r | up);
      out.vertices.insert(out.vertices.end(), z.vertices.begin() + static_cast<std::ptrdiff_t>(k), z.vertices.end());
      return out;
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Two distinct Hamilton paths Z1, Z2 of cube 1 (bit d clear) with a common
/// start give a Hamilton path of both cubes from that start to the end of Z1
/// or of Z2, by replacing a free edge ab with a -> a' ... b' -> b.
inline PathCertificate attach_cube(const PathCertificate& z1, const PathCertificate& z2, const Matching& m1,
                                   const Matching& m2, const ConstructOptions& options = {}) {
  const int d = m1.dim();
  if (m2.dim() != d || z1.dim != d || z2.dim != d) throw InvalidArgument("dimension mismatch");
  if (d > options.solver_cap) throw Unsupported("cube dimension above the solver cap");
  if (z1.vertices.empty() || z2.vertices.empty() || z1.front() != z2.front())
    throw InvalidArgument("paths must share their start vertex");
  if (path_edges(z1.vertices) == path_edges(z2.vertices)) throw InvalidArgument("paths must be distinct");
  detail::Reach cube2(m2, options.solver);
  const PathCertificate both[] = {z1, z2};
  if (auto out = detail::splice_second_cube(both, m1, cube2)) return *out;
  throw CounterexampleArtifact("no free edge of either path admits a path in the attached cube");
}

// ---------------------------------------------------------------------------
// Disjoint paths for pairs blocked by C1 or C2 inside one cube.

struct DisjointPaths {
  PathCertificate from_u;  // u ... z_u
  PathCertificate from_v;  // v ... z_v
  int condition = 1;       // 1 or 2
};

namespace detail {

// Q_d with coordinate `bit` deleted, as Q_{d-1}.
inline std::uint32_t squeeze(std::uint32_t w, std::uint32_t bit) {
  return (w & (bit - 1)) | ((w >> 1) & ~(bit - 1));
}
inline std::uint32_t unsqueeze(std::uint32_t r, std::uint32_t bit, std::uint32_t side) {
  return (r & (bit - 1)) | ((r & ~(bit - 1)) << 1) | side;
}

}  // namespace detail

/// Vertex-disjoint paths from u and from v covering Q_d and extending the
/// unique extension of M, ending at non-adjacent z_u, z_v of opposite
/// parity. Requires C1 or C2 for (M, u, v) and uv not in M.
inline DisjointPaths disjoint_paths(int d, const Matching& m, const Vertex& u, const Vertex& v,
                                    const ConstructOptions& options = {}) {
  if (d < 5 || m.dim() != d || u.dim != d || v.dim != d) throw InvalidArgument("disjoint paths need d >= 5");
  if (d > options.solver_cap) throw Unsupported("cube dimension above the solver cap");
  const auto report = c_condition_report(m, u, v);
  if (report.c3) throw InvalidArgument("uv is a matching edge");
  if (!report.c1 && !report.c2) throw InvalidArgument("neither C1 nor C2 holds");
  const Matching full = unique_extension(m);
  DisjointPaths out;

  if (report.c1) {
    out.condition = 1;
    const int i = report.c1->dir;
    std::uint32_t bit = 0;
    for (int k = 1; k <= d && !bit; ++k)
      if (k != i && ((u.bits ^ v.bits) & bit_of(k))) bit = bit_of(k);
    const int kdir = std::countr_zero(bit) + 1;
    auto half = [&](std::uint32_t side) {
      Matching local(d - 1);
      for (const Edge& e : full.edges())
        if ((e.base & bit) == side) local.insert(Edge{detail::squeeze(e.base, bit), e.dir > kdir ? e.dir - 1 : e.dir});
      return local;
    };
    const std::uint32_t us = u.bits & bit, vs = v.bits & bit;
    const Matching mu = half(us), mv = half(vs);

    auto cycle_u = hamilton_cycle(d - 1, mu, options.solver);
    if (!cycle_u) throw CounterexampleArtifact("no Hamilton cycle through a perfect matching of a half cube");
    auto& cu = cycle_u->vertices;
    const std::uint32_t ul = detail::squeeze(u.bits, bit);
    std::rotate(cu.begin(), std::find(cu.begin(), cu.end(), ul), cu.end());
    // Drop the cycle edge at u that is not forced.
    if (mu.contains_pair(ul, cu.back())) std::reverse(cu.begin() + 1, cu.end());
    out.from_u.dim = d;
    for (std::uint32_t r : cu) out.from_u.vertices.push_back(detail::unsqueeze(r, bit, us));
    const std::uint32_t zu_across = out.from_u.back() ^ bit;

    const std::uint32_t vl = detail::squeeze(v.bits, bit);
    for (int k = 1; k <= d - 1; ++k) {
      const std::uint32_t zl = vl ^ bit_of(k);
      if (mv.contains_pair(vl, zl) || detail::unsqueeze(zl, bit, vs) == zu_across) continue;
      std::vector<Edge> forced(mv.edges().begin(), mv.edges().end());
      forced.push_back(Edge::between(vl, zl));
      auto cycle_v = hamilton_cycle_forced(d - 1, forced, options.solver);
      if (!cycle_v) continue;
      auto& cv = cycle_v->vertices;
      std::rotate(cv.begin(), std::find(cv.begin(), cv.end(), vl), cv.end());
      if (cv[1] == zl) std::reverse(cv.begin() + 1, cv.end());
      out.from_v.dim = d;
      for (std::uint32_t r : cv) out.from_v.vertices.push_back(detail::unsqueeze(r, bit, vs));
      return out;
    }
    throw CounterexampleArtifact("no admissible end for the path from v");
  }

  out.condition = 2;
  const int i = report.c2->i, j = report.c2->j;
  // The pinned edge at the vertex that the almost half-layer avoids.
  const std::uint32_t a = u.bits, aj = a ^ bit_of(j);
  Matching rest = full;
  rest.erase(Edge::between(a, aj));
  const std::uint32_t removed[] = {a, aj};
  for (int k = 1; k <= d; ++k) {
    if (k == i || k == j) continue;
    const std::uint32_t zv = v.bits ^ bit_of(k);
    auto p = hamilton_path(d, rest, v, Vertex(d, zv), removed, options.solver);
    if (!p) continue;
    if (p->front() != v.bits) std::reverse(p->vertices.begin(), p->vertices.end());
    out.from_u = PathCertificate{d, {a, aj}};
    out.from_v = std::move(*p);
    return out;
  }
  throw CounterexampleArtifact("no Hamilton path of Q_d - {u, u^j} from v to a neighbor");
}

// ---------------------------------------------------------------------------
// Extension to a Hamilton cycle.

namespace detail {

struct Normalized {
  Relabeling relabel;
  Matching m;
};

inline Normalized normalize(int n, int d, const Matching& m, const ConstructOptions& options, int min_d) {
  check_dim(n);
  if (m.dim() != n) throw InvalidArgument("matching dimension differs from n");
  if (d < min_d || d > n) throw InvalidArgument("need " + std::to_string(min_d) + " <= d <= n");
  if (d > options.solver_cap)
    throw Unsupported("d = " + std::to_string(d) + " exceeds the solver cap " + std::to_string(options.solver_cap));
  if (std::popcount(m.spanned_mask()) > d) throw InvalidArgument("matching spans more than d directions");
  Relabeling r = Relabeling::low_directions(n, m.spanned_mask(), d);
  return {r, r.forward(m)};
}

inline void require_full_search(int n, const ConstructOptions& options, const char* why) {
  if (n > options.full_cap)
    throw Unsupported(std::string("unsupported: full-cube fallback (") + why + ") needs n <= " +
                      std::to_string(options.full_cap));
}

}  // namespace detail

inline CycleCertificate extend_to_cycle(int n, int d, const Matching& m, const ConstructOptions& options = {},
                                        ConstructTrace* trace = nullptr) {
  auto [relabel, mr] = detail::normalize(n, d, m, options, 2);
  ConstructTrace local;
  ConstructTrace& t = trace ? *trace : local;
  t = {};

  CycleCertificate out{n, {}};
  if (n == d || mr.is_perfect()) {
    if (n != d) {
      detail::require_full_search(n, options, "perfect matching");
      t.full_fallback = true;
    }
    t.branch = n == d ? "single cube" : "perfect matching";
    t.subcube_solves = 1;
    auto c = hamilton_cycle(n, m, options.solver);
    if (!c) throw CounterexampleArtifact("no Hamilton cycle through the matching");
    out = *c;
  } else {
    t.branch = "cube cycle";
    const std::uint32_t low = (std::uint32_t{1} << d) - 1;
    const std::uint32_t first = mr.uncovered().front();
    std::vector<std::uint32_t> order = gray_sequence(n - d);
    std::rotate(order.begin(), std::find(order.begin(), order.end(), first >> d), order.end());
    const std::size_t k = order.size();

    // Cubes 2..k: enter next to the previous exit, leave along the cube's
    // Hamilton cycle through the non-matching neighbor of the entry.
    std::vector<std::uint32_t> rest;
    std::uint32_t exit = first;
    std::map<std::vector<Edge>, CycleCertificate> cycles;
    for (std::size_t i = 1; i < k; ++i) {
      const Matching mi = restrict_to_subcube(mr, d, order[i]);
      const std::vector<Edge> key(mi.edges().begin(), mi.edges().end());
      auto it = cycles.find(key);
      if (it == cycles.end()) {
        auto c = hamilton_cycle(d, mi, options.solver);
        if (!c) throw CounterexampleArtifact("cube matching does not extend to a Hamilton cycle");
        it = cycles.emplace(key, *c).first;
      }
      ++t.subcube_solves;
      std::vector<std::uint32_t> cyc = it->second.vertices;
      const std::uint32_t entry = exit & low;
      std::rotate(cyc.begin(), std::find(cyc.begin(), cyc.end(), entry), cyc.end());
      const std::uint32_t next = cyc[1], prev = cyc.back();
      std::uint32_t leave;
      if (mi.contains_pair(entry, next))
        leave = prev;
      else if (mi.contains_pair(entry, prev))
        leave = next;
      else
        leave = std::min(next, prev);
      if (leave == next) std::reverse(cyc.begin() + 1, cyc.end());
      for (std::uint32_t r : cyc) rest.push_back((order[i] << d) | r);
      exit = rest.back();
    }
    // Close in the first cube with a path from the last exit's neighbor to
    // the uncovered vertex.
    const Matching m1 = restrict_to_subcube(mr, d, order[0]);
    ++t.subcube_solves;
    auto z1 = hamilton_path(d, m1, Vertex(d, exit & low), Vertex(d, first & low), {}, options.solver);
    if (!z1) throw CounterexampleArtifact("no Hamilton path from the uncovered vertex of the first cube");
    if (z1->front() != (exit & low)) std::reverse(z1->vertices.begin(), z1->vertices.end());
    for (std::uint32_t r : z1->vertices) out.vertices.push_back((order[0] << d) | r);
    out.vertices.insert(out.vertices.end(), rest.begin(), rest.end());
    for (auto& w : out.vertices) w = relabel.backward(w);
  }
  if (auto ok = validate_cycle(out, m); !ok) throw Error("internal: constructed cycle is invalid: " + ok.message);
  return out;
}

// ---------------------------------------------------------------------------
// Extension to a Hamilton path.

namespace detail {

class PathBuilder {
 public:
  PathBuilder(int n, int d, const Matching& mr, const ConstructOptions& options, ConstructTrace& trace)
      : n_(n), d_(d), low_((std::uint32_t{1} << d) - 1), m_(mr), options_(options), trace_(trace), seq_(options) {}

  std::vector<std::uint32_t> run(std::uint32_t u, std::uint32_t v) {
    const std::uint32_t ul = u >> d_, vl = v >> d_;
    if (ul != vl) return parity_of(ul) != parity_of(vl) ? different_cubes(u, v) : skipping_one_cube(u, v);
    return n_ > d_ + 1 ? same_cube_ring(u, v) : same_cube_pair(u, v);
  }

  std::size_t solves() const { return seq_.solves(); }

 private:
  CubeSequence sequence(std::span<const std::uint32_t> trail) const { return induced_sequence(m_, d_, trail); }

  std::vector<std::uint32_t> global(std::uint32_t cube, std::span<const std::uint32_t> local) const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t r : local) out.push_back((cube << d_) | r);
    return out;
  }

  std::vector<std::uint32_t> full_search(std::uint32_t u, std::uint32_t v, const char* why) {
    require_full_search(n_, options_, why);
    trace_.full_fallback = true;
    ++trace_.subcube_solves;
    auto p = hamilton_path(n_, m_, Vertex(n_, u), Vertex(n_, v), {}, options_.solver);
    if (!p) throw CounterexampleArtifact(std::string("no Hamilton path found by full search (") + why + ")");
    if (p->front() != u) std::reverse(p->vertices.begin(), p->vertices.end());
    return p->vertices;
  }

  std::vector<std::uint32_t> different_cubes(std::uint32_t u, std::uint32_t v) {
    trace_.branch = "different cubes";
    const int l = n_ - d_;
    const auto trail = gray_path(l, Vertex(l, u >> d_), Vertex(l, v >> d_)).vertices;
    auto r = seq_.solve(sequence(trail), u, v);
    if (!r.path) throw CounterexampleArtifact("cube sequence blocked although no C-condition holds");
    return r.path->vertices;
  }

  // Ends in distinct cubes of equal parity: skip one cube z on the way,
  // then splice it into a free edge of the path inside a neighbor of z.
  std::vector<std::uint32_t> skipping_one_cube(std::uint32_t u, std::uint32_t v) {
    trace_.branch = "skip one cube";
    const int l = n_ - d_;
    const std::uint32_t ul = u >> d_, vl = v >> d_;
    for (std::uint32_t z = 0; z < (std::uint32_t{1} << l); ++z) {
      if (parity_of(z) == parity_of(ul)) continue;
      const auto trail = gray_path_avoiding(l, Vertex(l, ul), Vertex(l, vl), Vertex(l, z)).vertices;
      const CubeSequence seq = sequence(trail);
      auto base = seq_.solve(seq, u, v);
      if (!base.path) continue;
      Reach& cube_z = seq_.reach(restrict_to_subcube(m_, d_, z));
      for (int i = 0; i < l; ++i) {
        const std::uint32_t zn = z ^ (std::uint32_t{1} << i);
        const std::size_t j = static_cast<std::size_t>(std::find(trail.begin(), trail.end(), zn) - trail.begin());
        if (auto p = splice(base.path->vertices, z, zn, cube_z)) return *p;
        // Other paths through the same entry (or into the same end) of the
        // neighbor cube: vary the crossing at the adjacent junction.
        const std::size_t junction = j + 1 < trail.size() ? j : j - 1;
        for (std::uint32_t x = 0; x <= low_; ++x) {
          auto alt = seq_.solve(seq, u, v, SequenceSolver::FixedExit{junction, x});
          if (!alt.path) continue;
          if (auto p = splice(alt.path->vertices, z, zn, cube_z)) return *p;
        }
      }
    }
    throw CounterexampleArtifact("no skipped cube could be attached");
  }

  std::optional<std::vector<std::uint32_t>> splice(const std::vector<std::uint32_t>& path, std::uint32_t z,
                                                   std::uint32_t zn, Reach& cube_z) {
    for (std::size_t k = 1; k < path.size(); ++k) {
      const std::uint32_t a = path[k - 1], b = path[k];
      if ((a >> d_) != zn || (b >> d_) != zn || m_.contains_pair(a, b)) continue;
      if (!cube_z(a & low_, b & low_)) continue;
      std::vector<std::uint32_t> out(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(k));
      const auto inner = global(z, cube_z.path(a & low_, b & low_));
      out.insert(out.end(), inner.begin(), inner.end());
      out.insert(out.end(), path.begin() + static_cast<std::ptrdiff_t>(k), path.end());
      return out;
    }
    return std::nullopt;
  }

  // Gray cycle of Q_{n-d} starting at the cube of u and v, minus that cube.
  std::vector<std::uint32_t> ring(std::uint32_t cube) const {
    auto order = gray_sequence(n_ - d_);
    std::rotate(order.begin(), std::find(order.begin(), order.end(), cube), order.end());
    order.erase(order.begin());
    return order;
  }

  std::vector<std::uint32_t> same_cube_ring(std::uint32_t u, std::uint32_t v) {
    const std::uint32_t c = u >> d_;
    Reach& star = seq_.reach(restrict_to_subcube(m_, d_, c));
    const auto trail = ring(c);
    const CubeSequence seq = sequence(trail);
    const std::uint32_t first = trail.front(), last = trail.back();

    if (star(u & low_, v & low_)) {
      trace_.branch = "same cube, ring detour";
      const auto y = global(c, star.path(u & low_, v & low_));
      for (std::size_t k = 1; k < y.size(); ++k) {
        const std::uint32_t w = y[k - 1], z = y[k];
        if (m_.contains_pair(w, z)) continue;
        auto r = seq_.solve(seq, (first << d_) | (w & low_), (last << d_) | (z & low_));
        if (!r.path) continue;
        std::vector<std::uint32_t> out(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(k));
        out.insert(out.end(), r.path->vertices.begin(), r.path->vertices.end());
        out.insert(out.end(), y.begin() + static_cast<std::ptrdiff_t>(k), y.end());
        return out;
      }
      return full_search(u, v, "every detour blocked by layers");
    }

    trace_.branch = "same cube, split ring";
    const auto split = split_in_cube(c, u, v);
    if (!split) return full_search(u, v, "no disjoint paths");
    const auto& [zu, zv] = *split;
    std::vector<std::uint32_t> reversed(trail.rbegin(), trail.rend());
    for (const auto& t : {trail, reversed}) {
      auto r = seq_.solve(sequence(t), (t.front() << d_) | (zu.back() & low_), (t.back() << d_) | (zv.back() & low_));
      if (!r.path) continue;
      std::vector<std::uint32_t> out = zu;
      out.insert(out.end(), r.path->vertices.begin(), r.path->vertices.end());
      out.insert(out.end(), zv.rbegin(), zv.rend());
      return out;
    }
    return full_search(u, v, "ring blocked by layers of another direction");
  }

  std::vector<std::uint32_t> same_cube_pair(std::uint32_t u, std::uint32_t v) {
    const std::uint32_t c = u >> d_, other = c ^ 1u;
    const Matching mstar = restrict_to_subcube(m_, d_, c);
    Reach& dagger = seq_.reach(restrict_to_subcube(m_, d_, other));
    const std::uint32_t flip = c == 0 ? 0 : std::uint32_t{1} << d_;  // maps cube c to bit d clear

    ++trace_.subcube_solves;
    auto two = two_distinct_paths(d_, mstar, Vertex(d_, u & low_), Vertex(d_, v & low_), options_.solver);
    if (two.outcome != TwoPathOutcome::none) {
      trace_.branch = "same cube, attach neighbor";
      std::vector<PathCertificate> paths{*two.first};
      if (two.second) paths.push_back(*two.second);
      for (auto& p : paths)
        if (p.front() != (u & low_)) std::reverse(p.vertices.begin(), p.vertices.end());
      if (auto p = splice_second_cube(paths, mstar, dagger)) {
        for (auto& w : p->vertices) w ^= flip;
        return p->vertices;
      }
      return full_search(u, v, "no admitting edge");
    }

    trace_.branch = "same cube, split pair";
    const auto split = split_in_cube(c, u, v);
    if (split) {
      const auto& [zu, zv] = *split;
      const std::uint32_t a = zu.back() & low_, b = zv.back() & low_;
      if (dagger(a, b)) {
        std::vector<std::uint32_t> out = zu;
        const auto mid = global(other, dagger.path(a, b));
        out.insert(out.end(), mid.begin(), mid.end());
        out.insert(out.end(), zv.rbegin(), zv.rend());
        return out;
      }
    }
    return full_search(u, v, "neighbor cube blocked by a half-layer");
  }

  std::optional<std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>> split_in_cube(
      std::uint32_t c, std::uint32_t u, std::uint32_t v) {
    try {
      ++trace_.subcube_solves;
      auto dp = disjoint_paths(d_, restrict_to_subcube(m_, d_, c), Vertex(d_, u & low_), Vertex(d_, v & low_),
                               options_);
      return std::pair{global(c, dp.from_u.vertices), global(c, dp.from_v.vertices)};
    } catch (const InvalidArgument&) {
      return std::nullopt;
    }
  }

  int n_, d_;
  std::uint32_t low_;
  const Matching& m_;
  const ConstructOptions& options_;
  ConstructTrace& trace_;
  SequenceSolver seq_;
};

}  // namespace detail

/// Hamilton path of Q_n from u to v extending M, or none exactly when a
/// C-condition holds for (M, u, v).
inline std::optional<PathCertificate> extend_to_path(int n, int d, const Matching& m, const Vertex& u,
                                                     const Vertex& v, const ConstructOptions& options = {},
                                                     ConstructTrace* trace = nullptr) {
  auto [relabel, mr] = detail::normalize(n, d, m, options, 5);
  if (u.dim != n || v.dim != n) throw InvalidArgument("dimension mismatch");
  if (u.parity() == v.parity()) throw InvalidArgument("path ends must have opposite parity");
  ConstructTrace local;
  ConstructTrace& t = trace ? *trace : local;
  t = {};
  if (c_condition_report(m, u, v).any()) {
    t.branch = "c-condition";
    return std::nullopt;
  }

  PathCertificate out{n, {}};
  if (n == d) {
    t.branch = "single cube";
    t.subcube_solves = 1;
    auto p = hamilton_path(n, m, u, v, {}, options.solver);
    if (!p) throw CounterexampleArtifact("no Hamilton path although no C-condition holds");
    out = *p;
  } else {
    detail::PathBuilder builder(n, d, mr, options, t);
    out.vertices = builder.run(relabel.forward(u.bits), relabel.forward(v.bits));
    t.subcube_solves += builder.solves();
    for (auto& w : out.vertices) w = relabel.backward(w);
  }
  if (out.front() != u.bits) std::reverse(out.vertices.begin(), out.vertices.end());
  if (auto ok = validate_path(out, m, u.bits, v.bits); !ok)
    throw Error("internal: constructed path is invalid: " + ok.message);
  return out;
}

}  // namespace hypermatch
