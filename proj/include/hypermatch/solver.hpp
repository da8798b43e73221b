#pragma once

// Exact backtracking search for Hamilton paths and cycles of Q_n (optionally
// with vertices removed) that contain a prescribed set of forced edges.
//
// Forced edges may form any linear forest (max degree 2, no cycles); a
// matching is the common case. Entering a forced chain commits the walk to
// the whole chain. Pruning, all sound:
//   * every unvisited vertex keeps enough free-edge partners for the path
//     edges it still needs (2 minus forced degree; 1 minus for the far end);
//   * a vertex whose only remaining partners include the current end must
//     be visited next, and two such vertices is a dead end;
//   * the unvisited region stays connected to the current end;
//   * the far end's forced chain is entered only as the last stretch;
//   * crossing balance: inside one side of a direction, path edges pair even
//     with odd vertices, and each vertex leaves the side at most once (and
//     must, along a forced edge), which bounds the degree surplus of either
//     parity class. This is what refutes the half-layer obstructions.
// Free moves try the neighbor with the fewest unvisited neighbors first,
// ties in direction order, so results are deterministic.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hypermatch/certificate.hpp"
#include "hypermatch/cube.hpp"
#include "hypermatch/vertex_set.hpp"

namespace hypermatch {

struct SolverOptions {
  /// Abort with Unsupported after this many search nodes; 0 = unlimited.
  std::uint64_t max_nodes = 0;
};

inline constexpr int kMaxSolverDim = 10;

namespace detail {

template <class Set>
const CubeMasks<Set>& cube_masks(int n) {
  static const std::vector<CubeMasks<Set>> all = [] {
    std::vector<CubeMasks<Set>> v;
    for (int d = 0; d <= SetOps<Set>::kMaxDim; ++d) v.emplace_back(d);
    return v;
  }();
  return all[static_cast<std::size_t>(n)];
}

/// Forced-edge adjacency of a linear forest.
struct ForcedGraph {
  std::vector<std::uint8_t> degree;
  std::vector<std::array<std::uint32_t, 2>> nbr;

  ForcedGraph(int n, std::span<const Edge> edges) : degree(std::size_t{1} << n, 0), nbr(std::size_t{1} << n) {
    for (const Edge& e : edges) {
      const std::uint32_t a = e.base, b = e.other();
      if (e.dir < 1 || e.dir > n || (a >> n)) throw InvalidArgument("forced edge outside the cube");
      if (degree[a] == 2 || degree[b] == 2) throw InvalidArgument("forced edges have a vertex of degree 3");
      nbr[a][degree[a]++] = b;
      nbr[b][degree[b]++] = a;
    }
  }

  bool forced_pair(std::uint32_t a, std::uint32_t b) const {
    for (int k = 0; k < degree[a]; ++k)
      if (nbr[a][k] == b) return true;
    return false;
  }

  /// Vertices of the chain containing `v`, walking both ways; empty if the
  /// chain closes into a cycle.
  std::vector<std::uint32_t> chain(std::uint32_t v) const {
    std::vector<std::uint32_t> out{v};
    for (int side = 0; side < degree[v]; ++side) {
      std::uint32_t prev = v, cur = nbr[v][side];
      while (true) {
        if (cur == v) return {};
        out.push_back(cur);
        std::uint32_t next = prev;
        for (int k = 0; k < degree[cur]; ++k)
          if (nbr[cur][k] != prev) next = nbr[cur][k];
        if (next == prev) break;
        prev = cur;
        cur = next;
      }
    }
    return out;
  }
};

inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

template <class Set>
class PathSearch {
  using Ops = SetOps<Set>;

 public:
  PathSearch(int n, const ForcedGraph& forced, std::uint32_t start, std::uint32_t end,
             std::span<const std::uint32_t> removed, std::uint64_t limit, std::uint64_t salt)
      : n_(n), masks_(cube_masks<Set>(n)), forced_(forced), start_(start), end_(end), limit_(limit), salt_(salt) {
    const std::uint32_t count = std::uint32_t{1} << n;
    unvisited_ = Ops::full(count);
    for (std::uint32_t r : removed) Ops::reset(unvisited_, r);
    for (std::uint32_t v = 0; v < count; ++v)
      if (forced_.degree[v] <= 1) Ops::set(enterable_, v);
    enterable_ &= unvisited_;
    for (std::uint32_t v : forced_.chain(end_)) Ops::set(end_chain_, v);
    end_chain_len_ = Ops::count(end_chain_);
    forced_dir_.resize(static_cast<std::size_t>(n));
    for (std::uint32_t v = 0; v < count; ++v)
      for (int k = 0; k < forced_.degree[v]; ++k)
        Ops::set(forced_dir_[static_cast<std::size_t>(std::countr_zero(v ^ forced_.nbr[v][k]))], v);
  }

  std::optional<std::vector<std::uint32_t>> run() {
    if (!Ops::test(unvisited_, start_) || !Ops::test(unvisited_, end_)) return std::nullopt;
    if (start_ == end_) return std::nullopt;
    if (forced_.degree[start_] > 1 || forced_.degree[end_] > 1) return std::nullopt;
    if (!parity_feasible()) return std::nullopt;

    remaining_ = Ops::count(unvisited_) - 1;
    if (Ops::test(end_chain_, start_)) {
      // Start and end share a forced chain: it must be the whole path.
      if (end_chain_len_ != remaining_ + 1) return std::nullopt;
    }
    Ops::reset(unvisited_, start_);
    path_.reserve(static_cast<std::size_t>(remaining_) + 1);
    path_.push_back(start_);

    const Set live = unvisited_ | Ops::single(start_);
    for (std::uint32_t v = 0; v < (std::uint32_t{1} << n_); ++v)
      if (Ops::test(unvisited_, v) && free_count(v, live) < requirement(v)) return std::nullopt;
    if (remaining_ > 0 && !connected(start_)) return std::nullopt;
    if (remaining_ > 0 && !crossing_balanced(start_)) return std::nullopt;
    if (dfs(start_)) return path_;
    return std::nullopt;
  }

  std::uint64_t nodes() const { return nodes_; }
  /// The node limit cut the search short; a missing path proves nothing.
  bool aborted() const { return aborted_; }

 private:
  bool parity_feasible() const {
    int even = 0, odd = 0;
    for (std::uint32_t v = 0; v < (std::uint32_t{1} << n_); ++v)
      if (Ops::test(unvisited_, v)) (parity_of(v) == Parity::even ? even : odd)++;
    const Parity ps = parity_of(start_), pe = parity_of(end_);
    if (even == odd) return ps != pe;
    if (even == odd + 1) return ps == Parity::even && pe == Parity::even;
    if (odd == even + 1) return ps == Parity::odd && pe == Parity::odd;
    return false;
  }

  int requirement(std::uint32_t v) const {
    const int base = v == end_ ? 1 : 2;
    return base - forced_.degree[v];
  }

  /// Free-edge partners of `v` inside `live`.
  int free_count(std::uint32_t v, const Set& live) const {
    const Set cand = masks_.adjacency[v] & live & enterable_;
    int c = Ops::count(cand);
    for (int k = 0; k < forced_.degree[v]; ++k)
      if (Ops::test(cand, forced_.nbr[v][k])) --c;
    return c;
  }

  bool connected(std::uint32_t from) const {
    const Set reach = masks_.flood(Ops::single(from), unvisited_);
    return Ops::none(unvisited_ & ~reach);
  }

  // The remaining path runs from cur to end_ through every live vertex.
  bool crossing_balanced(std::uint32_t cur) const {
    const Set live = unvisited_ | Ops::single(cur);
    for (int i = 0; i < n_; ++i) {
      const Set partner = masks_.across(live, i);
      const Set forced = forced_dir_[static_cast<std::size_t>(i)] & partner;
      const Set low = masks_.low[static_cast<std::size_t>(i)];
      for (const Set& half : {live & low, live & ~low}) {
        const Set b = half & masks_.even, a = half & ~masks_.even;
        int surplus = 2 * (Ops::count(b) - Ops::count(a));
        for (std::uint32_t e : {cur, end_}) {
          if (Ops::test(b, e)) --surplus;
          if (Ops::test(a, e)) ++surplus;
        }
        // surplus = crossings from the even class minus those from the odd.
        if (surplus > Ops::count(b & partner) - Ops::count(a & forced)) return false;
        if (surplus < Ops::count(b & forced) - Ops::count(a & partner)) return false;
      }
    }
    return true;
  }

  bool may_enter(std::uint32_t y) const {
    if (Ops::test(end_chain_, y)) return Ops::none(unvisited_ & ~end_chain_);
    return true;
  }

  std::optional<std::uint32_t> pending_forced(std::uint32_t cur) const {
    for (int k = 0; k < forced_.degree[cur]; ++k)
      if (Ops::test(unvisited_, forced_.nbr[cur][k])) return forced_.nbr[cur][k];
    return std::nullopt;
  }

  bool step(std::uint32_t cur, std::uint32_t y) {
    if (!may_enter(y)) return false;
    Ops::reset(unvisited_, y);
    --remaining_;
    path_.push_back(y);
    bool ok = true;
    if (remaining_ > 0) {
      const Set live = unvisited_ | Ops::single(y);
      for (int i = 0; i < n_ && ok; ++i) {
        const std::uint32_t x = cur ^ (1u << i);
        if (Ops::test(unvisited_, x) && free_count(x, live) < requirement(x)) ok = false;
      }
      if (ok) ok = connected(y);
      if (ok) ok = crossing_balanced(y);
    }
    if (ok && dfs(y)) return true;
    path_.pop_back();
    ++remaining_;
    Ops::set(unvisited_, y);
    return false;
  }

  bool dfs(std::uint32_t cur) {
    if (remaining_ == 0) return cur == end_;
    if (++nodes_ > limit_) aborted_ = true;
    if (aborted_) return false;
    if (auto f = pending_forced(cur)) return step(cur, *f);

    // Free move. A neighbor that needs cur to meet its edge quota must be next.
    const Set live = unvisited_ | Ops::single(cur);
    std::optional<std::uint32_t> must;
    for (int i = 0; i < n_; ++i) {
      const std::uint32_t x = cur ^ (1u << i);
      if (!Ops::test(unvisited_, x) || !Ops::test(enterable_, x)) continue;
      const int req = requirement(x);
      if (req > 0 && free_count(x, live) == req) {
        if (must) return false;
        must = x;
      }
    }
    if (must) return step(cur, *must);
    // Fewest onward options first; ties keep direction order.
    std::array<std::pair<int, std::uint32_t>, 10> cand;
    int count = 0;
    for (int i = 0; i < n_; ++i) {
      const std::uint32_t y = cur ^ (1u << i);
      if (!Ops::test(unvisited_, y) || !Ops::test(enterable_, y)) continue;
      cand[count++] = {Ops::count(masks_.adjacency[y] & unvisited_), y};
    }
    auto tie = [this](std::uint32_t y) { return salt_ ? mix(salt_ ^ y) : y; };
    std::sort(cand.begin(), cand.begin() + count, [&](const auto& a, const auto& b) {
      return a.first != b.first ? a.first < b.first : tie(a.second) < tie(b.second);
    });
    for (int k = 0; k < count && !aborted_; ++k)
      if (step(cur, cand[k].second)) return true;
    return false;
  }

  int n_;
  const CubeMasks<Set>& masks_;
  const ForcedGraph& forced_;
  std::uint32_t start_, end_;
  std::uint64_t limit_, salt_;
  bool aborted_ = false;
  Set unvisited_{};
  Set enterable_{};
  Set end_chain_{};
  std::vector<Set> forced_dir_;  // vertices with a forced edge in each direction
  int end_chain_len_ = 0;
  int remaining_ = 0;
  std::vector<std::uint32_t> path_;
  std::uint64_t nodes_ = 0;
};

inline void check_solver_dim(int n) {
  if (n < 1 || n > kMaxSolverDim) throw Unsupported("exact search supports 1 <= n <= " + std::to_string(kMaxSolverDim));
}

// Restarts with doubling node limits and a different tie order each time.
// Some orders hit long dead subtrees that another avoids; the limit keeps
// growing, so a run that completes without aborting is exhaustive.
template <class Set>
std::optional<std::vector<std::uint32_t>> restarted_search(int n, const ForcedGraph& forced, std::uint32_t u,
                                                            std::uint32_t v, std::span<const std::uint32_t> removed,
                                                            const SolverOptions& options) {
  constexpr std::uint64_t kFirstLimit = 1 << 12;
  std::uint64_t spent = 0;
  for (std::uint64_t attempt = 0;; ++attempt) {
    std::uint64_t limit = attempt < 40 ? kFirstLimit << attempt : ~std::uint64_t{0};
    if (options.max_nodes) limit = std::min(limit, options.max_nodes - spent);
    PathSearch<Set> search(n, forced, u, v, removed, limit, attempt ? mix(attempt) : 0);
    auto path = search.run();
    if (!search.aborted()) return path;
    spent += limit;
    if (options.max_nodes && spent >= options.max_nodes) throw Unsupported("solver node budget exhausted");
  }
}

inline std::optional<std::vector<std::uint32_t>> search_path(int n, const ForcedGraph& forced, std::uint32_t u,
                                                              std::uint32_t v, std::span<const std::uint32_t> removed,
                                                              const SolverOptions& options) {
  check_solver_dim(n);
  if (n <= 6) return restarted_search<std::uint64_t>(n, forced, u, v, removed, options);
  if (n <= 8) return restarted_search<std::bitset<256>>(n, forced, u, v, removed, options);
  return restarted_search<std::bitset<1024>>(n, forced, u, v, removed, options);
}

inline void check_removed(int n, const ForcedGraph& forced, std::span<const std::uint32_t> removed) {
  for (std::uint32_t r : removed) {
    if (r >> n) throw InvalidArgument("removed vertex outside the cube");
    if (forced.degree[r]) throw InvalidArgument("forced edge touches a removed vertex");
  }
}

}  // namespace detail

/// Hamilton path of Q_n minus `removed` from u to v using every forced edge.
/// `forced` may be any linear forest; an empty optional means none exists.
inline std::optional<PathCertificate> hamilton_path_forced(int n, std::span<const Edge> forced, std::uint32_t u,
                                                           std::uint32_t v, std::span<const std::uint32_t> removed = {},
                                                           const SolverOptions& options = {}) {
  detail::check_solver_dim(n);
  if ((u >> n) || (v >> n)) throw InvalidArgument("endpoint outside the cube");
  if (u == v) throw InvalidArgument("endpoints must differ");
  detail::ForcedGraph graph(n, forced);
  detail::check_removed(n, graph, removed);
  for (std::uint32_t r : removed)
    if (r == u || r == v) throw InvalidArgument("endpoint is removed");
  for (const Edge& e : forced)
    if (graph.chain(e.base).empty()) throw InvalidArgument("forced edges contain a cycle");
  auto path = detail::search_path(n, graph, u, v, removed, options);
  if (!path) return std::nullopt;
  return PathCertificate{n, std::move(*path)};
}

inline std::optional<PathCertificate> hamilton_path(int n, const Matching& forced, const Vertex& u, const Vertex& v,
                                                    std::span<const std::uint32_t> removed = {},
                                                    const SolverOptions& options = {}) {
  if (forced.dim() != n || u.dim != n || v.dim != n) throw InvalidArgument("dimension mismatch");
  return hamilton_path_forced(n, forced.edges(), u.bits, v.bits, removed, options);
}

/// Hamilton cycle of Q_n using every forced edge (a linear forest).
inline std::optional<CycleCertificate> hamilton_cycle_forced(int n, std::span<const Edge> forced,
                                                             const SolverOptions& options = {}) {
  if (n < 2) throw InvalidArgument("Hamilton cycles need n >= 2");
  detail::check_solver_dim(n);
  detail::ForcedGraph graph(n, forced);
  for (const Edge& e : forced)
    if (graph.chain(e.base).empty()) throw InvalidArgument("forced edges contain a cycle");
  std::uint32_t s = 0;
  while (graph.degree[s] > 1) ++s;  // a chain end always exists
  for (int i = 1; i <= n; ++i) {
    const std::uint32_t b = s ^ bit_of(i);
    if (graph.degree[b] > 1 || graph.forced_pair(s, b)) continue;
    if (auto path = detail::search_path(n, graph, s, b, {}, options)) return CycleCertificate{n, std::move(*path)};
  }
  return std::nullopt;
}

inline std::optional<CycleCertificate> hamilton_cycle(int n, const Matching& forced, const SolverOptions& options = {}) {
  if (forced.dim() != n) throw InvalidArgument("dimension mismatch");
  return hamilton_cycle_forced(n, forced.edges(), options);
}

enum class TwoPathOutcome { none, only_one, two };

struct TwoPaths {
  TwoPathOutcome outcome = TwoPathOutcome::none;
  std::optional<PathCertificate> first;
  std::optional<PathCertificate> second;
};

/// Two u-v Hamilton paths with different edge sets. After the first path Z1
/// is found, each cube edge outside Z1 and the forced set is forced in turn;
/// any path containing it differs from Z1, and every second path contains
/// such an edge, so the search is exhaustive.
inline TwoPaths two_distinct_paths(int n, const Matching& forced, const Vertex& u, const Vertex& v,
                                   const SolverOptions& options = {}) {
  TwoPaths out;
  out.first = hamilton_path(n, forced, u, v, {}, options);
  if (!out.first) return out;
  out.outcome = TwoPathOutcome::only_one;

  std::vector<std::uint8_t> degree(std::size_t{1} << n, 0);
  for (const Edge& e : forced.edges()) degree[e.base]++, degree[e.other()]++;
  const std::vector<Edge> used = path_edges(out.first->vertices);

  std::vector<Edge> trial(forced.edges().begin(), forced.edges().end());
  for (std::uint32_t w = 0; w < (std::uint32_t{1} << n); ++w) {
    for (int i = 1; i <= n; ++i) {
      if (w & bit_of(i)) continue;
      const Edge e{w, i};
      if (std::binary_search(used.begin(), used.end(), e)) continue;
      const std::uint32_t a = e.base, b = e.other();
      // forced ∪ {e} must still fit in a u-v Hamilton path.
      const int cap_a = (a == u.bits || a == v.bits) ? 1 : 2;
      const int cap_b = (b == u.bits || b == v.bits) ? 1 : 2;
      if (degree[a] >= cap_a || degree[b] >= cap_b) continue;
      if ((a == u.bits && b == v.bits) || (a == v.bits && b == u.bits)) continue;
      trial.push_back(e);
      detail::ForcedGraph graph(n, trial);
      if (!graph.chain(a).empty()) {
        if (auto path = detail::search_path(n, graph, u.bits, v.bits, {}, options)) {
          out.second = PathCertificate{n, std::move(*path)};
          out.outcome = TwoPathOutcome::two;
          return out;
        }
      }
      trial.pop_back();
    }
  }
  return out;
}

/// T^M_u: opposite-parity vertices reachable from u by a Hamilton path
/// extending M, in increasing order.
inline std::vector<std::uint32_t> endpoint_set(int n, const Matching& m, const Vertex& u,
                                               const SolverOptions& options = {}) {
  if (m.dim() != n || u.dim != n) throw InvalidArgument("dimension mismatch");
  std::vector<std::uint32_t> out;
  detail::ForcedGraph graph(n, m.edges());
  for (std::uint32_t v = 0; v < (std::uint32_t{1} << n); ++v) {
    if (parity_of(v) == u.parity()) continue;
    if (detail::search_path(n, graph, u.bits, v, {}, options)) out.push_back(v);
  }
  return out;
}

}  // namespace hypermatch
