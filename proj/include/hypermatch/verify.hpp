#pragma once

// Exhaustive verification campaigns over maximal matchings of Q_d, and the
// non-extendable matching of B(Q_n) with its parity-count certificate.
//
// A campaign is split into units (one per uncovered-vertex class, or one per
// one-edge-away instance). Units run on a small thread pool and their
// results are reduced in unit order, so reports do not depend on the number
// of threads. Completed units can be fed back in to resume a run.

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "hypermatch/canon.hpp"
#include "hypermatch/cube.hpp"
#include "hypermatch/enumerate.hpp"
#include "hypermatch/layers.hpp"
#include "hypermatch/solver.hpp"

namespace hypermatch {

enum class CampaignKind { cycle_conjecture, path_conjecture, one_edge_away, necessity, bqn };

inline const char* to_string(CampaignKind k) {
  switch (k) {
    case CampaignKind::cycle_conjecture: return "cycle_conjecture";
    case CampaignKind::path_conjecture: return "path_conjecture";
    case CampaignKind::one_edge_away: return "one_edge_away";
    case CampaignKind::necessity: return "necessity";
    case CampaignKind::bqn: return "bqn";
  }
  return "?";
}

struct Failure {
  Matching matching;
  std::uint32_t u = 0;
  std::uint32_t v = 0;
  std::string reason;
};

/// Result of one campaign unit.
struct UnitResult {
  std::string key;  // hex key of the unit (uncovered class or instance)
  std::uint64_t matchings = 0;
  std::uint64_t pairs = 0;
  std::uint64_t skipped = 0;
  std::map<std::string, std::uint64_t> tallies;
  std::vector<Failure> failures;
};

struct CampaignReport {
  CampaignKind kind = CampaignKind::cycle_conjecture;
  int dim = 0;
  std::uint64_t classes_total = 0;
  std::uint64_t classes_done = 0;
  std::uint64_t matchings_checked = 0;
  std::uint64_t pairs_checked = 0;
  std::uint64_t pairs_skipped = 0;  // pairs under a C-condition
  std::map<std::string, std::uint64_t> tallies;
  std::vector<Failure> failures;
  double wall_seconds = 0;

  bool confirmed() const { return failures.empty(); }
};

struct CampaignOptions {
  unsigned threads = 1;
  SolverOptions solver;
  /// Results of units finished in an earlier run, by unit key.
  std::map<std::string, UnitResult> completed;
  /// Called (serialized) as each newly computed unit finishes.
  std::function<void(const UnitResult&)> on_unit_done;
  /// Necessity campaign: at most this many pairs per unit (0 = all).
  std::uint64_t pair_budget = 0;
  /// Largest dimension a campaign accepts.
  int max_dim = 5;
};

namespace detail {

struct Unit {
  std::string key;
  std::function<UnitResult()> run;
};

inline CampaignReport run_units(CampaignKind kind, int dim, const std::vector<Unit>& units,
                                const CampaignOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<UnitResult> results(units.size());
  std::vector<char> have(units.size(), 0);
  for (std::size_t k = 0; k < units.size(); ++k) {
    if (auto it = options.completed.find(units[k].key); it != options.completed.end()) {
      results[k] = it->second;
      have[k] = 1;
    }
  }
  std::atomic<std::size_t> next{0};
  std::mutex done_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= units.size()) return;
      if (have[k]) continue;
      try {
        UnitResult r = units[k].run();
        r.key = units[k].key;
        std::lock_guard lock(done_mutex);
        if (options.on_unit_done) options.on_unit_done(r);
        results[k] = std::move(r);
      } catch (...) {
        std::lock_guard lock(done_mutex);
        if (!error) error = std::current_exception();
        next = units.size();
      }
    }
  };
  const unsigned threads = std::max(1u, options.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  CampaignReport report;
  report.kind = kind;
  report.dim = dim;
  report.classes_total = units.size();
  for (auto& r : results) {
    ++report.classes_done;
    report.matchings_checked += r.matchings;
    report.pairs_checked += r.pairs;
    report.pairs_skipped += r.skipped;
    for (auto& [name, count] : r.tallies) report.tallies[name] += count;
    for (auto& f : r.failures) report.failures.push_back(f);
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

inline void check_campaign_dim(int d, int lowest, const CampaignOptions& options) {
  if (d < lowest) throw InvalidArgument("campaign needs d >= " + std::to_string(lowest));
  if (d > options.max_dim) throw Unsupported("campaign dimension " + std::to_string(d) + " exceeds the cap " +
                                             std::to_string(options.max_dim));
}

inline std::vector<UncoveredClass> realizable_classes(int n, bool include_perfect) {
  std::vector<UncoveredClass> out;
  for (auto& c : uncovered_classes(n))
    if (c.realizable && (include_perfect || !c.vertices.empty())) out.push_back(std::move(c));
  return out;
}

inline std::vector<Matching> class_representatives(int n, const UncoveredClass& c) {
  std::vector<Matching> reps;
  maximal_matchings(n, c.vertices, [&](const Matching& m, std::uint64_t) { reps.push_back(m); });
  return reps;
}

/// Opposite-parity pairs {u, v}, one per orbit of the stabilizer of `m`.
template <class Fn>
void for_each_pair_orbit(const Matching& m, Fn&& fn) {
  const int n = m.dim();
  const auto stab = stabilizer(m);
  for (std::uint32_t u = 0; u < m.num_vertices(); ++u)
    for (std::uint32_t v = u + 1; v < m.num_vertices(); ++v) {
      if (parity_of(u) == parity_of(v)) continue;
      if (canonical_pair(n, u, v, stab) != std::pair{u, v}) continue;
      fn(u, v);
    }
}

/// Two distinct u-v paths for every C-free pair of `m`.
inline void check_two_paths(const Matching& m, UnitResult& r, const SolverOptions& solver, const char* tag) {
  const int n = m.dim();
  for_each_pair_orbit(m, [&](std::uint32_t u, std::uint32_t v) {
    const auto report = c_condition_report(m, Vertex(n, u), Vertex(n, v));
    if (report.any()) {
      ++r.skipped;
      if (report.c1) ++r.tallies["skipped_c1"];
      if (report.c2) ++r.tallies["skipped_c2"];
      if (report.c3) ++r.tallies["skipped_c3"];
      return;
    }
    ++r.pairs;
    const auto two = two_distinct_paths(n, m, Vertex(n, u), Vertex(n, v), solver);
    if (two.outcome == TwoPathOutcome::two) return;
    const char* what = two.outcome == TwoPathOutcome::none ? "no Hamilton path" : "only one Hamilton path";
    r.failures.push_back({m, u, v, std::string(tag) + ": " + what});
  });
}

}  // namespace detail

/// Every maximal non-perfect matching of Q_d extends to a Hamilton path from
/// an uncovered vertex to every vertex of opposite parity. Each uncovered
/// vertex u of a class representative (one per orbit of its stabilizer) is
/// moved to 0 by translation, then paths from 0 to every odd v are sought.
inline CampaignReport verify_cycle_conjecture(int d, const CampaignOptions& options = {}) {
  detail::check_campaign_dim(d, 2, options);
  std::vector<detail::Unit> units;
  for (auto& c : detail::realizable_classes(d, false)) {
    units.push_back({c.key.hex(), [d, c, solver = options.solver] {
                       UnitResult r;
                       const CubeGroup& group = CubeGroup::of(d);
                       for (const Matching& m : detail::class_representatives(d, c)) {
                         ++r.matchings;
                         const auto stab = stabilizer(m);
                         for (std::uint32_t u : m.uncovered()) {
                           bool least = true;
                           for (const auto& g : stab) least &= group.apply(g, u) >= u;
                           if (!least) continue;
                           ++r.tallies["rooted_matchings"];
                           const Matching rooted = group.apply(CubeGroup::Element{0, u}, m);
                           for (std::uint32_t v = 1; v < rooted.num_vertices(); ++v) {
                             if (parity_of(v) == Parity::even) continue;
                             ++r.pairs;
                             if (!hamilton_path(d, rooted, Vertex(d, 0), Vertex(d, v), {}, solver))
                               r.failures.push_back({rooted, 0, v, "no Hamilton path from an uncovered vertex"});
                           }
                         }
                       }
                       return r;
                     }});
  }
  return detail::run_units(CampaignKind::cycle_conjecture, d, units, options);
}

namespace detail {

inline std::vector<Unit> one_edge_away_units(int d, const CampaignOptions& options) {
  std::vector<Unit> units;
  for (auto& inst : one_edge_away_instances(d)) {
    units.push_back({"e-" + inst.key.hex(), [inst, solver = options.solver] {
                       UnitResult r;
                       r.matchings = 1;
                       r.tallies["one_edge_away_instances"] = 1;
                       check_two_paths(inst.matching, r, solver, "one edge away");
                       return r;
                     }});
  }
  return units;
}

}  // namespace detail

/// Every maximal matching of Q_d (perfect ones included) has two distinct
/// u-v Hamilton paths for every opposite-parity pair free of C-conditions.
/// For d >= 4 the matchings one edge away from a C-structure follow.
inline CampaignReport verify_path_conjecture(int d, const CampaignOptions& options = {}) {
  detail::check_campaign_dim(d, 2, options);
  std::vector<detail::Unit> units;
  for (auto& c : detail::realizable_classes(d, true)) {
    units.push_back({c.key.hex(), [d, c, solver = options.solver] {
                       UnitResult r;
                       for (const Matching& m : detail::class_representatives(d, c)) {
                         ++r.matchings;
                         detail::check_two_paths(m, r, solver, c.vertices.empty() ? "perfect" : "maximal");
                       }
                       return r;
                     }});
  }
  if (d >= 4)
    for (auto& u : detail::one_edge_away_units(d, options)) units.push_back(std::move(u));
  return detail::run_units(CampaignKind::path_conjecture, d, units, options);
}

/// The one-edge-away stage on its own.
inline CampaignReport verify_one_edge_away(int d, const CampaignOptions& options = {}) {
  detail::check_campaign_dim(d, 4, options);
  return detail::run_units(CampaignKind::one_edge_away, d, detail::one_edge_away_units(d, options), options);
}

/// Pairs under a C-condition never admit a Hamilton path. Covers every
/// maximal matching of Q_n plus the minimal C-structured configurations.
inline CampaignReport verify_necessity(int n, const CampaignOptions& options = {}) {
  detail::check_campaign_dim(n, 2, options);
  auto check = [n](const Matching& m, UnitResult& r, const CampaignOptions& opt) {
    ++r.matchings;
    detail::for_each_pair_orbit(m, [&](std::uint32_t u, std::uint32_t v) {
      if (opt.pair_budget && r.pairs >= opt.pair_budget) return;
      const auto report = c_condition_report(m, Vertex(n, u), Vertex(n, v));
      if (!report.any()) return;
      ++r.pairs;
      if (report.c1) ++r.tallies["c1"];
      if (report.c2) ++r.tallies["c2"];
      if (report.c3) ++r.tallies["c3"];
      if (hamilton_path(n, m, Vertex(n, u), Vertex(n, v), {}, opt.solver))
        r.failures.push_back({m, u, v, "Hamilton path exists despite a C-condition"});
    });
  };
  std::vector<detail::Unit> units;
  for (auto& c : detail::realizable_classes(n, true)) {
    units.push_back({c.key.hex(), [n, c, check, options] {
                       UnitResult r;
                       for (const Matching& m : detail::class_representatives(n, c)) check(m, r, options);
                       return r;
                     }});
  }
  units.push_back({"minimal-configurations", [n, check, options] {
                     std::map<CanonicalKey, Matching> minimal;
                     all_maximal_matchings(n, [&](const Matching& m, std::uint64_t) {
                       if (!has_c_structure(m)) return;
                       Matching k = detail::minimal_c_configuration(m);
                       minimal.try_emplace(canonical_key(k), k);
                     });
                     UnitResult r;
                     for (auto& [key, m] : minimal) check(m, r, options);
                     return r;
                   }});
  return detail::run_units(CampaignKind::necessity, n, units, options);
}

/// Canonical keys of (matching, {u, v}) for each failure, sorted and unique.
inline std::vector<std::string> obstruction_keys(const CampaignReport& report) {
  std::set<std::string> keys;
  for (const Failure& f : report.failures) {
    std::vector<std::uint32_t> marks{f.u, f.v};
    keys.insert(canonical_key(f.matching, marks).hex());
  }
  return {keys.begin(), keys.end()};
}

// ---------------------------------------------------------------------------
// Paths covering a vertex set and their parity balance.

/// Half the sum of chi over both ends of every path (a single-vertex path
/// counts its vertex twice). Equals the chi-sum of the covered set.
inline int path_cover_balance(const std::vector<std::vector<std::uint32_t>>& paths) {
  int twice = 0;
  for (const auto& p : paths) twice += chi(p.front()) + chi(p.back());
  return twice / 2;
}

// ---------------------------------------------------------------------------
// A matching of B(Q_n), n >= 9, with no extension to a Hamilton path of Q_n.

struct BinomialInequality {
  int m = 0;
  std::uint64_t middle_plus_three = 0;  // C(m, floor(m/2)) + 3
  std::uint64_t below = 0;              // sum over i < floor(m/2)
  std::uint64_t above = 0;              // sum over i > floor(m/2)
  bool holds() const { return middle_plus_three <= below && below <= above; }
};

inline std::uint64_t binomial(int m, int k) {
  if (k < 0 || k > m) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(m - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

inline BinomialInequality binomial_inequality(int m) {
  BinomialInequality b;
  b.m = m;
  b.middle_plus_three = binomial(m, m / 2) + 3;
  for (int i = 0; i < m / 2; ++i) b.below += binomial(m, i);
  for (int i = m / 2 + 1; i <= m; ++i) b.above += binomial(m, i);
  return b;
}

struct BqnCertificate {
  int n = 0;
  int h = 0;            // middle weight of the lower half
  std::uint64_t k = 0;  // size of the middle layer
  Parity p = Parity::even;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  // Endpoint parity counts over the low+middle region.
  std::uint64_t minus_p = 0;  // matched vertices of parity -p
  std::uint64_t plus_p = 0;   // matched vertices of parity p, plus one for a path end
  std::int64_t imbalance = 0; // minus_p - 2 * plus_p; positive means no path
  std::int64_t region_chi = 0;  // chi-sum of the region, must be 0
  bool region_closed = false;   // unmatched region vertices have all neighbors inside
  BinomialInequality inequality;
};

/// Builds the layered matching (coordinate 1 splits the cube) and counts the
/// parities of its endpoints in the low+middle region.
inline BqnCertificate bqn_counterexample(int n) {
  if (n < 9) throw InvalidArgument("the construction needs n >= 9");
  if (n > 20) throw Unsupported("the construction is materialized only for n <= 20");
  BqnCertificate cert;
  cert.n = n;
  cert.h = (n - 1) / 2;
  cert.k = binomial(n - 1, cert.h);
  cert.inequality = binomial_inequality(n - 1);
  if (!cert.inequality.holds()) throw Error("binomial inequality fails");

  const std::uint32_t count = 1u << n;
  const std::uint32_t flip = bit_of(1);
  auto weight = [&](std::uint32_t v) { return std::popcount(v & ~flip); };
  enum Layer : std::uint8_t { low, mid, up };
  auto layer = [&](std::uint32_t v) {
    const int w = weight(v);
    return w < cert.h ? low : w == cert.h ? mid : up;
  };

  std::vector<std::uint32_t> xs;
  for (std::uint32_t v = 0; v < count; ++v)
    if (!(v & flip) && layer(v) == mid) xs.push_back(v);
  cert.p = parity_of(xs.front());
  const Parity minus = opposite(cert.p);

  std::vector<std::uint32_t> ys, zs;
  for (std::uint32_t v = 0; v < count && ys.size() < cert.k + 3; ++v)
    if (layer(v) == low && parity_of(v) == minus) ys.push_back(v);
  for (std::uint32_t v = 0; v < count && zs.size() < cert.k + 3; ++v)
    if (layer(v) == up && parity_of(v) == cert.p) zs.push_back(v);
  if (ys.size() < cert.k + 3 || zs.size() < cert.k + 3) throw Error("not enough low/up vertices");

  for (std::size_t i = 0; i < cert.k; ++i) {
    cert.pairs.push_back({xs[i], ys[i]});
    cert.pairs.push_back({xs[i] ^ flip, zs[i]});
  }
  for (std::size_t i = 0; i < 3; ++i) cert.pairs.push_back({ys[cert.k + i], zs[cert.k + i]});

  std::vector<char> matched(count, 0);
  for (auto [a, b] : cert.pairs) {
    if (matched[a] || matched[b]) throw Error("pairs are not disjoint");
    if (parity_of(a) == parity_of(b)) throw Error("pair does not join opposite parities");
    matched[a] = matched[b] = 1;
  }

  cert.region_closed = true;
  for (std::uint32_t v = 0; v < count; ++v) {
    if (layer(v) == up) continue;
    cert.region_chi += chi(v);
    if (matched[v]) {
      (parity_of(v) == cert.p ? cert.plus_p : cert.minus_p)++;
    } else {
      for (int i = 1; i <= n; ++i)
        if (layer(v ^ bit_of(i)) == up) cert.region_closed = false;
    }
  }
  cert.plus_p += 1;  // one end of the path may lie in the region with parity p
  cert.imbalance = static_cast<std::int64_t>(cert.minus_p) - 2 * static_cast<std::int64_t>(cert.plus_p);
  return cert;
}

}  // namespace hypermatch
