#pragma once

// Randomized soak of the constructions: every certificate goes through the
// validator, and optionally the path verdict is compared with a direct
// search on the whole cube.

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "hypermatch/certificate.hpp"
#include "hypermatch/construct.hpp"
#include "hypermatch/random_instances.hpp"
#include "hypermatch/solver.hpp"

namespace hypermatch {

struct SoakOptions {
  int n = 6;
  int d = 5;
  std::uint64_t seed = 1;
  std::size_t count = 500;
  std::size_t cross_check = 0;  // first k instances also get a direct search
  ConstructOptions construct;
};

struct SoakProblem {
  RandomInstance instance;
  std::string what;
};

struct SoakReport {
  std::size_t instances = 0;
  std::size_t cycles_valid = 0;
  std::size_t paths_valid = 0;
  std::size_t paths_refused = 0;  // a C-condition holds
  std::size_t unsupported = 0;
  std::size_t cross_checked = 0;
  std::size_t cross_agree = 0;
  std::map<std::string, std::uint64_t> branches;
  std::uint64_t digest = 0xcbf29ce484222325ull;  // FNV-1a over every certificate
  std::vector<SoakProblem> problems;

  bool clean() const { return problems.empty() && unsupported == 0; }
};

namespace detail {

inline void fnv(std::uint64_t& h, std::uint64_t x) {
  for (int k = 0; k < 8; ++k) {
    h ^= (x >> (8 * k)) & 0xFF;
    h *= 0x100000001b3ull;
  }
}

}  // namespace detail

inline SoakReport soak(const SoakOptions& options) {
  SoakReport r;
  std::mt19937_64 rng(options.seed);
  const int n = options.n;
  for (std::size_t k = 0; k < options.count; ++k) {
    const RandomInstance inst = random_instance(n, options.d, rng);
    const Matching& m = inst.matching;
    const Vertex u(n, inst.u), v(n, inst.v);
    ++r.instances;
    auto problem = [&](std::string what) { r.problems.push_back({inst, std::move(what)}); };
    try {
      ConstructTrace trace;
      const CycleCertificate c = extend_to_cycle(n, options.d, m, options.construct, &trace);
      ++r.branches["cycle: " + trace.branch];
      detail::fnv(r.digest, 0xC);
      for (std::uint32_t w : c.vertices) detail::fnv(r.digest, w);
      if (auto ok = validate_cycle(c, m); ok) {
        ++r.cycles_valid;
      } else {
        problem("cycle: " + ok.message);
      }
    } catch (const Unsupported&) {
      ++r.unsupported;
    } catch (const Error& e) {
      problem(std::string("cycle: ") + e.what());
    }

    std::optional<bool> found;
    try {
      ConstructTrace trace;
      const auto p = extend_to_path(n, options.d, m, u, v, options.construct, &trace);
      ++r.branches["path: " + trace.branch];
      found = p.has_value();
      detail::fnv(r.digest, 0xA);
      if (p) {
        for (std::uint32_t w : p->vertices) detail::fnv(r.digest, w);
        if (auto ok = validate_path(*p, m, inst.u, inst.v); ok) {
          ++r.paths_valid;
        } else {
          problem("path: " + ok.message);
        }
      } else {
        ++r.paths_refused;
      }
    } catch (const Unsupported&) {
      ++r.unsupported;
    } catch (const Error& e) {
      problem(std::string("path: ") + e.what());
    }

    if (k < options.cross_check && found) {
      ++r.cross_checked;
      const bool direct = hamilton_path(n, m, u, v, {}, options.construct.solver).has_value();
      if (direct == *found) {
        ++r.cross_agree;
      } else {
        problem(direct ? "path: refused although a direct search finds one" : "path: direct search finds none");
      }
    }
  }
  return r;
}

}  // namespace hypermatch
