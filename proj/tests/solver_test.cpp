#include <gtest/gtest.h>

#include <random>

#include "hypermatch/layers.hpp"
#include "hypermatch/solver.hpp"
#include "oracle.hpp"

using namespace hypermatch;
using oracle::bits;

namespace {

Matching random_matching(int n, std::mt19937& rng, int attempts) {
  Matching m(n);
  for (int k = 0; k < attempts; ++k) {
    const int dir = 1 + static_cast<int>(rng() % n);
    const std::uint32_t w = (rng() % (1u << n)) & ~bit_of(dir);
    m.insert({w, dir});
  }
  return m;
}

std::vector<oracle::PlainEdge> plain_edges(const Matching& m) {
  std::vector<oracle::PlainEdge> out;
  for (const Edge& e : m.edges()) out.push_back(oracle::plain(e.base, e.other()));
  return out;
}

Matching from_plain(int n, const oracle::EdgeSet& es) {
  Matching m(n);
  for (auto& e : es) m.insert(Edge::between(e.a, e.b));
  return m;
}

}  // namespace

TEST(HamiltonPath, SquareExamples) {
  auto p = hamilton_path(2, Matching(2), Vertex(2, bits("00")), Vertex(2, bits("01")));
  ASSERT_TRUE(p);
  EXPECT_EQ(p->vertices, (std::vector<std::uint32_t>{0b00, 0b10, 0b11, 0b01}));
  std::vector<Edge> f{{0, 2}};
  Matching m = Matching::from_edges(2, f);
  EXPECT_FALSE(hamilton_path(2, m, Vertex(2, 0), Vertex(2, bits("10"))));
}

TEST(HamiltonPath, HalfLayerBlocksCoveredPairs) {
  Matching m(4);
  for (const Edge& e : half_layer_edges(4, 1, Parity::even)) m.insert(e);
  HalfLayerDesc h{1, Parity::even, std::nullopt};
  for (std::uint32_t u = 0; u < 16; ++u)
    for (std::uint32_t v = 0; v < 16; ++v)
      if (parity_of(u) != parity_of(v) && h.covers(u) && h.covers(v)) {
        EXPECT_FALSE(hamilton_path(4, m, Vertex(4, u), Vertex(4, v)));
      }
}

TEST(HamiltonPath, RejectsMalformedInput) {
  Matching m(3);
  EXPECT_THROW(hamilton_path(3, m, Vertex(3, 0), Vertex(3, 0)), InvalidArgument);
  std::vector<Edge> f{{0, 1}};
  std::vector<std::uint32_t> removed{1};
  EXPECT_THROW(hamilton_path_forced(3, f, 2, 3, removed), InvalidArgument);
  EXPECT_THROW(hamilton_path(11, Matching(11), Vertex(11, 0), Vertex(11, 1)), Unsupported);
}

TEST(HamiltonPath, AgreesWithNaiveSearchOnQ3) {
  for (auto& es : oracle::all_matchings(3)) {
    Matching m = from_plain(3, es);
    for (std::uint32_t u = 0; u < 8; ++u)
      for (std::uint32_t v = 0; v < 8; ++v) {
        if (u == v) continue;
        auto p = hamilton_path(3, m, Vertex(3, u), Vertex(3, v));
        EXPECT_EQ(p.has_value(), oracle::naive_path_exists(3, es, u, v));
        if (p) {
          EXPECT_TRUE(validate_path(*p, m, u, v));
        }
      }
  }
}

TEST(HamiltonPath, AgreesWithNaiveSearchOnQ4) {
  std::mt19937 rng(3);
  auto all = oracle::all_matchings(4);
  for (int trial = 0; trial < 400; ++trial) {
    const auto& es = all[rng() % all.size()];
    Matching m = from_plain(4, es);
    const std::uint32_t u = rng() % 16;
    std::uint32_t v = rng() % 16;
    if (parity_of(u) == parity_of(v)) v ^= 1;
    auto p = hamilton_path(4, m, Vertex(4, u), Vertex(4, v));
    EXPECT_EQ(p.has_value(), oracle::naive_path_exists(4, es, u, v)) << trial;
    if (p) {
      EXPECT_TRUE(validate_path(*p, m, u, v));
    }
  }
}

TEST(HamiltonPath, RemovedVerticesAgreeWithNaiveSearch) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint32_t r1 = rng() % 16, r2 = r1 ^ bit_of(1 + rng() % 4);
    std::vector<std::uint32_t> removed{r1, r2};
    Matching m(4);
    for (int k = 0; k < 3; ++k) {
      const int dir = 1 + rng() % 4;
      const std::uint32_t w = (rng() % 16) & ~bit_of(dir);
      if (w == r1 || w == r2 || (w ^ bit_of(dir)) == r1 || (w ^ bit_of(dir)) == r2) continue;
      m.insert({w, dir});
    }
    std::uint32_t u = rng() % 16, v = rng() % 16;
    if (u == v || u == r1 || u == r2 || v == r1 || v == r2) continue;
    auto p = hamilton_path(4, m, Vertex(4, u), Vertex(4, v), removed);
    EXPECT_EQ(p.has_value(), oracle::naive_path_exists(4, plain_edges(m), u, v, {r1, r2}));
    if (p) {
      EXPECT_TRUE(validate_path(*p, m, u, v, removed));
    }
  }
}

TEST(HamiltonPath, ForcedChainsBeyondMatchings) {
  // A forced path 000-001-011 through Q_3 from 000 must end elsewhere.
  std::vector<Edge> chain{{0, 1}, {1, 2}};
  auto p = hamilton_path_forced(3, chain, 0, bits("100"));
  ASSERT_TRUE(p);
  EXPECT_EQ(p->vertices[1], 1u);
  EXPECT_EQ(p->vertices[2], 3u);
  std::vector<Edge> cyc{{0, 1}, {1, 2}, {2, 1}, {0, 2}};
  EXPECT_THROW(hamilton_path_forced(3, cyc, 4, 5), InvalidArgument);
}

// Both half-layer obstructions are refuted without exhausting Q_6, and a
// half-layer that leaves one end uncovered does not slow the search down.
TEST(HamiltonPath, HalfLayerObstructionsOnLargerCubes) {
  const Matching c1 = Matching::from_edges(6, half_layer_edges(6, 1, Parity::even));
  EXPECT_FALSE(hamilton_path(6, c1, Vertex(6, 0), Vertex(6, bits("000111"))).has_value());

  Matching c2(6);
  for (const Edge& e : half_layer_edges(6, 1, Parity::even))
    if (e.base != 0) c2.insert(e);
  c2.insert({0, 2});
  c2.insert({1, 2});
  ASSERT_TRUE(c_condition_report(c2, Vertex(6, 0), Vertex(6, 1)).c2.has_value());
  EXPECT_FALSE(hamilton_path(6, c2, Vertex(6, 0), Vertex(6, 1)).has_value());

  SolverOptions budget;
  budget.max_nodes = 1'000'000;
  const Matching h8 = Matching::from_edges(8, half_layer_edges(8, 2, Parity::odd));
  auto p = hamilton_path(8, h8, Vertex(8, 1), Vertex(8, 0), {}, budget);
  ASSERT_TRUE(p.has_value());
  EXPECT_TRUE(validate_path(*p, h8, 1, 0));
}

TEST(HamiltonCycle, Examples) {
  auto c = hamilton_cycle(2, Matching(2));
  ASSERT_TRUE(c);
  EXPECT_EQ(c->vertices.size(), 4u);
  std::vector<Edge> pm{{0, 1}, {2, 1}};
  Matching m = Matching::from_edges(2, pm);
  auto c2 = hamilton_cycle(2, m);
  ASSERT_TRUE(c2);
  EXPECT_TRUE(validate_cycle(*c2, m));
  EXPECT_THROW(hamilton_cycle(1, Matching(1)), InvalidArgument);
}

TEST(HamiltonCycle, EveryMatchingOfQ3AndQ4Extends) {
  for (int n : {3, 4}) {
    for (auto& es : oracle::all_matchings(n)) {
      Matching m = from_plain(n, es);
      auto c = hamilton_cycle(n, m);
      ASSERT_TRUE(c);
      EXPECT_TRUE(validate_cycle(*c, m));
    }
  }
}

TEST(TwoPaths, SquareHasOnlyOne) {
  auto r = two_distinct_paths(2, Matching(2), Vertex(2, 0), Vertex(2, 1));
  EXPECT_EQ(r.outcome, TwoPathOutcome::only_one);
}

TEST(TwoPaths, EmptyFiveCubeHasTwo) {
  std::mt19937 rng(9);
  for (int k = 0; k < 20; ++k) {
    const std::uint32_t u = rng() % 32;
    std::uint32_t v = rng() % 32;
    if (parity_of(u) == parity_of(v)) v ^= 4;
    auto r = two_distinct_paths(5, Matching(5), Vertex(5, u), Vertex(5, v));
    ASSERT_EQ(r.outcome, TwoPathOutcome::two);
    EXPECT_TRUE(validate_path(*r.first, Matching(5), u, v));
    EXPECT_TRUE(validate_path(*r.second, Matching(5), u, v));
    EXPECT_NE(path_edges(r.first->vertices), path_edges(r.second->vertices));
  }
}

TEST(TwoPaths, C3GivesNone) {
  std::vector<Edge> f{{0, 3}};
  auto r = two_distinct_paths(4, Matching::from_edges(4, f), Vertex(4, 0), Vertex(4, 4));
  EXPECT_EQ(r.outcome, TwoPathOutcome::none);
}

TEST(TwoPaths, OnlyOneAgreesWithPathCountOnQ4) {
  // With M = empty, count Hamilton u-v paths directly and compare.
  auto paths = oracle::all_paths_from(4, 0);
  for (std::uint32_t v = 1; v < 16; ++v) {
    if (parity_of(v) == Parity::even) continue;
    std::size_t count = 0;
    for (auto& p : paths) count += p.back() == v;
    auto r = two_distinct_paths(4, Matching(4), Vertex(4, 0), Vertex(4, v));
    EXPECT_EQ(r.outcome, count >= 2 ? TwoPathOutcome::two : count == 1 ? TwoPathOutcome::only_one
                                                                      : TwoPathOutcome::none);
  }
}

TEST(EndpointSet, SquareExample) {
  std::vector<Edge> f{{0, 2}};
  auto t = endpoint_set(2, Matching::from_edges(2, f), Vertex(2, 0));
  EXPECT_EQ(t, std::vector<std::uint32_t>{0b01});
}

TEST(EndpointSet, HalfLayerAndUncoveredCardinalities) {
  Matching h(5);
  for (const Edge& e : half_layer_edges(5, 3, Parity::odd)) h.insert(e);
  HalfLayerDesc desc{3, Parity::odd, std::nullopt};
  const std::uint32_t u = h.edges()[0].base;
  auto t = endpoint_set(5, h, Vertex(5, u));
  ASSERT_EQ(t.size(), 8u);
  for (std::uint32_t v : t) {
    EXPECT_NE(parity_of(v), parity_of(u));
    EXPECT_FALSE(desc.covers(v));
  }
  std::mt19937 rng(21);
  for (int k = 0; k < 10; ++k) {
    Matching m = random_matching(5, rng, 30);
    auto unc = m.uncovered();
    if (unc.empty()) continue;
    EXPECT_EQ(endpoint_set(5, m, Vertex(5, unc.front())).size(), 16u);
  }
}

// |T| is 8 exactly when a half-layer covers u, and 14..16 otherwise.
TEST(EndpointSet, CardinalityTrichotomyOnRandomMatchings) {
  std::mt19937 rng(2024);
  int done = 0;
  while (done < 200) {
    Matching m = random_matching(5, rng, 4 + rng() % 40);
    if (m.empty()) continue;
    if (rng() % 4 == 0) {
      // Bias toward half-layer instances.
      const int dir = 1 + rng() % 5;
      Matching h(5);
      for (const Edge& e : half_layer_edges(5, dir, static_cast<Parity>(rng() % 2))) h.insert(e);
      for (const Edge& e : m.edges()) h.insert(e);
      m = h;
    }
    const std::uint32_t u = m.edges()[rng() % m.size()].base;
    const std::size_t t = endpoint_set(5, m, Vertex(5, u)).size();
    bool covered = false;
    for (const auto& h : half_layers_in(m)) covered |= h.covers(u);
    if (covered) {
      EXPECT_EQ(t, 8u);
    } else {
      EXPECT_GE(t, 14u);
      EXPECT_LE(t, 16u);
    }
    ++done;
  }
}

TEST(EndpointSet, AtMostTwoBlockedNeighbors) {
  std::mt19937 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    Matching m = random_matching(5, rng, 5 + rng() % 30);
    const std::uint32_t u = rng() % 32;
    int blocked = 0;
    for (int i = 1; i <= 5; ++i)
      blocked += !hamilton_path(5, m, Vertex(5, u), Vertex(5, u ^ bit_of(i))).has_value();
    EXPECT_LE(blocked, 2);
  }
}

TEST(Validator, RejectsBrokenCertificates) {
  Matching m(2);
  EXPECT_FALSE(validate_path({2, {0, 3, 2, 1}}, m));        // non-adjacent step
  EXPECT_FALSE(validate_path({2, {0, 1, 3}}, m));           // missing vertex
  EXPECT_FALSE(validate_path({2, {0, 1, 3, 1}}, m));        // repeat
  EXPECT_FALSE(validate_cycle({2, {0, 1, 3, 2, 0}}, m));    // wrong length
  std::vector<Edge> f{{0, 2}};
  EXPECT_FALSE(validate_path({2, {0, 1, 3, 2}}, Matching::from_edges(2, f)));
  EXPECT_TRUE(validate_path({2, {0, 1, 3, 2}}, m, 2, 0));
  EXPECT_FALSE(validate_path({2, {0, 1, 3, 2}}, m, 0, 3));
}
