#pragma once

// Canonical forms of matchings (with optional marked vertices) under the
// automorphism group of Q_n: maps v -> pi(v) XOR t, pi a coordinate
// permutation, t a vertex. The group has n! * 2^n elements.
//
// A (matching, marks) pair is encoded as one byte per vertex: the direction
// of the matching edge at that vertex (0 if uncovered), with 0x80 set for a
// marked vertex. This vector determines the pair, and the key is its
// lexicographic minimum over the whole group.

#include <array>
#include <cstdint>
#include <memory>
#include <mutex>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "hypermatch/cube.hpp"

namespace hypermatch {

inline constexpr int kMaxCanonDim = 7;

class CubeGroup {
 public:
  struct Element {
    std::uint32_t perm = 0;  // index into the permutation table
    std::uint32_t t = 0;     // translation applied after permuting
    friend bool operator==(const Element&, const Element&) = default;
  };

  static const CubeGroup& of(int n) {
    if (n < 1 || n > kMaxCanonDim) throw Unsupported("canonical forms support 1 <= n <= " + std::to_string(kMaxCanonDim));
    static std::array<std::once_flag, kMaxCanonDim + 1> flags;
    static std::array<std::unique_ptr<CubeGroup>, kMaxCanonDim + 1> groups;
    std::call_once(flags[n], [n] { groups[n].reset(new CubeGroup(n)); });
    return *groups[n];
  }

  int dim() const { return dim_; }
  std::size_t num_perms() const { return fwd_.size(); }
  std::size_t order() const { return fwd_.size() << dim_; }
  Element element(std::size_t k) const {
    return {static_cast<std::uint32_t>(k >> dim_), static_cast<std::uint32_t>(k & ((1u << dim_) - 1))};
  }

  std::uint32_t apply(Element g, std::uint32_t v) const { return fwd_[g.perm][v] ^ g.t; }
  /// Vertex mapped onto x by g.
  std::uint32_t preimage(Element g, std::uint32_t x) const { return inv_[g.perm][x ^ g.t]; }
  int apply_dir(Element g, int dir) const { return dirmap_[g.perm][dir]; }

  Matching apply(Element g, const Matching& m) const {
    Matching out(m.dim());
    for (const Edge& e : m.edges()) out.insert(Edge::between(apply(g, e.base), apply(g, e.other())));
    return out;
  }

  /// Image of a code vector: out[x] = relabeled code[g^-1(x)].
  void apply_codes(Element g, std::span<const std::uint8_t> code, std::span<std::uint8_t> out) const {
    const auto& inv = inv_[g.perm];
    const auto& dm = dirmap_[g.perm];
    for (std::uint32_t x = 0; x < code.size(); ++x) {
      const std::uint8_t c = code[inv[x ^ g.t]];
      out[x] = static_cast<std::uint8_t>((c & 0x80) | dm[c & 0x7f]);
    }
  }

  /// Sign of image(g, code) compared with `ref`, stopping at the first
  /// difference: negative if the image is smaller.
  int compare_image(Element g, std::span<const std::uint8_t> code, std::span<const std::uint8_t> ref) const {
    const auto& inv = inv_[g.perm];
    const auto& dm = dirmap_[g.perm];
    for (std::uint32_t x = 0; x < code.size(); ++x) {
      const std::uint8_t c = code[inv[x ^ g.t]];
      const std::uint8_t img = static_cast<std::uint8_t>((c & 0x80) | dm[c & 0x7f]);
      if (img != ref[x]) return img < ref[x] ? -1 : 1;
    }
    return 0;
  }

 private:
  explicit CubeGroup(int n) : dim_(n) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    const std::uint32_t count = 1u << n;
    do {
      std::vector<std::uint32_t> fwd(count), inv(count);
      for (std::uint32_t v = 0; v < count; ++v) {
        std::uint32_t w = 0;
        for (int i = 0; i < n; ++i)
          if (v & (1u << i)) w |= 1u << p[i];
        fwd[v] = w;
        inv[w] = v;
      }
      std::array<std::uint8_t, 32> dm{};
      for (int i = 0; i < n; ++i) dm[i + 1] = static_cast<std::uint8_t>(p[i] + 1);
      fwd_.push_back(std::move(fwd));
      inv_.push_back(std::move(inv));
      dirmap_.push_back(dm);
    } while (std::next_permutation(p.begin(), p.end()));
  }

  int dim_;
  std::vector<std::vector<std::uint32_t>> fwd_;
  std::vector<std::vector<std::uint32_t>> inv_;
  std::vector<std::array<std::uint8_t, 32>> dirmap_;
};

struct CanonicalKey {
  int dim = 1;
  std::vector<std::uint8_t> bytes;

  std::string hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
      out.push_back(digits[b >> 4]);
      out.push_back(digits[b & 15]);
    }
    return out;
  }

  friend bool operator==(const CanonicalKey&, const CanonicalKey&) = default;
  friend auto operator<=>(const CanonicalKey&, const CanonicalKey&) = default;
};

struct CanonicalKeyHash {
  std::size_t operator()(const CanonicalKey& k) const {
    std::size_t h = 1469598103934665603ull;
    for (std::uint8_t b : k.bytes) h = (h ^ b) * 1099511628211ull;
    return h;
  }
};

inline std::vector<std::uint8_t> vertex_codes(const Matching& m, std::span<const std::uint32_t> marks = {}) {
  std::vector<std::uint8_t> code(m.num_vertices(), 0);
  for (const Edge& e : m.edges()) code[e.base] = code[e.other()] = static_cast<std::uint8_t>(e.dir);
  for (std::uint32_t v : marks) {
    if (v >= m.num_vertices()) throw InvalidArgument("marked vertex outside the cube");
    code[v] |= 0x80;
  }
  return code;
}

/// Inverse of vertex_codes.
inline std::pair<Matching, std::vector<std::uint32_t>> decode_codes(int n, std::span<const std::uint8_t> code) {
  Matching m(n);
  std::vector<std::uint32_t> marks;
  for (std::uint32_t v = 0; v < code.size(); ++v) {
    if (code[v] & 0x80) marks.push_back(v);
    const int dir = code[v] & 0x7f;
    if (dir && !(v & bit_of(dir))) m.insert(Edge{v, dir});
  }
  return {std::move(m), std::move(marks)};
}

inline CanonicalKey canonical_key_of_codes(int n, std::span<const std::uint8_t> code) {
  const CubeGroup& group = CubeGroup::of(n);
  std::vector<std::uint8_t> best(code.begin(), code.end());
  for (std::size_t k = 0; k < group.order(); ++k) {
    const auto g = group.element(k);
    if (group.compare_image(g, code, best) < 0) group.apply_codes(g, code, best);
  }
  return {n, std::move(best)};
}

inline CanonicalKey canonical_key(const Matching& m, std::span<const std::uint32_t> marks = {}) {
  return canonical_key_of_codes(m.dim(), vertex_codes(m, marks));
}

/// Group elements fixing the code vector, optionally restricted to `within`.
inline std::vector<CubeGroup::Element> stabilizer_of_codes(int n, std::span<const std::uint8_t> code,
                                                           std::span<const CubeGroup::Element> within = {}) {
  const CubeGroup& group = CubeGroup::of(n);
  std::vector<CubeGroup::Element> out;
  if (within.empty()) {
    for (std::size_t k = 0; k < group.order(); ++k)
      if (group.compare_image(group.element(k), code, code) == 0) out.push_back(group.element(k));
  } else {
    for (const auto& g : within)
      if (group.compare_image(g, code, code) == 0) out.push_back(g);
  }
  return out;
}

inline std::vector<CubeGroup::Element> stabilizer(const Matching& m, std::span<const std::uint32_t> marks = {}) {
  return stabilizer_of_codes(m.dim(), vertex_codes(m, marks));
}

inline std::uint64_t orbit_size(const Matching& m, std::span<const std::uint32_t> marks = {}) {
  return CubeGroup::of(m.dim()).order() / stabilizer(m, marks).size();
}

/// True if no element of `elements` maps `code` to something smaller.
inline bool is_minimal_codes(int n, std::span<const std::uint8_t> code, std::span<const CubeGroup::Element> elements) {
  const CubeGroup& group = CubeGroup::of(n);
  for (const auto& g : elements)
    if (group.compare_image(g, code, code) < 0) return false;
  return true;
}

/// Lexicographically smallest unordered pair {g(u), g(v)} over `elements`.
inline std::pair<std::uint32_t, std::uint32_t> canonical_pair(int n, std::uint32_t u, std::uint32_t v,
                                                              std::span<const CubeGroup::Element> elements) {
  const CubeGroup& group = CubeGroup::of(n);
  std::pair<std::uint32_t, std::uint32_t> best{std::min(u, v), std::max(u, v)};
  for (const auto& g : elements) {
    const std::uint32_t a = group.apply(g, u), b = group.apply(g, v);
    best = std::min(best, std::pair{std::min(a, b), std::max(a, b)});
  }
  return best;
}

}  // namespace hypermatch
