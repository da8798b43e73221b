#pragma once

// Plain-text matchings and binary-string vertices.
//
//   # comment
//   dim 4
//   0000 0001
//   0110 0100
//
// Each vertex is written with n characters; coordinate 1 is the rightmost.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "hypermatch/cube.hpp"

namespace hypermatch {

inline std::string format_vertex(int n, std::uint32_t v) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int i = 0; i < n; ++i)
    if (v & (std::uint32_t{1} << i)) s[static_cast<std::size_t>(n - 1 - i)] = '1';
  return s;
}

inline std::uint32_t parse_vertex(int n, std::string_view s) {
  check_dim(n);
  if (s.size() != static_cast<std::size_t>(n))
    throw InvalidArgument("vertex '" + std::string(s) + "' must have " + std::to_string(n) + " binary digits");
  std::uint32_t v = 0;
  for (char c : s) {
    if (c != '0' && c != '1') throw InvalidArgument("vertex '" + std::string(s) + "' is not a binary string");
    v = (v << 1) | static_cast<std::uint32_t>(c == '1');
  }
  return v;
}

inline Matching parse_matching(std::istream& in) {
  std::string line;
  int lineno = 0;
  int dim = 0;
  std::optional<Matching> m;
  auto fail = [&](const std::string& why) {
    throw InvalidArgument("line " + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a)) continue;
    if (!m) {
      if (a != "dim" || !(fields >> b) || (fields >> extra)) fail("expected 'dim <n>'");
      try {
        std::size_t used = 0;
        dim = std::stoi(b, &used);
        if (used != b.size()) fail("bad dimension '" + b + "'");
      } catch (const std::logic_error&) {
        fail("bad dimension '" + b + "'");
      }
      if (dim < 1 || dim > kMaxDim) fail("dimension out of range: " + b);
      m.emplace(dim);
      continue;
    }
    if (!(fields >> b) || (fields >> extra)) fail("expected two vertices");
    std::uint32_t x = 0, y = 0;
    try {
      x = parse_vertex(dim, a);
      y = parse_vertex(dim, b);
    } catch (const InvalidArgument& e) {
      fail(e.what());
    }
    if (!std::has_single_bit(x ^ y)) fail(a + " and " + b + " are not adjacent");
    if (m->covers(x) || m->covers(y)) fail("edge " + a + " " + b + " shares an endpoint with an earlier edge");
    m->insert(Edge::between(x, y));
  }
  if (!m) throw InvalidArgument("missing 'dim <n>' header");
  return *m;
}

inline Matching parse_matching(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_matching(in);
}

inline Matching read_matching_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  try {
    return parse_matching(in);
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

inline std::string format_matching(const Matching& m) {
  std::string out = "dim " + std::to_string(m.dim()) + "\n";
  for (const Edge& e : m.edges())
    out += format_vertex(m.dim(), e.base) + " " + format_vertex(m.dim(), e.other()) + "\n";
  return out;
}

}  // namespace hypermatch
