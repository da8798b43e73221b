#pragma once

// JSON forms of certificates, witnesses and campaign reports. Objects use
// nlohmann::json's default sorted keys, so equal inputs serialize to equal
// bytes. Wall-clock times appear only on request.

#include <cstdio>
#include <iomanip>
#include <sstream>
#include <string>

#include "hypermatch/certificate.hpp"
#include "hypermatch/construct.hpp"
#include "hypermatch/layers.hpp"
#include "hypermatch/soak.hpp"
#include "hypermatch/text_format.hpp"
#include "hypermatch/verify.hpp"
#include "json.hpp"

namespace hypermatch::report {

using nlohmann::json;

inline constexpr int kSchema = 1;

inline json vertices(int n, std::span<const std::uint32_t> vs) {
  json out = json::array();
  for (std::uint32_t v : vs) out.push_back(format_vertex(n, v));
  return out;
}

inline std::vector<std::uint32_t> vertices_from(int n, const json& j) {
  if (!j.is_array()) throw InvalidArgument("expected an array of binary strings");
  std::vector<std::uint32_t> out;
  for (const json& s : j) {
    if (!s.is_string()) throw InvalidArgument("expected an array of binary strings");
    out.push_back(parse_vertex(n, s.get<std::string>()));
  }
  return out;
}

inline json matching(const Matching& m) {
  json edges = json::array();
  for (const Edge& e : m.edges())
    edges.push_back({format_vertex(m.dim(), e.base), format_vertex(m.dim(), e.other())});
  return {{"dim", m.dim()}, {"edges", edges}};
}

inline Matching matching_from(const json& j) {
  const int n = j.at("dim").get<int>();
  check_dim(n);
  Matching m(n);
  for (const json& e : j.at("edges")) {
    const auto ends = vertices_from(n, e);
    if (ends.size() != 2) throw InvalidArgument("an edge needs two vertices");
    if (!m.insert(Edge::between(ends[0], ends[1]))) throw InvalidArgument("edges do not form a matching");
  }
  return m;
}

inline json path_certificate(const PathCertificate& p) {
  return {{"schema", kSchema}, {"kind", "path"}, {"dim", p.dim}, {"path", vertices(p.dim, p.vertices)}};
}

inline json cycle_certificate(const CycleCertificate& c) {
  return {{"schema", kSchema}, {"kind", "cycle"}, {"dim", c.dim}, {"cycle", vertices(c.dim, c.vertices)}};
}

inline json half_layer(int n, const HalfLayerDesc& h) {
  json out{{"direction", h.dir}, {"side_parity", h.side_parity == Parity::even ? "even" : "odd"}};
  if (h.missing) out["missing_edge"] = {format_vertex(n, h.missing_a()), format_vertex(n, h.missing_b())};
  return out;
}

/// The C-conditions that hold, each with the structure that proves it.
inline json witness(int n, const CConditionReport& r) {
  json out = json::object();
  if (r.c1) out["c1"] = {{"half_layer", half_layer(n, *r.c1)}};
  if (r.c2) out["c2"] = {{"almost_half_layer", half_layer(n, r.c2->almost)}, {"i", r.c2->i}, {"j", r.c2->j}};
  if (r.c3) out["c3"] = true;
  return out;
}

inline json failure(const Failure& f) {
  const int n = f.matching.dim();
  return {{"matching", matching(f.matching)},
          {"u", format_vertex(n, f.u)},
          {"v", format_vertex(n, f.v)},
          {"reason", f.reason}};
}

inline Failure failure_from(const json& j) {
  Failure f;
  f.matching = matching_from(j.at("matching"));
  f.u = parse_vertex(f.matching.dim(), j.at("u").get<std::string>());
  f.v = parse_vertex(f.matching.dim(), j.at("v").get<std::string>());
  f.reason = j.at("reason").get<std::string>();
  return f;
}

/// One line of a resume checkpoint.
inline json unit(CampaignKind kind, int dim, const UnitResult& r) {
  json failures = json::array();
  for (const Failure& f : r.failures) failures.push_back(failure(f));
  return {{"campaign", to_string(kind)}, {"dim", dim},           {"key", r.key},
          {"matchings", r.matchings},    {"pairs", r.pairs},     {"skipped", r.skipped},
          {"tallies", r.tallies},        {"failures", failures}};
}

inline UnitResult unit_from(const json& j) {
  UnitResult r;
  r.key = j.at("key").get<std::string>();
  r.matchings = j.at("matchings").get<std::uint64_t>();
  r.pairs = j.at("pairs").get<std::uint64_t>();
  r.skipped = j.at("skipped").get<std::uint64_t>();
  r.tallies = j.at("tallies").get<std::map<std::string, std::uint64_t>>();
  for (const json& f : j.at("failures")) r.failures.push_back(failure_from(f));
  return r;
}

inline json campaign(const CampaignReport& r, bool timing) {
  json failures = json::array();
  for (const Failure& f : r.failures) failures.push_back(failure(f));
  json out{{"schema", kSchema},
           {"campaign", to_string(r.kind)},
           {"dim", r.dim},
           {"confirmed", r.confirmed()},
           {"units_total", r.classes_total},
           {"units_done", r.classes_done},
           {"matchings_checked", r.matchings_checked},
           {"pairs_checked", r.pairs_checked},
           {"pairs_skipped", r.pairs_skipped},
           {"tallies", r.tallies},
           {"failures", failures}};
  if (r.kind == CampaignKind::path_conjecture || r.kind == CampaignKind::one_edge_away)
    out["obstructions"] = obstruction_keys(r);
  if (timing) out["wall_seconds"] = r.wall_seconds;
  return out;
}

inline json bqn(const BqnCertificate& c) {
  json pairs = json::array();
  for (auto [a, b] : c.pairs) pairs.push_back({format_vertex(c.n, a), format_vertex(c.n, b)});
  const auto& q = c.inequality;
  return {{"schema", kSchema},
          {"n", c.n},
          {"h", c.h},
          {"k", c.k},
          {"p", c.p == Parity::even ? "even" : "odd"},
          {"pairs", pairs},
          {"minus_p", c.minus_p},
          {"plus_p", c.plus_p},
          {"imbalance", c.imbalance},
          {"region_chi", c.region_chi},
          {"region_closed", c.region_closed},
          {"inequality",
           {{"m", q.m}, {"middle_plus_three", q.middle_plus_three}, {"below", q.below}, {"above", q.above},
            {"holds", q.holds()}}}};
}

inline std::string hex64(std::uint64_t x) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << x;
  return s.str();
}

inline json soak_report(const SoakOptions& o, const SoakReport& r) {
  json problems = json::array();
  for (const SoakProblem& p : r.problems) {
    const int n = p.instance.matching.dim();
    problems.push_back({{"matching", matching(p.instance.matching)},
                        {"u", format_vertex(n, p.instance.u)},
                        {"v", format_vertex(n, p.instance.v)},
                        {"problem", p.what}});
  }
  return {{"schema", kSchema},
          {"n", o.n},
          {"d", o.d},
          {"seed", o.seed},
          {"instances", r.instances},
          {"cycles_valid", r.cycles_valid},
          {"paths_valid", r.paths_valid},
          {"paths_refused", r.paths_refused},
          {"unsupported", r.unsupported},
          {"cross_checked", r.cross_checked},
          {"cross_agree", r.cross_agree},
          {"branches", r.branches},
          {"certificate_digest", hex64(r.digest)},
          {"problems", problems}};
}

}  // namespace hypermatch::report
