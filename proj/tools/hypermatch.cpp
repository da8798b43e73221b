// hypermatch: extend matchings of the hypercube to Hamilton cycles and paths,
// validate certificates, and run the exhaustive verification campaigns.
//
// Exit codes: 0 ok, 1 no extension (a witness is printed) or invalid
// certificate, 2 usage or input error (including exceeded caps),
// 3 counterexample artifact (a campaign failure or a construction step that
// came back empty), 4 internal error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "hypermatch/certificate.hpp"
#include "hypermatch/construct.hpp"
#include "hypermatch/enumerate.hpp"
#include "hypermatch/layers.hpp"
#include "hypermatch/soak.hpp"
#include "hypermatch/solver.hpp"
#include "hypermatch/text_format.hpp"
#include "hypermatch/verify.hpp"
#include "report.hpp"

namespace {

using namespace hypermatch;
using report::json;

enum Exit { kOk = 0, kNoExtension = 1, kUsage = 2, kArtifact = 3, kInternal = 4 };

struct Globals {
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  bool timing = false;
  std::string output;
};

int env_int(const char* name, int fallback, int lo, int hi) {
  const char* s = std::getenv(name);
  if (!s || !*s) return fallback;
  char* end = nullptr;
  const long v = std::strtol(s, &end, 10);
  if (*end || v < lo || v > hi)
    throw InvalidArgument(std::string(name) + " must be an integer in [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
  return static_cast<int>(v);
}

ConstructOptions construct_options() {
  ConstructOptions o;
  o.solver_cap = env_int("HYPERMATCH_SOLVER_CAP", 5, 2, kMaxSolverDim);
  o.full_cap = env_int("HYPERMATCH_NCAP", 7, 1, kMaxSolverDim);
  return o;
}

void emit(const Globals& g, const json& j) {
  const std::string text = j.dump(2) + "\n";
  if (g.output.empty()) {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(g.output, std::ios::binary);
  if (!out || !(out << text)) throw InvalidArgument("cannot write " + g.output);
}

int spanned_count(const Matching& m) { return std::popcount(m.spanned_mask()); }

// ---------------------------------------------------------------------------
// check / extend-path

struct PathVerdict {
  std::optional<PathCertificate> path;
  CConditionReport conditions;
  std::string method;
  std::string branch;
};

PathVerdict decide_path(const Matching& m, std::uint32_t u, std::uint32_t v, std::optional<int> d_flag) {
  const int n = m.dim();
  const Vertex vu(n, u), vv(n, v);
  if (vu == vv) throw InvalidArgument("u and v must differ");
  if (vu.parity() == vv.parity()) throw InvalidArgument("u and v must have opposite parity");
  PathVerdict out;
  if (n >= 2) out.conditions = c_condition_report(m, vu, vv);
  const ConstructOptions opt = construct_options();
  if (n < 5) {
    // Small cubes are searched directly; the C-conditions are not the whole
    // story there, so the search decides.
    out.method = "direct search";
    out.path = hamilton_path(n, m, vu, vv, {}, opt.solver);
    return out;
  }
  const int d = d_flag.value_or(std::min(n, std::max(5, spanned_count(m))));
  ConstructTrace trace;
  out.method = "construction";
  out.path = extend_to_path(n, d, m, vu, vv, opt, &trace);
  out.branch = trace.branch;
  return out;
}

int run_check(const Globals& g, const std::string& file, const std::string& us, const std::string& vs,
              std::optional<int> d, bool with_path) {
  const Matching m = read_matching_file(file);
  const int n = m.dim();
  const std::uint32_t u = parse_vertex(n, us), v = parse_vertex(n, vs);
  const PathVerdict verdict = decide_path(m, u, v, d);
  json out{{"schema", report::kSchema},
           {"dim", n},
           {"u", format_vertex(n, u)},
           {"v", format_vertex(n, v)},
           {"extends", verdict.path.has_value()},
           {"method", verdict.method},
           {"witness", report::witness(n, verdict.conditions)}};
  if (!verdict.path && !verdict.conditions.any()) out["witness"]["exhaustive_search"] = true;
  if (!verdict.branch.empty()) out["branch"] = verdict.branch;
  if (verdict.path && with_path) out["certificate"] = report::path_certificate(*verdict.path);
  emit(g, out);
  return verdict.path ? kOk : kNoExtension;
}

// ---------------------------------------------------------------------------
// extend-cycle

int run_extend_cycle(const Globals& g, const std::string& file, std::optional<int> d_flag) {
  const Matching m = read_matching_file(file);
  const int n = m.dim();
  const ConstructOptions opt = construct_options();
  json out{{"schema", report::kSchema}, {"dim", n}};
  if (n < 2) throw InvalidArgument("Q_1 has no Hamilton cycle");
  if (n <= 2 || (!d_flag && n < 5)) {
    auto c = hamilton_cycle(n, m, opt.solver);
    out["method"] = "direct search";
    out["extends"] = c.has_value();
    if (c) out["certificate"] = report::cycle_certificate(*c);
    emit(g, out);
    return c ? kOk : kNoExtension;
  }
  const int d = d_flag.value_or(std::min(n, std::max(2, spanned_count(m))));
  ConstructTrace trace;
  const CycleCertificate c = extend_to_cycle(n, d, m, opt, &trace);
  out["method"] = "construction";
  out["branch"] = trace.branch;
  out["extends"] = true;
  out["certificate"] = report::cycle_certificate(c);
  emit(g, out);
  return kOk;
}

// ---------------------------------------------------------------------------
// validate

int run_validate(const Globals& g, const std::string& cert_file, const std::string& matching_file,
                 const std::string& us, const std::string& vs) {
  const Matching m = read_matching_file(matching_file);
  const int n = m.dim();
  std::ifstream in(cert_file);
  if (!in) throw InvalidArgument("cannot open " + cert_file);
  json cert;
  try {
    cert = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument(cert_file + ": " + e.what());
  }
  // Accept the output of extend-path/extend-cycle as well as a bare certificate.
  if (cert.is_object() && cert.contains("certificate")) cert = cert["certificate"];
  if (!cert.is_object() || (!cert.contains("path") && !cert.contains("cycle")))
    throw InvalidArgument(cert_file + ": expected an object with a \"path\" or \"cycle\" array");
  if (cert.contains("schema") && cert["schema"] != report::kSchema)
    throw InvalidArgument(cert_file + ": unsupported schema");
  if (cert.contains("dim") && cert["dim"] != n)
    throw InvalidArgument(cert_file + ": certificate dimension differs from the matching's");

  Validation result;
  std::string kind;
  if (cert.contains("cycle")) {
    kind = "cycle";
    if (!us.empty() || !vs.empty()) throw InvalidArgument("--u and --v apply to path certificates only");
    result = validate_cycle(CycleCertificate{n, report::vertices_from(n, cert["cycle"])}, m);
  } else {
    kind = "path";
    PathCertificate p{n, report::vertices_from(n, cert["path"])};
    if (us.empty() != vs.empty()) throw InvalidArgument("give both --u and --v or neither");
    result = us.empty() ? validate_path(p, m) : validate_path(p, m, parse_vertex(n, us), parse_vertex(n, vs));
  }
  json out{{"schema", report::kSchema}, {"kind", kind}, {"valid", result.ok}};
  if (!result.ok) out["message"] = result.message;
  emit(g, out);
  return result.ok ? kOk : kNoExtension;
}

// ---------------------------------------------------------------------------
// verify

CampaignOptions campaign_options(const Globals& g) {
  CampaignOptions o;
  o.threads = g.threads;
  o.max_dim = construct_options().solver_cap;
  return o;
}

// Loads finished units for this campaign and appends new ones as they finish.
class Checkpoint {
 public:
  Checkpoint(const std::string& path, CampaignKind kind, int dim) : kind_(kind), dim_(dim) {
    if (path.empty()) return;
    std::ifstream in(path);
    std::string line;
    std::vector<std::string> kept;
    int lineno = 0, torn = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      if (torn) throw InvalidArgument(path + ": line " + std::to_string(torn) + " is not valid JSON");
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded()) {
        torn = lineno;  // tolerated only as the last line (an interrupted write)
        continue;
      }
      if (j.value("campaign", "") != to_string(kind) || j.value("dim", -1) != dim)
        throw InvalidArgument(path + ": checkpoint belongs to a different campaign");
      UnitResult r = report::unit_from(j);
      done_[r.key] = std::move(r);
      kept.push_back(line);
    }
    in.close();
    if (torn) {
      std::ofstream rewrite(path, std::ios::trunc | std::ios::binary);
      for (const std::string& k : kept) rewrite << k << "\n";
      if (!rewrite) throw InvalidArgument("cannot write " + path);
    }
    out_.open(path, std::ios::app | std::ios::binary);
    if (!out_) throw InvalidArgument("cannot write " + path);
  }

  void attach(CampaignOptions& o) {
    o.completed = done_;
    if (!out_.is_open()) return;
    o.on_unit_done = [this](const UnitResult& r) { out_ << report::unit(kind_, dim_, r).dump() << "\n" << std::flush; };
  }

 private:
  CampaignKind kind_;
  int dim_;
  std::map<std::string, UnitResult> done_;
  std::ofstream out_;
};

int run_campaign(const Globals& g, CampaignKind kind, int dim, const std::string& resume, std::uint64_t budget,
                 bool progress) {
  CampaignOptions o = campaign_options(g);
  o.pair_budget = budget;
  Checkpoint cp(resume, kind, dim);
  cp.attach(o);
  if (progress) {
    auto inner = o.on_unit_done;
    o.on_unit_done = [inner](const UnitResult& r) {
      if (inner) inner(r);
      std::cerr << "unit " << r.key << " matchings " << r.matchings << " pairs " << r.pairs
                << " failures " << r.failures.size() << "\n";
    };
  }
  CampaignReport r;
  switch (kind) {
    case CampaignKind::cycle_conjecture: r = verify_cycle_conjecture(dim, o); break;
    case CampaignKind::path_conjecture: r = verify_path_conjecture(dim, o); break;
    case CampaignKind::necessity: r = verify_necessity(dim, o); break;
    default: throw InvalidArgument("unknown campaign");
  }
  emit(g, report::campaign(r, g.timing));
  return r.confirmed() ? kOk : kArtifact;
}

int run_bqn(const Globals& g, int n) {
  const BqnCertificate c = bqn_counterexample(n);
  emit(g, report::bqn(c));
  const bool sound = c.imbalance > 0 && c.region_chi == 0 && c.region_closed && c.inequality.holds();
  return sound ? kOk : kArtifact;
}

// ---------------------------------------------------------------------------
// enum

int run_enum(const Globals& g, int n, const std::vector<std::string>& uncovered, const std::string& dimacs,
             bool list) {
  check_dim(n);
  std::vector<std::uint32_t> s;
  for (const std::string& x : uncovered) s.push_back(parse_vertex(n, x));
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw InvalidArgument("repeated uncovered vertex");
  if (!is_independent(n, s)) throw InvalidArgument("uncovered vertices must be pairwise non-adjacent");

  json out{{"schema", report::kSchema}, {"n", n}};
  if (!dimacs.empty()) {
    if (n > 10) throw Unsupported("DIMACS export is limited to n <= 10");
    DimacsOptions d;
    d.forced_uncovered = s;
    std::ofstream f(dimacs, std::ios::binary);
    if (!f || !(f << emit_dimacs(n, d))) throw InvalidArgument("cannot write " + dimacs);
    out["dimacs"] = dimacs;
    emit(g, out);
    return kOk;
  }
  if (n > 5) throw Unsupported("enumeration is limited to n <= 5");

  json reps = json::array();
  auto sink = [&](const Matching& m, std::uint64_t orbit) {
    if (list) reps.push_back({{"matching", report::matching(m)}, {"orbit", orbit}});
  };
  auto counts_json = [](const EnumerationCounts& c) {
    return json{{"non_isomorphic", c.non_isomorphic}, {"with_duplicates", c.with_duplicates}};
  };
  if (!uncovered.empty()) {
    const EnumerationCounts c = maximal_matchings(n, s, sink);
    out["uncovered"] = report::vertices(n, s);
    out["maximal_matchings"] = counts_json(c);
    out["maximal_matchings"]["labeled"] = c.labeled;
  } else {
    const auto classes = uncovered_classes(n);
    auto class_json = [](const UncoveredClassCounts& c) {
      return json{{"independent", c.independent}, {"even_size", c.even_size}, {"realizable", c.realizable}};
    };
    out["uncovered_classes"] = {{"with_empty", class_json(count_classes(classes, true))},
                                {"without_empty", class_json(count_classes(classes, false))}};
    EnumerationCounts all, perfect;
    for (const UncoveredClass& c : classes) {
      if (!c.realizable) continue;
      const EnumerationCounts k = maximal_matchings(n, c.vertices, sink);
      all += k;
      if (c.vertices.empty()) perfect += k;
    }
    out["maximal_matchings"] = counts_json(all);
    out["perfect_matchings"] = counts_json(perfect);
  }
  if (list) out["representatives"] = reps;
  emit(g, out);
  return kOk;
}

// ---------------------------------------------------------------------------
// soak

int run_soak(const Globals& g, SoakOptions o) {
  o.construct = construct_options();
  const SoakReport r = soak(o);
  emit(g, report::soak_report(o, r));
  return r.problems.empty() ? kOk : kArtifact;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extend hypercube matchings to Hamilton cycles and paths, and verify the extension conditions."};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--threads", g.threads, "Worker threads for campaigns")->check(CLI::Range(1u, 1024u));
  app.add_flag("--timing", g.timing, "Include wall-clock seconds in campaign reports");
  app.add_option("-o,--output", g.output, "Write JSON here instead of stdout");

  std::function<int()> action;
  std::string file, second, us, vs;
  std::optional<int> d;

  auto* check = app.add_subcommand("check", "Decide whether a matching extends to a u-v Hamilton path");
  check->add_option("matching", file, "Matching file")->required();
  check->add_option("--u", us, "Path start (binary string)")->required();
  check->add_option("--v", vs, "Path end (binary string)")->required();
  check->add_option("--d", d, "Directions per subcube");
  check->callback([&] { action = [&] { return run_check(g, file, us, vs, d, false); }; });

  auto* ecycle = app.add_subcommand("extend-cycle", "Extend a matching to a Hamilton cycle");
  ecycle->add_option("matching", file, "Matching file")->required();
  ecycle->add_option("--d", d, "Directions per subcube");
  ecycle->callback([&] { action = [&] { return run_extend_cycle(g, file, d); }; });

  auto* epath = app.add_subcommand("extend-path", "Extend a matching to a u-v Hamilton path");
  epath->add_option("matching", file, "Matching file")->required();
  epath->add_option("--u", us, "Path start (binary string)")->required();
  epath->add_option("--v", vs, "Path end (binary string)")->required();
  epath->add_option("--d", d, "Directions per subcube");
  epath->callback([&] { action = [&] { return run_check(g, file, us, vs, d, true); }; });

  auto* validate = app.add_subcommand("validate", "Check a certificate against a matching");
  validate->add_option("certificate", file, "Certificate JSON")->required();
  validate->add_option("matching", second, "Matching file")->required();
  validate->add_option("--u", us, "Required path end");
  validate->add_option("--v", vs, "Required path end");
  validate->callback([&] { action = [&] { return run_validate(g, file, second, us, vs); }; });

  auto* verify = app.add_subcommand("verify", "Run a verification campaign");
  verify->require_subcommand(1);
  std::string resume;
  std::uint64_t budget = 0;
  bool progress = false;
  int dim = 0;
  auto campaign = [&](const char* name, const char* help, const char* dim_flag, CampaignKind kind) {
    auto* sub = verify->add_subcommand(name, help);
    sub->add_option(dim_flag, dim, "Cube dimension")->required();
    sub->add_option("--resume", resume, "Checkpoint file (JSON lines); finished units are skipped");
    sub->add_flag("--progress", progress, "Report finished units on stderr");
    if (kind == CampaignKind::necessity)
      sub->add_option("--pair-budget", budget, "At most this many pairs per unit (0 = all)");
    sub->callback([&, kind] { action = [&, kind] { return run_campaign(g, kind, dim, resume, budget, progress); }; });
  };
  campaign("cycle", "Maximal non-perfect matchings of Q_d extend to paths from an uncovered vertex to every opposite-parity vertex", "--d",
           CampaignKind::cycle_conjecture);
  campaign("path", "Two Hamilton paths for every C-free pair of every maximal matching of Q_d, plus one-edge-away instances", "--d",
           CampaignKind::path_conjecture);
  campaign("necessity", "Every pair under a C-condition admits no Hamilton path", "--n", CampaignKind::necessity);
  auto* bqn = verify->add_subcommand("bqn", "Certificate for the non-extendable matching of B(Q_n)");
  bqn->add_option("--n", dim, "Cube dimension (9..20)")->required();
  bqn->callback([&] { action = [&] { return run_bqn(g, dim); }; });

  auto* enumerate = app.add_subcommand("enum", "Enumerate maximal matchings up to isomorphism");
  int enum_n = 0;
  std::vector<std::string> uncovered;
  std::string dimacs;
  bool list = false;
  enumerate->add_option("--n", enum_n, "Cube dimension")->required();
  enumerate->add_option("--uncovered", uncovered, "Require exactly these uncovered vertices");
  enumerate->add_option("--dimacs", dimacs, "Write the CNF encoding here instead of enumerating");
  enumerate->add_flag("--list", list, "Include one representative per class");
  enumerate->callback([&] { action = [&] { return run_enum(g, enum_n, uncovered, dimacs, list); }; });

  auto* soak_cmd = app.add_subcommand("soak", "Validate constructions on seeded random instances");
  SoakOptions so;
  soak_cmd->add_option("--n", so.n, "Cube dimension")->required();
  soak_cmd->add_option("--d", so.d, "Directions spanned by the matchings")->capture_default_str();
  soak_cmd->add_option("--seed", so.seed, "Random seed")->capture_default_str();
  soak_cmd->add_option("--count", so.count, "Number of instances")->capture_default_str();
  soak_cmd->add_option("--cross-check", so.cross_check, "Compare the first K path verdicts with a direct search");
  soak_cmd->callback([&] { action = [&] { return run_soak(g, so); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    return action();
  } catch (const CounterexampleArtifact& e) {
    std::cerr << "hypermatch: counterexample artifact: " << e.what() << "\n";
    return kArtifact;
  } catch (const InvalidArgument& e) {
    std::cerr << "hypermatch: " << e.what() << "\n";
    return kUsage;
  } catch (const Unsupported& e) {
    std::cerr << "hypermatch: " << e.what() << "\n";
    return kUsage;
  } catch (const json::exception& e) {
    std::cerr << "hypermatch: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "hypermatch: internal error: " << e.what() << "\n";
    return kInternal;
  }
}
