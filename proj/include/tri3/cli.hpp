#pragma once

/// Command-line surface: one entry point dispatching to the library verbs
/// validate / info / census / homology / certify / aut / group-build, with
/// text and JSON output.  Everything here is presentation plumbing; no
/// computation happens outside the library calls.
///
/// Exit codes: 0 success, 1 domain error (bad input file, bad group table,
/// resource limit), 2 usage error (unknown verb or flag, malformed value).
/// All output is byte-deterministic for identical inputs and flags; every
/// JSON document carries "schema": 1 and serializes reals with 12
/// significant digits.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <tri3/census.hpp>
#include <tri3/core.hpp>
#include <tri3/geometry.hpp>
#include <tri3/group_builder.hpp>
#include <tri3/homology.hpp>
#include <tri3/orbits.hpp>
#include <tri3/polyhedron.hpp>
#include <tri3/snf.hpp>

namespace tri3::cli {

namespace detail {

using json = nlohmann::ordered_json;

inline const char* category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::syntax: return "syntax";
    case ErrorCategory::incomplete_gluing: return "incomplete_gluing";
    case ErrorCategory::non_involutive: return "non_involutive";
    case ErrorCategory::self_glued: return "self_glued";
    case ErrorCategory::disconnected: return "disconnected";
    case ErrorCategory::not_dualizable: return "not_dualizable";
    default: return "domain";
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good())
    throw Error(ErrorCategory::domain, "cannot open file `" + path + "`");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out.good())
    throw Error(ErrorCategory::domain, "cannot write file `" + path + "`");
  out << content;
  if (!out.good())
    throw Error(ErrorCategory::domain, "write failed for `" + path + "`");
}

/// Fixed-width significance for every real that leaves the program: format
/// with 12 significant digits, in the shortest form %g chooses.
inline std::string real12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

/// The double carrying exactly the 12 significant digits of real12(x), so a
/// JSON emitter can never print more digits than the textual form shows.
inline double round12(double x) { return std::strtod(real12(x).c_str(), nullptr); }

inline json group_json(const AbelianGroup& g) {
  json j;
  j["rank"] = g.rank;
  j["torsion"] = json::array();
  for (const Integer& d : g.torsion) j["torsion"].push_back(d.convert_to<long long>());
  return j;
}

/// One line per signature in text listings: the serialize text with its
/// newlines replaced by " ; " (no token of the format contains either
/// character, so the original is recovered by splitting on " ; ").
inline std::string flatten_signature(std::string sig) {
  while (!sig.empty() && sig.back() == '\n') sig.pop_back();
  std::string out;
  out.reserve(sig.size() + 16);
  for (const char c : sig) {
    if (c == '\n')
      out += " ; ";
    else
      out += c;
  }
  return out;
}

inline const char* bool_name(bool b) { return b ? "true" : "false"; }

/// Emits a finished JSON document (with trailing newline) or writes a text
/// block, honouring the --out redirection.
struct Sink {
  std::ostream& stream;
  std::string out_path;  // empty: write to the stream

  void deliver(const std::string& content) const {
    if (out_path.empty())
      stream << content;
    else
      write_text_file(out_path, content);
  }
};

inline std::string finish(const json& doc) { return doc.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Per-verb documents.  Text and JSON renderings share the same library calls.

struct TriangulationInput {
  Triangulation tri;
  EdgeClassification ec;
};

inline TriangulationInput load_triangulation(const std::string& path,
                                             std::uint64_t seed) {
  TriangulationInput in{Triangulation::parse(read_text_file(path)), {}};
  in.ec = edge_classes(in.tri, WalkOptions{seed});
  return in;
}

inline int run_validate(const TriangulationInput& in, bool json_format,
                        const Sink& sink) {
  const bool manifold = is_manifold(in.ec).manifold;
  if (json_format) {
    json doc;
    doc["schema"] = 1;
    doc["valid"] = true;
    doc["n"] = in.tri.size();
    doc["manifold"] = manifold;
    sink.deliver(finish(doc));
  } else {
    sink.deliver("valid, n=" + std::to_string(in.tri.size()) +
                 ", manifold=" + bool_name(manifold) + "\n");
  }
  return 0;
}

inline json info_document(const TriangulationInput& in) {
  const Triangulation& t = in.tri;
  const EdgeClassification& ec = in.ec;
  const VolumeReport vr = volume_report(t, ec);
  const std::vector<VertexLink> links = vertex_links(t);
  const std::vector<CuspShape> cusps = cusp_shapes(t, ec);
  const AbelianGroup h1 = h1_double(t, ec);
  const Certificate cert = certify(t, ec);
  const IsomGroupReport aut = automorphisms(t, ec);

  json doc;
  doc["schema"] = 1;
  doc["n"] = vr.n;
  doc["genus"] = vr.genus;
  doc["vol_N"] = round12(vr.vol_N);
  doc["vol_D"] = round12(vr.vol_D);
  doc["pm_complexity"] = vr.pm_complexity;
  doc["manifold"] = is_manifold(ec).manifold;
  doc["edge_classes"] = json::array();
  for (const EdgeClass& c : ec.classes) {
    json e;
    e["id"] = c.id;
    e["valence"] = c.valence;
    e["orientable"] = c.orientable;
    doc["edge_classes"].push_back(std::move(e));
  }
  doc["vertex_links"] = json::array();
  for (const VertexLink& l : links) {
    json v;
    v["id"] = l.id;
    v["euler_characteristic"] = l.euler_characteristic;
    v["orientable"] = l.orientable;
    v["genus"] = l.genus;
    doc["vertex_links"].push_back(std::move(v));
  }
  doc["cusps"] = json::array();
  for (const CuspShape& c : cusps) {
    json s;
    s["valence"] = c.valence;
    s["orientable"] = c.orientable;
    s["area"] = round12(c.area);
    s["shape"] = to_string(c.shape_kind);
    doc["cusps"].push_back(std::move(s));
  }
  doc["h1_double"] = group_json(h1);
  json c;
  c["kind"] = to_string(cert.kind);
  c["claims"] = json::array();
  for (const CertificateClaim& claim : cert.claims) {
    json cl;
    cl["id"] = claim.id;
    cl["statement"] = claim.statement;
    c["claims"].push_back(std::move(cl));
  }
  doc["certificate"] = std::move(c);
  json a;
  a["aut_order"] = aut.aut_order;
  a["isom_plus_order"] = aut.isom_plus_order;
  a["isom_order"] = aut.isom_order;
  a["exceptional_flag"] = aut.exceptional_flag;
  a["valid"] = aut.valid;
  doc["aut"] = std::move(a);
  return doc;
}

inline int run_info(const TriangulationInput& in, bool json_format,
                    const Sink& sink) {
  if (json_format) {
    sink.deliver(finish(info_document(in)));
    return 0;
  }
  const VolumeReport vr = volume_report(in.tri, in.ec);
  const Certificate cert = certify(in.tri, in.ec);
  const IsomGroupReport aut = automorphisms(in.tri, in.ec);
  std::string text;
  text += "n: " + std::to_string(vr.n) + "\n";
  text += "manifold: " + std::string(bool_name(is_manifold(in.ec).manifold)) + "\n";
  text += "genus: " + std::to_string(vr.genus) + "\n";
  text += "vol_N: " + real12(vr.vol_N) + "\n";
  text += "vol_D: " + real12(vr.vol_D) + "\n";
  text += "pm_complexity: " + std::to_string(vr.pm_complexity) + "\n";
  text += "edge_classes:\n";
  for (const EdgeClass& c : in.ec.classes)
    text += "  " + std::to_string(c.id) + ": valence " + std::to_string(c.valence) +
            (c.orientable ? ", orientable" : ", non-orientable") + "\n";
  text += "vertex_links:\n";
  for (const VertexLink& l : vertex_links(in.tri))
    text += "  " + std::to_string(l.id) +
            ": euler " + std::to_string(l.euler_characteristic) +
            (l.orientable ? ", orientable, genus " : ", non-orientable, cross-caps ") +
            std::to_string(l.genus) + "\n";
  text += "cusps:\n";
  for (const CuspShape& c : cusp_shapes(in.tri, in.ec))
    text += "  " + std::to_string(c.edge_class) + ": " +
            to_string(c.shape_kind) + ", area " + real12(c.area) +
            ", valence " + std::to_string(c.valence) + "\n";
  text += "h1_double: " + h1_double(in.tri, in.ec).to_string() + "\n";
  text += "certificate: " + std::string(to_string(cert.kind)) +
          ", min_valence " + std::to_string(cert.min_valence) + "\n";
  text += "aut_order: " + std::to_string(aut.aut_order) + "\n";
  sink.deliver(text);
  return 0;
}

inline int run_homology(const TriangulationInput& in, bool json_format,
                        const Sink& sink) {
  const AbelianGroup dbl = h1_double(in.tri, in.ec);
  const AbelianGroup fill = h1_meridinal_filling(in.tri);
  if (json_format) {
    json doc;
    doc["schema"] = 1;
    doc["h1_double"] = group_json(dbl);
    doc["h1_meridinal_filling"] = group_json(fill);
    sink.deliver(finish(doc));
  } else {
    sink.deliver("h1_double: " + dbl.to_string() + "\n" +
                 "h1_meridinal_filling: " + fill.to_string() + "\n");
  }
  return 0;
}

inline int run_certify(const TriangulationInput& in, bool json_format,
                       const Sink& sink) {
  const Certificate cert = certify(in.tri, in.ec);
  if (json_format) {
    json doc;
    doc["schema"] = 1;
    doc["kind"] = to_string(cert.kind);
    doc["min_valence"] = cert.min_valence;
    doc["claims"] = json::array();
    for (const CertificateClaim& claim : cert.claims) {
      json cl;
      cl["id"] = claim.id;
      cl["statement"] = claim.statement;
      doc["claims"].push_back(std::move(cl));
    }
    doc["cusps"] = json::array();
    for (const CertificateCusp& c : cert.cusps) {
      json cu;
      cu["edge_class"] = c.edge_class;
      cu["valence"] = c.valence;
      cu["nonmeridinal_bound"] = round12(c.nonmeridinal_bound);
      doc["cusps"].push_back(std::move(cu));
    }
    doc["angle_assignment"] = json::array();
    for (const double a : cert.angle_assignment)
      doc["angle_assignment"].push_back(round12(a));
    doc["vertex_sums"] = json::array();
    for (const auto& sums : cert.vertex_sums) {
      json row = json::array();
      for (const double s : sums) row.push_back(round12(s));
      doc["vertex_sums"].push_back(std::move(row));
    }
    sink.deliver(finish(doc));
  } else {
    std::string text;
    text += "kind: " + std::string(to_string(cert.kind)) + "\n";
    text += "min_valence: " + std::to_string(cert.min_valence) + "\n";
    if (cert.claims.empty()) {
      text += "claims: none\n";
    } else {
      text += "claims:\n";
      for (const CertificateClaim& claim : cert.claims)
        text += "  " + claim.id + ": " + claim.statement + "\n";
    }
    sink.deliver(text);
  }
  return 0;
}

inline int run_aut(const TriangulationInput& in, bool json_format,
                   const Sink& sink) {
  const IsomGroupReport rep = automorphisms(in.tri, in.ec);
  if (json_format) {
    json doc;
    doc["schema"] = 1;
    doc["aut_order"] = rep.aut_order;
    doc["isom_plus_order"] = rep.isom_plus_order;
    doc["isom_order"] = rep.isom_order;
    doc["exceptional_flag"] = rep.exceptional_flag;
    doc["valid"] = rep.valid;
    sink.deliver(finish(doc));
  } else {
    std::string text;
    text += "aut_order: " + std::to_string(rep.aut_order) + "\n";
    text += "isom_plus_order: " + std::to_string(rep.isom_plus_order) + "\n";
    text += "isom_order: " + std::to_string(rep.isom_order) + "\n";
    text += "exceptional_flag: " + std::string(bool_name(rep.exceptional_flag)) + "\n";
    text += "valid: " + std::string(bool_name(rep.valid)) + "\n";
    sink.deliver(text);
  }
  return 0;
}

struct CensusFlags {
  int n = 1;
  bool manifold_only = false;
  int min_valence = 0;
  bool count_only = false;
  int jobs = 1;
  std::size_t limit = 0;
};

inline int run_census(const CensusFlags& flags, bool json_format,
                      const Sink& sink, std::ostream& err) {
  CensusOptions opts;
  opts.jobs = flags.jobs;
  opts.limit = flags.limit;
  if (flags.manifold_only || flags.min_valence > 0) {
    const bool want_manifold = flags.manifold_only;
    const int want_valence = flags.min_valence;
    opts.filter = [want_manifold, want_valence](const Triangulation& T) {
      const EdgeClassification ec = edge_classes(T);
      if (want_manifold && !is_manifold(ec).manifold) return false;
      return ec.min_valence() >= want_valence;
    };
  }
  const CensusResult result = enumerate_census(flags.n, opts);
  if (result.truncated)
    err << "warning: census truncated after " << result.classes.size()
        << " classes (limit " << flags.limit << ")\n";

  if (json_format) {
    json doc;
    doc["schema"] = 1;
    doc["n"] = flags.n;
    doc["count"] = result.classes.size();
    doc["truncated"] = result.truncated;
    if (!flags.count_only) {
      doc["classes"] = json::array();
      for (const CanonicalForm& c : result.classes) {
        const Triangulation& T = c.representative;
        const EdgeClassification ec = edge_classes(T);
        json rec;
        rec["signature"] = c.signature;
        rec["manifold"] = is_manifold(ec).manifold;
        rec["min_valence"] = ec.min_valence();
        rec["valences"] = json::array();
        rec["orientable"] = json::array();
        for (const EdgeClass& e : ec.classes) {
          rec["valences"].push_back(e.valence);
          rec["orientable"].push_back(e.orientable);
        }
        rec["h1_double"] = group_json(h1_double(T, ec));
        rec["aut_order"] = automorphisms(T, ec).aut_order;
        doc["classes"].push_back(std::move(rec));
      }
    }
    sink.deliver(finish(doc));
  } else if (flags.count_only) {
    sink.deliver(std::to_string(result.classes.size()) + "\n");
  } else {
    std::string text;
    for (const CanonicalForm& c : result.classes)
      text += flatten_signature(c.signature) + "\n";
    sink.deliver(text);
  }
  return 0;
}

struct GroupBuildFlags {
  std::string spec;
  std::string out_tri;      // --out: write the realized triangulation here
  std::string report_path;  // --report: write the JSON report here
  std::size_t max_complexity = RealizeOptions{}.max_complexity;
};

inline bool is_builtin_group(const std::string& spec) {
  return spec == "trivial" || spec.rfind("cyclic:", 0) == 0 ||
         spec.rfind("sym:", 0) == 0;
}

inline int run_group_build(const GroupBuildFlags& flags, bool json_format,
                           const Sink& sink) {
  const FiniteGroupTable table =
      is_builtin_group(flags.spec)
          ? FiniteGroupTable::named(flags.spec)
          : FiniteGroupTable::parse(read_text_file(flags.spec));
  const RealizedGroup realized =
      realize_group(table, RealizeOptions{flags.max_complexity});
  const RealizeReport& r = realized.report;

  if (!flags.out_tri.empty())
    write_text_file(flags.out_tri, realized.tri.serialize());

  json doc;
  doc["schema"] = 1;
  doc["group_order"] = table.order();
  doc["spine_size"] = r.spine_size;
  doc["bubbled_size"] = r.bubbled_size;
  doc["curled_size"] = r.curled_size;
  doc["cover_size"] = r.cover_size;
  doc["complexity_constant"] = round12(r.complexity_constant);
  doc["aut_order"] = r.aut_order;
  doc["vol_double"] = round12(r.vol_double);
  if (!flags.report_path.empty()) write_text_file(flags.report_path, finish(doc));

  if (json_format) {
    sink.deliver(finish(doc));
  } else {
    std::string text;
    text += "group_order: " + std::to_string(table.order()) + "\n";
    text += "spine_size: " + std::to_string(r.spine_size) + "\n";
    text += "bubbled_size: " + std::to_string(r.bubbled_size) + "\n";
    text += "curled_size: " + std::to_string(r.curled_size) + "\n";
    text += "cover_size: " + std::to_string(r.cover_size) + "\n";
    text += "complexity_constant: " + real12(r.complexity_constant) + "\n";
    text += "aut_order: " + std::to_string(r.aut_order) + "\n";
    text += "vol_double: " + real12(r.vol_double) + "\n";
    sink.deliver(text);
  }
  return 0;
}

}  // namespace detail

/// Parses the argument list (program name excluded) and runs one verb.
/// Returns the process exit code; normal output goes to `out`, usage and
/// domain errors to `err`.
inline int run(std::vector<std::string> args, std::ostream& out,
               std::ostream& err) {
  using detail::CensusFlags;
  using detail::GroupBuildFlags;

  CLI::App app{"triangulations, handlebody neighborhoods and their doubles"};
  app.name("tri3");
  app.require_subcommand(1);

  std::string format = "text";
  std::uint64_t seed = 0;
  std::string out_path;
  const auto add_common = [&](CLI::App* sub, bool with_out) {
    sub->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
    sub->add_option("--seed", seed,
                    "tie-break seed for the edge walks (results never depend on it)");
    if (with_out) sub->add_option("--out", out_path, "write the output here instead of stdout");
  };

  std::string input_path;
  CLI::App* validate = app.add_subcommand("validate", "parse and check a TRI file");
  validate->add_option("file", input_path, "TRI file")->required();
  add_common(validate, false);

  CLI::App* info = app.add_subcommand(
      "info", "full invariant report: volumes, cusps, homology, automorphisms");
  info->add_option("file", input_path, "TRI file")->required();
  add_common(info, false);

  CLI::App* homology = app.add_subcommand(
      "homology", "first homology of the double and of its meridinal filling");
  homology->add_option("file", input_path, "TRI file")->required();
  add_common(homology, false);

  CLI::App* certify =
      app.add_subcommand("certify", "valence-based hyperbolicity certificate");
  certify->add_option("file", input_path, "TRI file")->required();
  add_common(certify, false);

  CLI::App* aut = app.add_subcommand("aut", "combinatorial automorphism group");
  aut->add_option("file", input_path, "TRI file")->required();
  add_common(aut, false);

  CensusFlags census_flags;
  CLI::App* census = app.add_subcommand(
      "census", "enumerate equivalence classes of gluings on n tetrahedra");
  census->add_option("n", census_flags.n, "tetrahedron count")
      ->required()
      ->check(CLI::Range(1, 6));
  census->add_flag("--manifold", census_flags.manifold_only,
                   "keep only gluings whose vertex links are all spheres");
  census->add_option("--min-valence", census_flags.min_valence,
                     "keep only gluings with every edge valence at least k")
      ->check(CLI::NonNegativeNumber);
  census->add_flag("--count-only", census_flags.count_only,
                   "print only the class count");
  census->add_option("--jobs", census_flags.jobs, "worker threads")
      ->check(CLI::Range(1, 64));
  census->add_option("--limit", census_flags.limit,
                     "stop after this many classes (truncation is reported)");
  add_common(census, true);

  GroupBuildFlags group_flags;
  CLI::App* group_build = app.add_subcommand(
      "group-build",
      "realize a finite group as the automorphism group of a triangulation");
  group_build
      ->add_option("spec", group_flags.spec,
                   "trivial, cyclic:<m>, sym:<k>, or a group table file")
      ->required();
  group_build->add_option("--out", group_flags.out_tri,
                          "write the realized triangulation to this TRI file");
  group_build->add_option("--report", group_flags.report_path,
                          "write the JSON report to this file");
  group_build->add_option("--max-complexity", group_flags.max_complexity,
                          "refuse pipelines needing more tetrahedra than this")
      ->capture_default_str();
  group_build->add_option("--format", format, "output format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();

  std::reverse(args.begin(), args.end());  // CLI11's vector overload pops from the back
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  const bool json_format = format == "json";
  const detail::Sink sink{out, out_path};
  try {
    if (*census) return detail::run_census(census_flags, json_format, sink, err);
    if (*group_build)
      return detail::run_group_build(group_flags, json_format, sink);
    const detail::TriangulationInput in =
        detail::load_triangulation(input_path, seed);
    if (*validate) return detail::run_validate(in, json_format, sink);
    if (*info) return detail::run_info(in, json_format, sink);
    if (*homology) return detail::run_homology(in, json_format, sink);
    if (*certify) return detail::run_certify(in, json_format, sink);
    if (*aut) return detail::run_aut(in, json_format, sink);
  } catch (const Error& e) {
    err << "error: [" << detail::category_name(e.category()) << "] " << e.what()
        << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: [domain] " << e.what() << "\n";
    return 1;
  }
  err << "usage error: no verb selected\n";
  return 2;
}

}  // namespace tri3::cli
