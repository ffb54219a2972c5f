#pragma once

/// Triangulations with a prescribed symmetry group.  Starting from the
/// multiplication table of a finite group G, the pipeline builds a compact
/// 2-polyhedron with fundamental group G (a surface carrying one closed curve
/// per multiplication-table entry, with discs attached), removes its bad
/// vertices by grafting a pillow into every graph edge, breaks all unwanted
/// symmetry by grafting a graded number of kinks onto every edge, and passes
/// to the G-cover described by voltages on the graph.  Dualizing the cover
/// yields a triangulation whose combinatorial automorphism group is exactly
/// G, which realize_group verifies by exhaustive search before returning.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

#include <tri3/census.hpp>
#include <tri3/core.hpp>
#include <tri3/geometry.hpp>
#include <tri3/orbits.hpp>
#include <tri3/polyhedron.hpp>
#include <tri3/snf.hpp>

namespace tri3 {

/// A finite group given by its multiplication table.  Elements are the
/// indices 0..order-1 and element 0 is the identity.  The constructor checks
/// the group axioms and rejects anything that fails them.
class FiniteGroupTable {
 public:
  explicit FiniteGroupTable(std::vector<std::vector<int>> table)
      : table_(std::move(table)) {
    validate();
  }

  int order() const { return static_cast<int>(table_.size()); }

  int mul(int a, int b) const {
    return table_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
  }

  int inverse(int a) const { return inverse_[static_cast<std::size_t>(a)]; }

  bool abelian() const {
    for (int a = 0; a < order(); ++a)
      for (int b = a + 1; b < order(); ++b)
        if (mul(a, b) != mul(b, a)) return false;
    return true;
  }

  /// The abelianization, computed from the presentation whose generators are
  /// all elements and whose relations are the table entries.
  AbelianGroup abelianization() const {
    const std::size_t m = static_cast<std::size_t>(order());
    IntegerMatrix rel(m, m * m);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) {
        const std::size_t col = a * m + b;
        rel(a, col) += 1;
        rel(b, col) += 1;
        rel(static_cast<std::size_t>(mul(static_cast<int>(a), static_cast<int>(b))), col) -= 1;
      }
    return cokernel(rel);
  }

  static FiniteGroupTable trivial() { return cyclic(1); }

  static FiniteGroupTable cyclic(int m) {
    if (m < 1) throw Error(ErrorCategory::domain, "cyclic group needs order at least 1");
    std::vector<std::vector<int>> t(static_cast<std::size_t>(m),
                                    std::vector<int>(static_cast<std::size_t>(m)));
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) t[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = (a + b) % m;
    return FiniteGroupTable(std::move(t));
  }

  /// The symmetric group on k symbols, elements indexed by the lexicographic
  /// rank of their one-line notation (so index 0 is the identity).
  static FiniteGroupTable symmetric(int k) {
    if (k < 1 || k > 6)
      throw Error(ErrorCategory::domain, "symmetric group supported for 1 to 6 symbols");
    std::vector<std::vector<int>> lines;
    std::vector<int> base(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) base[static_cast<std::size_t>(i)] = i;
    std::vector<int> line = base;
    do {
      lines.push_back(line);
    } while (std::next_permutation(line.begin(), line.end()));
    const auto rank_of = [&lines](const std::vector<int>& p) {
      const auto it = std::lower_bound(lines.begin(), lines.end(), p);
      return static_cast<int>(it - lines.begin());
    };
    const std::size_t m = lines.size();
    std::vector<std::vector<int>> t(m, std::vector<int>(m));
    std::vector<int> composed(static_cast<std::size_t>(k));
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) {
        for (int i = 0; i < k; ++i)
          composed[static_cast<std::size_t>(i)] =
              lines[a][static_cast<std::size_t>(lines[b][static_cast<std::size_t>(i)])];
        t[a][b] = rank_of(composed);
      }
    return FiniteGroupTable(std::move(t));
  }

  /// Text form: a `group <m>` header followed by the m rows of the table.
  /// `%` starts a comment, as in the TRI format.
  static FiniteGroupTable parse(const std::string& text) {
    std::string stripped;
    stripped.reserve(text.size());
    bool comment = false;
    for (const char c : text) {
      if (c == '%') comment = true;
      if (c == '\n') comment = false;
      stripped.push_back(comment ? ' ' : c);
    }
    std::istringstream in(stripped);
    std::string keyword;
    if (!(in >> keyword) || keyword != "group")
      throw Error(ErrorCategory::syntax, "group table must start with a `group <m>` header");
    long long m = 0;
    if (!(in >> m) || m < 1)
      throw Error(ErrorCategory::syntax, "group header needs a positive order");
    std::vector<std::vector<int>> t(static_cast<std::size_t>(m),
                                    std::vector<int>(static_cast<std::size_t>(m)));
    for (auto& row : t)
      for (int& cell : row)
        if (!(in >> cell))
          throw Error(ErrorCategory::syntax, "group table is shorter than its header promises");
    std::string extra;
    if (in >> extra)
      throw Error(ErrorCategory::syntax, "trailing tokens after the group table");
    return FiniteGroupTable(std::move(t));
  }

  /// Built-in names: "trivial", "cyclic:<m>", "sym:<k>".
  static FiniteGroupTable named(const std::string& spec) {
    if (spec == "trivial") return trivial();
    const auto parse_arg = [&spec](const std::string& prefix) -> std::optional<int> {
      if (spec.rfind(prefix, 0) != 0) return std::nullopt;
      const std::string arg = spec.substr(prefix.size());
      if (arg.empty() || arg.find_first_not_of("0123456789") != std::string::npos)
        throw Error(ErrorCategory::domain, "malformed group name `" + spec + "`");
      return std::stoi(arg);
    };
    if (const auto m = parse_arg("cyclic:")) return cyclic(*m);
    if (const auto k = parse_arg("sym:")) return symmetric(*k);
    throw Error(ErrorCategory::domain,
                "unknown group name `" + spec +
                    "` (expected trivial, cyclic:<m> or sym:<k>)");
  }

 private:
  void validate() {
    const int m = order();
    if (m < 1) throw Error(ErrorCategory::domain, "group table is empty");
    for (const auto& row : table_) {
      if (static_cast<int>(row.size()) != m)
        throw Error(ErrorCategory::domain, "group table is not square");
      for (const int x : row)
        if (x < 0 || x >= m)
          throw Error(ErrorCategory::domain, "group table entry out of range");
    }
    for (int a = 0; a < m; ++a)
      if (mul(0, a) != a || mul(a, 0) != a)
        throw Error(ErrorCategory::domain, "element 0 is not an identity");
    inverse_.assign(static_cast<std::size_t>(m), -1);
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b)
        if (mul(a, b) == 0 && mul(b, a) == 0) {
          inverse_[static_cast<std::size_t>(a)] = b;
          break;
        }
      if (inverse_[static_cast<std::size_t>(a)] < 0)
        throw Error(ErrorCategory::domain,
                    "element " + std::to_string(a) + " has no inverse");
    }
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int c = 0; c < m; ++c)
          if (mul(mul(a, b), c) != mul(a, mul(b, c)))
            throw Error(ErrorCategory::domain, "multiplication is not associative");
  }

  std::vector<std::vector<int>> table_;
  std::vector<int> inverse_;
};

/// One letter of a relator word: a group element used as a generator, read
/// inverted when `inverted` is set.
struct PresentationLetter {
  int element = 0;
  bool inverted = false;

  friend bool operator==(const PresentationLetter&, const PresentationLetter&) = default;
};

/// The multiplication-table presentation of a finite group: one generator
/// per non-identity element, and for every ordered pair (a, b) of
/// non-identity elements the relator a b (ab)^-1 — shortened to a b when
/// ab is the identity.
struct TrivialPresentation {
  int order = 0;
  std::vector<int> generators;                            ///< elements 1..m-1
  std::vector<std::vector<PresentationLetter>> relators;  ///< (m-1)^2 words
};

inline TrivialPresentation trivial_presentation(const FiniteGroupTable& g) {
  TrivialPresentation p;
  p.order = g.order();
  for (int a = 1; a < g.order(); ++a) p.generators.push_back(a);
  for (int a = 1; a < g.order(); ++a)
    for (int b = 1; b < g.order(); ++b) {
      std::vector<PresentationLetter> word{{a, false}, {b, false}};
      if (const int c = g.mul(a, b); c != 0) word.push_back({c, true});
      p.relators.push_back(std::move(word));
    }
  return p;
}

/// A pipeline stage: a special polyhedron carried redundantly as its dual
/// triangulation plus the polyhedron view, with the markings the later
/// stages read.  Graph vertices and edges are indexed as in `polyhedron`
/// (vertices = dual tetrahedra, edges = face classes of the dual in id
/// order); `voltage[e]` is the group element picked up crossing edge e from
/// ends[0] to ends[1].
struct MarkedPolyhedron {
  Triangulation dual{1};
  SpecialPolyhedron polyhedron;
  std::vector<char> bad_vertex;  ///< vertex has an edge with both ends on it
  std::vector<int> curl_count;   ///< kinks grafted onto the edge's ancestor
  std::vector<int> voltage;      ///< group element per edge, read ends[0] -> ends[1]
};

namespace detail {

inline std::vector<char> self_glued_tets(const Triangulation& t) {
  std::vector<char> bad(static_cast<std::size_t>(t.size()), 0);
  for (int tet = 0; tet < t.size(); ++tet)
    for (int f = 0; f < 4; ++f) {
      const FaceEnd fe{tet, f};
      if (t.is_glued(fe) && t.gluing(fe).to.tet == tet)
        bad[static_cast<std::size_t>(tet)] = 1;
    }
  return bad;
}

/// Marks recorded while a stage is being glued, keyed by the smaller face
/// end of each pairing; voltages are read out of that end.
struct EdgeMarks {
  int voltage = 0;
  int curls = 0;
};

inline MarkedPolyhedron assemble_marked(Triangulation t,
                                        const std::map<FaceEnd, EdgeMarks>& marks) {
  const EdgeClassification ec = edge_classes(t);
  MarkedPolyhedron out;
  out.polyhedron = dual_polyhedron(t, ec);
  out.bad_vertex = self_glued_tets(t);
  out.voltage.assign(ec.face_classes.size(), 0);
  out.curl_count.assign(ec.face_classes.size(), 0);
  for (const FaceClass& fc : ec.face_classes)
    if (const auto it = marks.find(fc.lo); it != marks.end()) {
      out.voltage[static_cast<std::size_t>(fc.id)] = it->second.voltage;
      out.curl_count[static_cast<std::size_t>(fc.id)] = it->second.curls;
    }
  out.dual = std::move(t);
  return out;
}

}  // namespace detail

/// Checks the cover-readiness of the voltages: every closed region word must
/// multiply to the identity, so that the discs lift to the derived cover.
inline void verify_voltages(const MarkedPolyhedron& p, const FiniteGroupTable& g) {
  if (p.voltage.size() != p.polyhedron.graph_edges.size())
    throw Error(ErrorCategory::domain, "voltage array does not match the graph edges");
  for (const int v : p.voltage)
    if (v < 0 || v >= g.order())
      throw Error(ErrorCategory::domain, "voltage is not a group element");
  for (std::size_t r = 0; r < p.polyhedron.regions.size(); ++r) {
    const PolyhedronRegion& region = p.polyhedron.regions[r];
    if (region.open) continue;
    int prod = 0;
    for (const auto& [edge, sign] : region.word) {
      const int v = p.voltage[static_cast<std::size_t>(edge)];
      prod = g.mul(prod, sign > 0 ? v : g.inverse(v));
    }
    if (prod != 0)
      throw Error(ErrorCategory::domain,
                  "region " + std::to_string(r) + " has voltage product " +
                      std::to_string(prod) + ", expected the identity");
  }
}

/// The length of the longest simple path in the singular graph that starts
/// at the given good vertex along the given edge and meets bad vertices
/// everywhere after the start.  An edge leading straight to a good vertex
/// contributes no such path, so its value is 0.
inline int lambda(const MarkedPolyhedron& p, int vertex, int edge) {
  const int n = p.polyhedron.graph_vertices;
  if (vertex < 0 || vertex >= n)
    throw Error(ErrorCategory::domain, "lambda: vertex out of range");
  if (edge < 0 || edge >= static_cast<int>(p.polyhedron.graph_edges.size()))
    throw Error(ErrorCategory::domain, "lambda: edge out of range");
  if (p.bad_vertex[static_cast<std::size_t>(vertex)])
    throw Error(ErrorCategory::domain, "lambda is defined at good vertices only");
  const PolyhedronEdge& e0 = p.polyhedron.graph_edges[static_cast<std::size_t>(edge)];
  if (e0.ends[0] != vertex && e0.ends[1] != vertex)
    throw Error(ErrorCategory::domain, "lambda: edge is not incident to the vertex");

  std::vector<std::vector<std::pair<int, int>>> incident(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < p.polyhedron.graph_edges.size(); ++i) {
    const PolyhedronEdge& e = p.polyhedron.graph_edges[i];
    incident[static_cast<std::size_t>(e.ends[0])].emplace_back(static_cast<int>(i), e.ends[1]);
    if (e.ends[1] != e.ends[0])
      incident[static_cast<std::size_t>(e.ends[1])].emplace_back(static_cast<int>(i), e.ends[0]);
  }
  std::vector<char> visited(static_cast<std::size_t>(n), 0);
  const auto extend = [&](const auto& self, int at) -> int {
    int best = 0;
    for (const auto& [e, other] : incident[static_cast<std::size_t>(at)]) {
      if (visited[static_cast<std::size_t>(other)]) continue;
      if (!p.bad_vertex[static_cast<std::size_t>(other)]) continue;
      visited[static_cast<std::size_t>(other)] = 1;
      best = std::max(best, 1 + self(self, other));
      visited[static_cast<std::size_t>(other)] = 0;
    }
    return best;
  };
  const int first = e0.ends[0] == vertex ? e0.ends[1] : e0.ends[0];
  if (!p.bad_vertex[static_cast<std::size_t>(first)]) return 0;
  visited[static_cast<std::size_t>(vertex)] = 1;
  visited[static_cast<std::size_t>(first)] = 1;
  return 1 + extend(extend, first);
}

namespace detail {

// --- the curve arrangement behind build_Q -------------------------------
//
// The stage-one polyhedron for a group of order m >= 2 is built on a closed
// orientable surface with m-1 handles attached to a central sphere.  One
// meridian circle rings each handle and bounds a disc inside it; one closed
// curve per relator of the multiplication-table presentation runs through
// the handles its letters name, and bounds a disc outside the surface.  The
// sphere is drawn as the region above the parabola y = x^2: each handle end
// occupies a cluster of integer stations on the parabola, the curves cross
// the sphere along straight chords between stations, and all incidences are
// computed in exact rational arithmetic.  Dualizing every crossing into a
// tetrahedron with one face per curve germ gives the triangulation.

using Rational = boost::rational<Integer>;

struct RatPoint {
  Rational x, y;
};

inline Rational cross(const RatPoint& o, const RatPoint& a, const RatPoint& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// boost::rational's mixed-type comparisons recurse for multiprecision
// integers, so all sign tests go through the numerator (the denominator is
// kept positive by the class invariant)
inline int sign_of(const Rational& r) { return r.numerator().sign(); }

struct ArrangementDegenerate {};

struct Passage {
  int relator = 0;
  int position = 0;          ///< letter index within the relator
  int handle = 0;
  bool forward = false;      ///< false: the letter is inverted
  int index_in_handle = 0;
};

struct ChordCrossingRef {
  Rational along;   ///< parameter of the crossing along the chord's travel
  int crossing = 0; ///< crossing id
  bool as_alpha = false;  ///< whether this chord is the alpha strand there

  friend bool operator<(const ChordCrossingRef& a, const ChordCrossingRef& b) {
    return a.along < b.along;
  }
};

struct Crossing {
  // Germ slots, fixed once and for all: 0 = alpha out, 1 = alpha in,
  // 2 = beta out, 3 = beta in.  `rotation` lists them in counterclockwise
  // order around the crossing for the chosen surface orientation.
  std::array<int, 4> rotation{};
  bool tube = false;   ///< beta is a handle meridian
  int handle = -1;
  bool forward = true; ///< tube only: the passage runs entry-to-exit
};

/// A stop on a closed strand: which crossing it meets next and through which
/// germ slots it enters and leaves.
struct StrandStop {
  int crossing = 0;
  int in_face = 0;
  int out_face = 0;
};

constexpr std::array<int, 4> kRotationPositive{0, 2, 1, 3};
constexpr std::array<int, 4> kRotationNegative{0, 3, 1, 2};

/// The two labels of {0,1,2,3} missing from {a, b}.
inline std::array<int, 2> complement_pair(int a, int b) {
  std::array<int, 2> out{};
  int k = 0;
  for (int v = 0; v < 4; ++v)
    if (v != a && v != b) out[static_cast<std::size_t>(k++)] = v;
  return out;
}

/// The three flanking strips of a germ, as vertex pairs of the germ's face:
/// the wing of the germ's own strand plus the left and right surface strips
/// relative to the travel direction.
struct GermFrame {
  std::array<int, 2> wing{}, left{}, right{};
};

inline GermFrame germ_frame(const std::array<int, 4>& rotation, int germ, bool outgoing) {
  int pos = 0;
  while (rotation[static_cast<std::size_t>(pos)] != germ) ++pos;
  const int next = rotation[static_cast<std::size_t>((pos + 1) % 4)];
  const int prev = rotation[static_cast<std::size_t>((pos + 3) % 4)];
  GermFrame f;
  const int partner = germ ^ 1;  // 0<->1, 2<->3: the strand's other germ
  f.wing = complement_pair(germ, partner);
  if (outgoing) {
    f.left = complement_pair(germ, next);
    f.right = complement_pair(prev, germ);
  } else {
    f.left = complement_pair(prev, germ);
    f.right = complement_pair(germ, next);
  }
  return f;
}

/// The vertex-label matching across an arc: wing to wing, left to left,
/// right to right, face to face.
inline Perm4 arc_perm(const GermFrame& from, int from_face, const GermFrame& to, int to_face) {
  const std::array<std::array<int, 2>, 3> src{from.wing, from.left, from.right};
  const std::array<std::array<int, 2>, 3> dst{to.wing, to.left, to.right};
  std::array<int, 4> image{-1, -1, -1, -1};
  image[static_cast<std::size_t>(from_face)] = to_face;
  for (int v = 0; v < 4; ++v) {
    if (v == from_face) continue;
    std::array<int, 2> hits{-1, -1};
    int k = 0;
    for (int s = 0; s < 3; ++s)
      if (src[static_cast<std::size_t>(s)][0] == v || src[static_cast<std::size_t>(s)][1] == v)
        hits[static_cast<std::size_t>(k++)] = s;
    const std::array<int, 2>& p = dst[static_cast<std::size_t>(hits[0])];
    const std::array<int, 2>& q = dst[static_cast<std::size_t>(hits[1])];
    for (const int cand : p)
      if (cand == q[0] || cand == q[1]) image[static_cast<std::size_t>(v)] = cand;
  }
  return Perm4::from_images(image[0], image[1], image[2], image[3]);
}

struct Arrangement {
  Triangulation tri{1};
  std::map<FaceEnd, EdgeMarks> marks;
};

inline Arrangement build_arrangement(const FiniteGroupTable& g,
                                     const TrivialPresentation& pres,
                                     const Integer& cluster_spacing) {
  const int m = g.order();
  const int handles = m - 1;

  // passages and their per-handle indices
  std::vector<Passage> passages;
  std::vector<std::vector<int>> relator_passages(pres.relators.size());
  std::vector<int> handle_load(static_cast<std::size_t>(handles), 0);
  for (std::size_t r = 0; r < pres.relators.size(); ++r)
    for (std::size_t j = 0; j < pres.relators[r].size(); ++j) {
      const PresentationLetter& letter = pres.relators[r][j];
      Passage p;
      p.relator = static_cast<int>(r);
      p.position = static_cast<int>(j);
      p.handle = letter.element - 1;
      p.forward = !letter.inverted;
      p.index_in_handle = handle_load[static_cast<std::size_t>(p.handle)]++;
      relator_passages[r].push_back(static_cast<int>(passages.size()));
      passages.push_back(p);
    }

  // station parameters: cluster 2h serves the entry end of handle h,
  // cluster 2h+1 the exit end; exit-end station order is reversed so that
  // the strands run parallel through the handle
  const auto entry_param = [&](const Passage& p) {
    return Rational(cluster_spacing * (2 * p.handle + 1) + p.index_in_handle);
  };
  const auto exit_param = [&](const Passage& p) {
    const int load = handle_load[static_cast<std::size_t>(p.handle)];
    return Rational(cluster_spacing * (2 * p.handle + 2) + (load - 1 - p.index_in_handle));
  };
  const auto point_at = [](const Rational& t) { return RatPoint{t, t * t}; };

  // chords: one per letter, from the passage's far end to the next
  // passage's near end (a reversed letter runs through its handle backwards)
  struct Chord {
    RatPoint a, b;
    std::vector<ChordCrossingRef> hits;
  };
  std::vector<Chord> chords;
  std::vector<std::size_t> chord_base(pres.relators.size());  // id of relator's first chord
  for (std::size_t r = 0; r < pres.relators.size(); ++r) {
    chord_base[r] = chords.size();
    const std::vector<int>& ps = relator_passages[r];
    for (std::size_t j = 0; j < ps.size(); ++j) {
      const Passage& from = passages[static_cast<std::size_t>(ps[j])];
      const Passage& to = passages[static_cast<std::size_t>(ps[(j + 1) % ps.size()])];
      Chord c;
      c.a = point_at(from.forward ? exit_param(from) : entry_param(from));
      c.b = point_at(to.forward ? entry_param(to) : exit_param(to));
      chords.push_back(std::move(c));
    }
  }

  // crossings: one tetrahedron each; meridian crossings first
  std::vector<Crossing> crossings;
  std::vector<int> tube_crossing_of(passages.size());
  for (std::size_t p = 0; p < passages.size(); ++p) {
    Crossing x;
    x.tube = true;
    x.handle = passages[p].handle;
    x.forward = passages[p].forward;
    x.rotation = x.forward ? kRotationPositive : kRotationNegative;
    tube_crossing_of[p] = static_cast<int>(crossings.size());
    crossings.push_back(x);
  }
  for (std::size_t i = 0; i < chords.size(); ++i)
    for (std::size_t j = i + 1; j < chords.size(); ++j) {
      Chord& u = chords[i];
      Chord& v = chords[j];
      const Rational d1 = cross(u.a, u.b, v.a), d2 = cross(u.a, u.b, v.b);
      const Rational d3 = cross(v.a, v.b, u.a), d4 = cross(v.a, v.b, u.b);
      if (sign_of(d1) == 0 || sign_of(d2) == 0 || sign_of(d3) == 0 || sign_of(d4) == 0)
        throw ArrangementDegenerate{};
      if (sign_of(d1) == sign_of(d2) || sign_of(d3) == sign_of(d4)) continue;
      // proper crossing; the signed areas interpolate linearly, so the zero
      // of d3..d4 is the parameter along u and the zero of d1..d2 the one
      // along v
      const Rational along_u = d3 / (d3 - d4);
      const Rational along_v = d1 / (d1 - d2);
      Crossing x;
      x.tube = false;
      const RatPoint du{u.b.x - u.a.x, u.b.y - u.a.y};
      const RatPoint dv{v.b.x - v.a.x, v.b.y - v.a.y};
      const Rational turn = du.x * dv.y - du.y * dv.x;
      if (sign_of(turn) == 0) throw ArrangementDegenerate{};
      x.rotation = sign_of(turn) > 0 ? kRotationPositive : kRotationNegative;
      const int id = static_cast<int>(crossings.size());
      crossings.push_back(x);
      u.hits.push_back({along_u, id, true});
      v.hits.push_back({along_v, id, false});
    }
  for (Chord& c : chords) {
    std::sort(c.hits.begin(), c.hits.end());
    for (std::size_t k = 1; k < c.hits.size(); ++k)
      if (!(c.hits[k - 1] < c.hits[k])) throw ArrangementDegenerate{};
  }

  // closed strands: one per relator, one meridian per handle; a relator
  // strand alternates tube crossings with the crossings met along its
  // chords, a meridian sweeps its handle's tube crossings in slot order
  std::vector<std::vector<StrandStop>> strands;
  for (std::size_t r = 0; r < pres.relators.size(); ++r) {
    std::vector<StrandStop> s;
    const std::vector<int>& ps = relator_passages[r];
    for (std::size_t j = 0; j < ps.size(); ++j) {
      s.push_back({tube_crossing_of[static_cast<std::size_t>(ps[j])], 1, 0});
      for (const ChordCrossingRef& hit : chords[chord_base[r] + j].hits)
        s.push_back(hit.as_alpha ? StrandStop{hit.crossing, 1, 0}
                                 : StrandStop{hit.crossing, 3, 2});
    }
    strands.push_back(std::move(s));
  }
  for (int h = 0; h < handles; ++h) {
    std::vector<std::pair<int, int>> slots;  // (slot index, crossing)
    for (std::size_t p = 0; p < passages.size(); ++p)
      if (passages[p].handle == h)
        slots.emplace_back(passages[p].index_in_handle, tube_crossing_of[p]);
    std::sort(slots.begin(), slots.end());
    std::vector<StrandStop> s;
    for (const auto& sc : slots) s.push_back({sc.second, 3, 2});
    strands.push_back(std::move(s));
  }

  // glue one arc per consecutive strand pair
  Arrangement out;
  out.tri = Triangulation(static_cast<int>(crossings.size()));
  for (const std::vector<StrandStop>& strand : strands) {
    for (std::size_t i = 0; i < strand.size(); ++i) {
      const StrandStop& from = strand[i];
      const StrandStop& to = strand[(i + 1) % strand.size()];
      const Crossing& cx = crossings[static_cast<std::size_t>(from.crossing)];
      const Crossing& cy = crossings[static_cast<std::size_t>(to.crossing)];
      const Perm4 p = arc_perm(germ_frame(cx.rotation, from.out_face, true), from.out_face,
                               germ_frame(cy.rotation, to.in_face, false), to.in_face);
      // voltage picked up along the arc: leaving a meridian crossing on the
      // entry side contributes the handle generator inverted; arriving at
      // one on the entry side contributes it directly
      int volt = 0;
      if (cx.tube && from.out_face == 0 && !cx.forward)
        volt = g.inverse(cx.handle + 1);
      if (cy.tube && to.in_face == 1 && cy.forward)
        volt = g.mul(volt, cy.handle + 1);
      const FaceEnd a{from.crossing, from.out_face};
      const FaceEnd b{to.crossing, to.in_face};
      out.tri.glue(a, b, p);
      if (b < a) volt = g.inverse(volt);
      out.marks[std::min(a, b)] = EdgeMarks{volt, 0};
    }
  }
  return out;
}

}  // namespace detail

/// Stage one: a special polyhedron with fundamental group G, presented as a
/// marked dual triangulation.  For the trivial group this is the fixed
/// one-tetrahedron sphere spine; for larger groups it is the dual of the
/// curve arrangement carrying the multiplication-table presentation.
inline MarkedPolyhedron build_Q(const FiniteGroupTable& g) {
  if (g.order() == 1) {
    Triangulation t(1);
    t.glue(FaceEnd{0, 0}, FaceEnd{0, 1}, Perm4::transposition(0, 1));
    t.glue(FaceEnd{0, 2}, FaceEnd{0, 3}, Perm4::from_images(1, 2, 3, 0));
    MarkedPolyhedron q = detail::assemble_marked(std::move(t), {});
    verify_voltages(q, g);
    return q;
  }
  const TrivialPresentation pres = trivial_presentation(g);
  for (int attempt = 0; attempt < 5; ++attempt) {
    const Integer spacing = Integer(1 << 16) + attempt * 9973;
    try {
      detail::Arrangement arr = detail::build_arrangement(g, pres, spacing);
      arr.tri.validate();
      MarkedPolyhedron q = detail::assemble_marked(std::move(arr.tri), arr.marks);
      verify_voltages(q, g);
      return q;
    } catch (const detail::ArrangementDegenerate&) {
      continue;
    }
  }
  throw Error(ErrorCategory::domain, "curve arrangement stayed degenerate after retries");
}

/// Stage two: graft a two-tetrahedron pillow into every graph edge.  The
/// rewrite multiplies the size by five, leaves the fundamental group alone
/// and removes every bad vertex, because each original pairing is split in
/// two and the pillows themselves have no self-adjacency.
inline MarkedPolyhedron bubble_all(const MarkedPolyhedron& q) {
  const int n = q.dual.size();
  const std::size_t edges = q.polyhedron.graph_edges.size();
  Triangulation t(5 * n);
  std::map<FaceEnd, detail::EdgeMarks> marks;
  for (std::size_t k = 0; k < edges; ++k) {
    const PolyhedronEdge& e = q.polyhedron.graph_edges[k];
    const int a = n + 2 * static_cast<int>(k), b = a + 1;
    const FaceEnd lo{e.ends[0], e.faces[0]}, hi{e.ends[1], e.faces[1]};
    for (int f = 0; f < 3; ++f) {
      t.glue(FaceEnd{a, f}, FaceEnd{b, f}, Perm4::identity());
      marks[FaceEnd{a, f}] = {0, 0};
    }
    const Perm4 in = lo.face == 3 ? Perm4::identity() : Perm4::transposition(lo.face, 3);
    const Perm4 through = e.perm * in.inverse();
    t.glue(lo, FaceEnd{a, 3}, in);
    t.glue(FaceEnd{b, 3}, hi, through);
    marks[lo] = {q.voltage[k], 0};
    marks[hi] = {0, 0};
  }
  t.validate();
  return detail::assemble_marked(std::move(t), marks);
}

/// Stage three: graft k+1 kinks onto graph edge k (in edge id order).  Each
/// kink is one tetrahedron with two faces folded onto each other, adding a
/// bad vertex that carries a one-edged region — a curl.  The edge counts
/// are chosen so that every edge of the input gets a different number of
/// curls, which is what later pins every automorphism of the cover.
inline MarkedPolyhedron add_curls(const MarkedPolyhedron& q) {
  const int n = q.dual.size();
  const std::size_t edges = q.polyhedron.graph_edges.size();
  int total = 0;
  for (std::size_t k = 0; k < edges; ++k) total += static_cast<int>(k) + 1;
  Triangulation t(n + total);
  std::map<FaceEnd, detail::EdgeMarks> marks;
  int next_tet = n;
  for (std::size_t k = 0; k < edges; ++k) {
    const PolyhedronEdge& e = q.polyhedron.graph_edges[k];
    const int count = static_cast<int>(k) + 1;
    const FaceEnd lo{e.ends[0], e.faces[0]}, hi{e.ends[1], e.faces[1]};
    const int first = next_tet;
    next_tet += count;
    const Perm4 in = lo.face == 0 ? Perm4::identity() : Perm4::transposition(lo.face, 0);
    t.glue(lo, FaceEnd{first, 0}, in);
    marks[lo] = {q.voltage[k], count};
    // Every hop through a kink swaps the strand faces 0/1 and the fold faces
    // 2/3 together: the even double swap carries the side labels through the
    // curl without reversing them, which is what keeps the fundamental group
    // of the polyhedron untouched.
    const Perm4 hop = Perm4::from_images(1, 0, 3, 2);
    for (int j = 0; j < count; ++j) {
      const int kink = first + j;
      t.glue(FaceEnd{kink, 2}, FaceEnd{kink, 3}, hop);
      marks[FaceEnd{kink, 2}] = {0, count};
      if (j + 1 < count) {
        t.glue(FaceEnd{kink, 1}, FaceEnd{kink + 1, 0}, hop);
        marks[FaceEnd{kink, 1}] = {0, count};
      }
    }
    const Perm4 out = e.perm * in.inverse() * hop;
    t.glue(FaceEnd{first + count - 1, 1}, hi, out);
    marks[std::min(FaceEnd{first + count - 1, 1}, hi)] = {0, count};
  }
  t.validate();
  return detail::assemble_marked(std::move(t), marks);
}

/// Stage four: the derived cover of the voltage assignment, one sheet per
/// group element, sheet s of tetrahedron t labeled t*|G|+s.  The voltages
/// must present a connected cover (they do whenever they generate G), and
/// every region word must have trivial voltage product so that the regions
/// lift; both are checked.  The markings come along: curl counts lift to
/// each sheet and the lifted voltages are trivial.
inline MarkedPolyhedron universal_cover(const MarkedPolyhedron& q, const FiniteGroupTable& g) {
  verify_voltages(q, g);
  const int n = q.dual.size();
  const int order = g.order();
  const EdgeClassification base_ec = edge_classes(q.dual);
  Triangulation t(n * order);
  const auto sheet_id = [order](int tet, int s) { return tet * order + s; };
  for (int tet = 0; tet < n; ++tet)
    for (int f = 0; f < 4; ++f) {
      if (!q.dual.is_glued(FaceEnd{tet, f}))
        throw Error(ErrorCategory::domain, "the cover needs a fully glued polyhedron");
      const Gluing& glu = q.dual.gluing(tet, f);
      const int cls = base_ec.face_class_of[static_cast<std::size_t>(tet)][static_cast<std::size_t>(f)];
      const FaceClass& fc = base_ec.face_classes[static_cast<std::size_t>(cls)];
      const bool from_lo = fc.lo == FaceEnd{tet, f};
      const int v = q.voltage[static_cast<std::size_t>(cls)];
      const int step = from_lo ? v : g.inverse(v);
      for (int s = 0; s < order; ++s) {
        const FaceEnd a{sheet_id(tet, s), f};
        if (t.is_glued(a)) continue;
        const FaceEnd b{sheet_id(glu.to.tet, g.mul(s, step)), glu.to.face};
        t.glue(a, b, glu.perm);
      }
    }
  if (!t.connected())
    throw Error(ErrorCategory::domain,
                "voltages do not generate the group: the cover is disconnected");
  t.validate();
  std::map<FaceEnd, detail::EdgeMarks> marks;
  const EdgeClassification cover_ec = edge_classes(t);
  for (const FaceClass& fc : cover_ec.face_classes) {
    const int base_cls =
        base_ec.face_class_of[static_cast<std::size_t>(fc.lo.tet / order)][static_cast<std::size_t>(fc.lo.face)];
    marks[fc.lo] = {0, q.curl_count[static_cast<std::size_t>(base_cls)]};
  }
  return detail::assemble_marked(std::move(t), marks);
}

/// Resource and verification knobs for realize_group.
struct RealizeOptions {
  /// Upper bound on the tetrahedron count of the curled stage and of the
  /// cover; the quadratic growth of the curl stage crosses it quickly for
  /// larger groups.
  std::size_t max_complexity = 1'000'000;
};

/// Size bookkeeping and verification results of the full pipeline.
struct RealizeReport {
  std::size_t spine_size = 0;    ///< stage one
  std::size_t bubbled_size = 0;  ///< = 5 * spine_size
  std::size_t curled_size = 0;   ///< = 2 * bubbled * (bubbled + 1)
  std::size_t cover_size = 0;    ///< = |G| * curled_size
  double complexity_constant = 0.0;  ///< cover_size / |G|^9
  std::size_t aut_order = 0;         ///< verified automorphism count of the output
  double vol_double = 0.0;           ///< volume of the double of the output
};

struct RealizedGroup {
  Triangulation tri;
  RealizeReport report;
};

/// The full pipeline: build the spine, bubble, curl, pass to the cover and
/// dualize.  Stage sizes are checked against their closed forms, and the
/// automorphism group of the output is computed exhaustively and must have
/// exactly the group's order; any mismatch is a hard error.
inline RealizedGroup realize_group(const FiniteGroupTable& g, const RealizeOptions& opts = {}) {
  const auto stage_check = [](const char* stage, std::size_t got, std::size_t want) {
    if (got != want)
      throw Error(ErrorCategory::domain,
                  std::string(stage) + " stage has " + std::to_string(got) +
                      " tetrahedra, expected " + std::to_string(want));
  };
  const MarkedPolyhedron spine = build_Q(g);
  const std::size_t c0 = static_cast<std::size_t>(spine.dual.size());
  const std::size_t c1 = 5 * c0;
  const std::size_t c2 = 2 * c1 * (c1 + 1);
  const std::size_t c3 = static_cast<std::size_t>(g.order()) * c2;
  if (c2 > opts.max_complexity || c3 > opts.max_complexity)
    throw Error(ErrorCategory::domain,
                "pipeline would need " + std::to_string(std::max(c2, c3)) +
                    " tetrahedra, above the configured limit of " +
                    std::to_string(opts.max_complexity));

  const MarkedPolyhedron bubbled = bubble_all(spine);
  stage_check("bubbled", static_cast<std::size_t>(bubbled.dual.size()), c1);
  for (const char bad : bubbled.bad_vertex)
    if (bad) throw Error(ErrorCategory::domain, "bubbled stage kept a bad vertex");

  const MarkedPolyhedron curled = add_curls(bubbled);
  stage_check("curled", static_cast<std::size_t>(curled.dual.size()), c2);

  const MarkedPolyhedron cover = universal_cover(curled, g);
  stage_check("cover", static_cast<std::size_t>(cover.dual.size()), c3);

  RealizedGroup out{dual_triangulation(cover.polyhedron), {}};
  out.report.spine_size = c0;
  out.report.bubbled_size = c1;
  out.report.curled_size = c2;
  out.report.cover_size = c3;
  double m9 = 1.0;
  for (int i = 0; i < 9; ++i) m9 *= static_cast<double>(g.order());
  out.report.complexity_constant = static_cast<double>(c3) / m9;
  const IsomGroupReport aut = automorphisms(out.tri);
  out.report.aut_order = aut.aut_order;
  if (aut.aut_order != static_cast<std::size_t>(g.order()))
    throw Error(ErrorCategory::domain,
                "output has " + std::to_string(aut.aut_order) +
                    " automorphisms, expected the group order " +
                    std::to_string(g.order()));
  out.report.vol_double = volume_report(out.tri).vol_D;
  return out;
}

}  // namespace tri3
