#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include <tri3/core.hpp>

namespace tri3 {

/// One tetrahedron edge: tet index plus the unordered vertex pair {a, b}
/// stored with a < b.
struct Wedge {
  int tet = 0;
  int a = 0;
  int b = 0;

  auto operator<=>(const Wedge&) const = default;
};

/// A matched pair of face-ends; lo is the lexicographically smaller one.
/// Ids are assigned in ascending order of lo.
struct FaceClass {
  int id = 0;
  FaceEnd lo;
  FaceEnd hi;
};

/// An orbit of tetrahedron edges under the face gluings, together with the
/// data gathered by the edge walk around it.
struct EdgeClass {
  int id = 0;
  /// Wedges in walk order.  Length equals valence when the orbit is
  /// orientable and 2*valence otherwise (each wedge is then visited twice,
  /// once per running direction).
  std::vector<Wedge> wedges;
  int valence = 0;
  bool orientable = false;
  /// One entry per walk step: the face class crossed and the direction of
  /// the crossing, +1 when leaving through the reference end of the class.
  std::vector<std::pair<int, int>> boundary_word;
};

/// Tie-break choices for the edge walk.  seed == 0 uses the canonical
/// deterministic choices (lexicographically smallest start wedge, ascending
/// start direction, lower-indexed first face, reference end = lo); any other
/// seed scrambles all of them reproducibly.  The partition into classes,
/// valences and orientability flags never depend on the seed.
struct WalkOptions {
  std::uint64_t seed = 0;
};

/// Full orbit analysis of the 4n face-ends and 6n tetrahedron edges.
struct EdgeClassification {
  std::vector<FaceClass> face_classes;            // 2n entries
  std::vector<std::array<int, 4>> face_class_of;  // [tet][face] -> face class id
  std::vector<EdgeClass> classes;
  std::vector<std::array<int, 6>> edge_class_of;  // [tet][edge_index] -> class id
  /// Per face class, whether the sign reference used by the boundary words
  /// is the lo end (always true for the canonical choices).
  std::vector<char> reference_from_lo;

  int min_valence() const {
    int m = classes.empty() ? 0 : classes.front().valence;
    for (const EdgeClass& c : classes) m = std::min(m, c.valence);
    return m;
  }
};

/// Partitions the 6n tetrahedron edges into orbits of the face gluings and
/// walks once around each orbit.
///
/// The walk maintains a wedge and a running direction (an ordering of the
/// wedge's vertex pair).  Each step crosses one of the two faces containing
/// the edge — the first step crosses the chosen start face, and every later
/// step crosses the face other than the one just arrived through.  Crossing
/// face phi of tet t applies the gluing permutation to the directed pair and
/// enters the partner tet through the image face.  The walk stops when the
/// start wedge is reached again with the start direction; this happens after
/// exactly one turn around the edge (orientable, length = orbit size) or two
/// turns (non-orientable, length = twice the orbit size).
inline EdgeClassification edge_classes(const Triangulation& T,
                                       const WalkOptions& opts = {}) {
  T.validate();
  const int n = T.size();
  EdgeClassification out;

  out.face_class_of.assign(static_cast<std::size_t>(n), {-1, -1, -1, -1});
  for (int t = 0; t < n; ++t)
    for (int f = 0; f < 4; ++f) {
      if (out.face_class_of[static_cast<std::size_t>(t)][static_cast<std::size_t>(f)] >= 0)
        continue;
      const FaceEnd lo{t, f};
      const FaceEnd hi = T.gluing(lo).to;
      const int id = static_cast<int>(out.face_classes.size());
      out.face_classes.push_back(FaceClass{id, lo, hi});
      out.face_class_of[static_cast<std::size_t>(t)][static_cast<std::size_t>(f)] = id;
      out.face_class_of[static_cast<std::size_t>(hi.tet)][static_cast<std::size_t>(hi.face)] = id;
    }

  std::mt19937_64 rng(opts.seed);
  out.reference_from_lo.assign(out.face_classes.size(), 1);
  if (opts.seed != 0)
    for (auto& r : out.reference_from_lo) r = static_cast<char>(rng() & 1u);
  const std::vector<char>& ref_is_lo = out.reference_from_lo;

  out.edge_class_of.assign(static_cast<std::size_t>(n), {-1, -1, -1, -1, -1, -1});

  // Walks from the given start state until the start wedge reappears with
  // the start direction; optionally records visited wedges and crossings.
  const auto walk = [&](int t0, int u0, int v0, int phi0, std::vector<Wedge>* wedges,
                        std::vector<std::pair<int, int>>* word) {
    int t = t0;
    int u = u0;
    int v = v0;
    int phi = phi0;
    do {
      if (wedges != nullptr)
        wedges->push_back(Wedge{t, std::min(u, v), std::max(u, v)});
      if (word != nullptr) {
        const int fc =
            out.face_class_of[static_cast<std::size_t>(t)][static_cast<std::size_t>(phi)];
        const bool from_lo = FaceEnd{t, phi} == out.face_classes[static_cast<std::size_t>(fc)].lo;
        const int sign = (from_lo == static_cast<bool>(ref_is_lo[static_cast<std::size_t>(fc)]))
                             ? +1
                             : -1;
        word->push_back({fc, sign});
      }
      const Gluing& g = T.gluing(t, phi);
      const int nu = g.perm(u);
      const int nv = g.perm(v);
      const auto faces = faces_containing_edge(nu, nv);
      const int next = (faces[0] == g.to.face) ? faces[1] : faces[0];
      t = g.to.tet;
      u = nu;
      v = nv;
      phi = next;
    } while (!(t == t0 && u == u0 && v == v0));
  };

  for (int t = 0; t < n; ++t)
    for (int e = 0; e < 6; ++e) {
      if (out.edge_class_of[static_cast<std::size_t>(t)][static_cast<std::size_t>(e)] >= 0)
        continue;
      const auto [a, b] = tet_edges[static_cast<std::size_t>(e)];

      // Discovery pass with canonical choices, to learn the orbit members.
      std::vector<Wedge> visited;
      walk(t, a, b, faces_containing_edge(a, b)[0], &visited, nullptr);
      std::vector<Wedge> members = visited;
      std::sort(members.begin(), members.end());
      members.erase(std::unique(members.begin(), members.end()), members.end());

      // Recording pass; under a nonzero seed the start data is scrambled.
      EdgeClass ec;
      ec.id = static_cast<int>(out.classes.size());
      int st = t;
      int su = a;
      int sv = b;
      if (opts.seed != 0) {
        const Wedge& w =
            members[static_cast<std::size_t>(rng() % members.size())];
        st = w.tet;
        su = w.a;
        sv = w.b;
        if (rng() & 1u) std::swap(su, sv);
      }
      const auto start_faces = faces_containing_edge(su, sv);
      const int sphi =
          (opts.seed != 0 && (rng() & 1u)) ? start_faces[1] : start_faces[0];
      walk(st, su, sv, sphi, &ec.wedges, &ec.boundary_word);

      ec.valence = static_cast<int>(members.size());
      ec.orientable = ec.wedges.size() == members.size();
      out.classes.push_back(std::move(ec));
      for (const Wedge& w : members)
        out.edge_class_of[static_cast<std::size_t>(w.tet)]
                         [static_cast<std::size_t>(edge_index(w.a, w.b))] =
            out.classes.back().id;
    }

  return out;
}

/// The closed surface linking one vertex class: triangles are tetrahedron
/// corners, glued along the face pairings.
struct VertexLink {
  int id = 0;
  std::vector<std::array<int, 2>> corners;  // (tet, vertex) pairs, sorted
  int euler_characteristic = 0;
  bool orientable = false;
  /// Genus when orientable, cross-cap count when not.
  int genus = 0;
};

/// Partitions the 4n corners into vertex classes and computes each link
/// surface's Euler characteristic, orientability and genus.
inline std::vector<VertexLink> vertex_links(const Triangulation& T) {
  T.validate();
  const int n = T.size();
  const auto corner_id = [](int t, int v) { return 4 * t + v; };

  // Partition corners: corner (t, v) meets corner (t', p(v)) across every
  // face f != v.
  std::vector<int> cls(static_cast<std::size_t>(4 * n), -1);
  std::vector<std::vector<int>> groups;
  for (int c0 = 0; c0 < 4 * n; ++c0) {
    if (cls[static_cast<std::size_t>(c0)] >= 0) continue;
    const int id = static_cast<int>(groups.size());
    groups.emplace_back();
    std::vector<int> stack{c0};
    cls[static_cast<std::size_t>(c0)] = id;
    while (!stack.empty()) {
      const int c = stack.back();
      stack.pop_back();
      groups.back().push_back(c);
      const int t = c / 4;
      const int v = c % 4;
      for (int f = 0; f < 4; ++f) {
        if (f == v) continue;
        const Gluing& g = T.gluing(t, f);
        const int c2 = corner_id(g.to.tet, g.perm(v));
        if (cls[static_cast<std::size_t>(c2)] < 0) {
          cls[static_cast<std::size_t>(c2)] = id;
          stack.push_back(c2);
        }
      }
    }
    std::sort(groups.back().begin(), groups.back().end());
  }

  // Orientation bookkeeping.  The triangle of corner (t, v) has vertex
  // labels {0..3} minus v; its reference boundary cycle lists them in
  // increasing order.  The side lying on face f joins the two labels other
  // than v and f; the reference cycle traverses that side backwards (from
  // the larger label to the smaller) exactly when f is the middle of the
  // three labels.
  const auto side_sigma = [](int v, int f) {
    std::array<int, 3> labels{};
    int k = 0;
    for (int w = 0; w < 4; ++w)
      if (w != v) labels[static_cast<std::size_t>(k++)] = w;
    return f == labels[1] ? -1 : +1;
  };
  const auto side_pair = [](int v, int f) {
    std::array<int, 2> out{};
    int k = 0;
    for (int w = 0; w < 4; ++w)
      if (w != v && w != f) out[static_cast<std::size_t>(k++)] = w;
    return out;  // increasing
  };

  std::vector<VertexLink> links;
  std::vector<int> eps(static_cast<std::size_t>(4 * n), 0);
  for (const auto& group : groups) {
    VertexLink link;
    link.id = static_cast<int>(links.size());
    for (int c : group)
      link.corners.push_back(std::array<int, 2>{c / 4, c % 4});

    const int faces_count = static_cast<int>(group.size());

    // Count side orbits; side gluing is fixed-point free because a face is
    // never glued to itself, so there are 3F/2 link edges.
    const int edges_count = 3 * faces_count / 2;

    // Count link vertices: orbits of germs (t, v, w), w != v, under the
    // gluings across the two faces containing the tetrahedron edge {v, w}.
    std::vector<int> germ_cls(static_cast<std::size_t>(16 * n), -1);
    const auto germ_id = [](int t, int v, int w) { return 16 * t + 4 * v + w; };
    int vertices_count = 0;
    for (int c : group) {
      const int t = c / 4;
      const int v = c % 4;
      for (int w = 0; w < 4; ++w) {
        if (w == v) continue;
        if (germ_cls[static_cast<std::size_t>(germ_id(t, v, w))] >= 0) continue;
        ++vertices_count;
        std::vector<std::array<int, 3>> stack{{t, v, w}};
        germ_cls[static_cast<std::size_t>(germ_id(t, v, w))] = 1;
        while (!stack.empty()) {
          const auto [gt, gv, gw] = stack.back();
          stack.pop_back();
          for (int f : faces_containing_edge(gv, gw)) {
            const Gluing& g = T.gluing(gt, f);
            const std::array<int, 3> next{g.to.tet, g.perm(gv), g.perm(gw)};
            int& mark = germ_cls[static_cast<std::size_t>(germ_id(next[0], next[1], next[2]))];
            if (mark < 0) {
              mark = 1;
              stack.push_back(next);
            }
          }
        }
      }
    }

    link.euler_characteristic = vertices_count - edges_count + faces_count;

    // Orientability: propagate a sign per triangle.  Two glued triangles
    // are coherently oriented when the shared side is traversed in opposite
    // directions, which yields the constraint below on the signs.
    bool orientable = true;
    const int c0 = group.front();
    eps[static_cast<std::size_t>(c0)] = 1;
    std::vector<int> stack{c0};
    while (!stack.empty() && orientable) {
      const int c = stack.back();
      stack.pop_back();
      const int t = c / 4;
      const int v = c % 4;
      for (int f = 0; f < 4; ++f) {
        if (f == v) continue;
        const Gluing& g = T.gluing(t, f);
        const int v2 = g.perm(v);
        const int c2 = corner_id(g.to.tet, v2);
        const auto [x, y] = side_pair(v, f);
        const int twist = g.perm(x) < g.perm(y) ? +1 : -1;
        const int required = -eps[static_cast<std::size_t>(c)] * side_sigma(v, f) * twist *
                             side_sigma(v2, g.to.face);
        int& slot = eps[static_cast<std::size_t>(c2)];
        if (slot == 0) {
          slot = required;
          stack.push_back(c2);
        } else if (slot != required) {
          orientable = false;
          break;
        }
      }
    }

    link.orientable = orientable;
    link.genus = orientable ? (2 - link.euler_characteristic) / 2
                            : 2 - link.euler_characteristic;
    links.push_back(std::move(link));
  }
  return links;
}

/// Result of the manifold test: the gluing yields a manifold exactly when
/// every edge class is orientable (its thickened edge is an annulus rather
/// than a Moebius band).
struct ManifoldReport {
  bool manifold = true;
  std::vector<int> non_orientable_classes;

  explicit operator bool() const { return manifold; }
};

inline ManifoldReport is_manifold(const EdgeClassification& ec) {
  ManifoldReport report;
  for (const EdgeClass& c : ec.classes)
    if (!c.orientable) {
      report.manifold = false;
      report.non_orientable_classes.push_back(c.id);
    }
  return report;
}

inline ManifoldReport is_manifold(const Triangulation& T) {
  return is_manifold(edge_classes(T));
}

}  // namespace tri3
