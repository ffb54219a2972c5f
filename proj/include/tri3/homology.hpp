#pragma once

/// First homology of the double of the handlebody neighborhood, presented by
/// one meridian generator per edge class and one relation per face class,
/// plus the free part carried by the dual graph.

#include <cstddef>
#include <utility>

#include <tri3/orbits.hpp>
#include <tri3/snf.hpp>

namespace tri3 {

/// Signed crossing counts: one row per edge class, one column per face class.
/// Entry (e, f) sums the signs of the traversals of face class f in the
/// boundary word of edge class e.
struct RegionIncidence {
  IntegerMatrix matrix;
};

inline RegionIncidence region_incidence(const EdgeClassification& ec) {
  IntegerMatrix c(ec.classes.size(), ec.face_classes.size());
  for (const EdgeClass& e : ec.classes)
    for (const auto& [face_class, sign] : e.boundary_word)
      c(static_cast<std::size_t>(e.id), static_cast<std::size_t>(face_class)) += sign;
  return RegionIncidence{std::move(c)};
}

inline RegionIncidence region_incidence(const Triangulation& t) {
  return region_incidence(edge_classes(t));
}

/// H1 of the double: Z^{n+1} plus the quotient of the meridian lattice by
/// the face relations.
inline AbelianGroup h1_double(const Triangulation& t, const EdgeClassification& ec) {
  const AbelianGroup graph_part{static_cast<std::size_t>(t.size()) + 1, {}};
  return direct_sum(graph_part, cokernel(region_incidence(ec).matrix));
}

inline AbelianGroup h1_double(const Triangulation& t) {
  return h1_double(t, edge_classes(t));
}

/// H1 after filling every meridian: free of rank 1 + #graph-edges −
/// #graph-vertices, the cycle rank of the dual graph.
inline AbelianGroup h1_meridinal_filling(const Triangulation& t) {
  t.validate();
  std::size_t graph_edges = 0;
  for (int tet = 0; tet < t.size(); ++tet)
    for (int f = 0; f < 4; ++f) {
      const FaceEnd fe{tet, f};
      if (fe < t.gluing(tet, f).to) ++graph_edges;
    }
  return AbelianGroup{1 + graph_edges - static_cast<std::size_t>(t.size()), {}};
}

}  // namespace tri3
