#pragma once

/// Special polyhedra: the 4-valent singular graph with disc regions attached
/// along cyclic edge words.  The dual of a triangulation has one graph vertex
/// per tetrahedron, one graph edge per face class and one region per edge
/// class; each graph edge also carries the local germ data (the face slots at
/// its two ends and the label matching between them), which is exactly what
/// dualization back to a triangulation needs.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <tri3/homology.hpp>
#include <tri3/orbits.hpp>
#include <tri3/snf.hpp>

namespace tri3 {

/// An edge of the singular graph.  Loops (both ends at one vertex) allowed.
struct PolyhedronEdge {
  std::array<int, 2> ends;   ///< incident graph vertices
  std::array<int, 2> faces;  ///< local model: face slot at each end
  Perm4 perm;                ///< label matching from end 0 to end 1

  friend bool operator==(const PolyhedronEdge&, const PolyhedronEdge&) = default;
};

/// A region: the disc's attaching circle as a cyclic word of signed
/// graph-edge traversals, one letter per corner.  Signs are taken relative
/// to each edge's reference direction (out of end 0).  Regions flagged open
/// are boundary loops of the punctured view: the disc is removed and only
/// the attaching circle remains.
struct PolyhedronRegion {
  std::vector<std::pair<int, int>> word;
  bool open = false;

  friend bool operator==(const PolyhedronRegion&, const PolyhedronRegion&) = default;
};

struct SpecialPolyhedron {
  int graph_vertices = 0;
  std::vector<PolyhedronEdge> graph_edges;
  std::vector<PolyhedronRegion> regions;

  /// Degree of a graph vertex, counting loop edges twice.
  int degree(int v) const {
    int d = 0;
    for (const PolyhedronEdge& e : graph_edges)
      d += (e.ends[0] == v) + (e.ends[1] == v);
    return d;
  }
};

inline SpecialPolyhedron dual_polyhedron(const Triangulation& t,
                                         const EdgeClassification& ec) {
  SpecialPolyhedron p;
  p.graph_vertices = t.size();
  for (const FaceClass& f : ec.face_classes)
    p.graph_edges.push_back(PolyhedronEdge{
        {f.lo.tet, f.hi.tet},
        {f.lo.face, f.hi.face},
        t.gluing(f.lo.tet, f.lo.face).perm});
  for (const EdgeClass& e : ec.classes) {
    PolyhedronRegion r;
    r.word = e.boundary_word;
    // A side-reversing class closes up only after walking its circuit twice,
    // but the region is still a disc attached along the single circuit; keep
    // one period as the attaching word.
    if (!e.orientable) r.word.resize(static_cast<std::size_t>(e.valence));
    // region words use the polyhedron's own orientation of each graph edge
    // (out of end 0); flip signs where the walk used the other reference
    for (auto& [edge, sign] : r.word)
      if (!ec.reference_from_lo[static_cast<std::size_t>(edge)]) sign = -sign;
    p.regions.push_back(std::move(r));
  }
  return p;
}

inline SpecialPolyhedron dual_polyhedron(const Triangulation& t) {
  return dual_polyhedron(t, edge_classes(t));
}

/// The punctured view: every region becomes an open boundary loop.
inline SpecialPolyhedron punctured_view(SpecialPolyhedron p) {
  for (PolyhedronRegion& r : p.regions) r.open = true;
  return p;
}

namespace detail {

inline std::vector<std::pair<int, int>> reversed_word(
    const std::vector<std::pair<int, int>>& w) {
  std::vector<std::pair<int, int>> out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.emplace_back(it->first, -it->second);
  return out;
}

/// Index of the lexicographically least rotation (Booth's algorithm).
inline std::size_t least_rotation(const std::vector<std::uint64_t>& s) {
  const std::size_t n = s.size();
  if (n < 2) return 0;
  std::vector<std::ptrdiff_t> fail(2 * n, -1);
  std::size_t k = 0;
  for (std::size_t j = 1; j < 2 * n; ++j) {
    const std::uint64_t sj = s[j % n];
    std::ptrdiff_t i = fail[j - k - 1];
    while (i != -1 && sj != s[(k + static_cast<std::size_t>(i) + 1) % n]) {
      if (sj < s[(k + static_cast<std::size_t>(i) + 1) % n])
        k = j - static_cast<std::size_t>(i) - 1;
      i = fail[static_cast<std::size_t>(i)];
    }
    if (i == -1 && sj != s[(k + static_cast<std::size_t>(i) + 1) % n]) {
      if (sj < s[(k + static_cast<std::size_t>(i) + 1) % n]) k = j;
      fail[j - k] = -1;
    } else {
      fail[j - k] = i + 1;
    }
  }
  return k % n;
}

/// A byte string identifying the cyclic word up to rotation and orientation
/// reversal; two words compare equal exactly when the strings do.
inline std::string canonical_cyclic_key(const std::vector<std::pair<int, int>>& w) {
  const auto encode = [](const std::vector<std::pair<int, int>>& v) {
    std::vector<std::uint64_t> s;
    s.reserve(v.size());
    for (const auto& [edge, sign] : v)
      s.push_back((static_cast<std::uint64_t>(static_cast<std::uint32_t>(edge)) << 1) |
                  (sign > 0 ? 1u : 0u));
    return s;
  };
  const auto rotated = [](const std::vector<std::uint64_t>& s) {
    const std::size_t n = s.size(), k = least_rotation(s);
    std::vector<std::uint64_t> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(s[(k + i) % n]);
    return out;
  };
  const std::vector<std::uint64_t> fwd = rotated(encode(w));
  const std::vector<std::uint64_t> rev = rotated(encode(reversed_word(w)));
  const std::vector<std::uint64_t>& least = rev < fwd ? rev : fwd;
  return std::string(reinterpret_cast<const char*>(least.data()),
                     least.size() * sizeof(std::uint64_t));
}

/// Equality of cyclic words up to rotation and orientation reversal.
inline bool same_cyclic_word(const std::vector<std::pair<int, int>>& a,
                             const std::vector<std::pair<int, int>>& b) {
  if (a.size() != b.size()) return false;
  return canonical_cyclic_key(a) == canonical_cyclic_key(b);
}

}  // namespace detail

/// Rebuild the triangulation whose dual the polyhedron is.  Fails with a
/// dualization error naming a graph vertex whenever the local structure does
/// not match the four-Y model of a special polyhedron.
inline Triangulation dual_triangulation(const SpecialPolyhedron& p) {
  if (p.graph_vertices < 1)
    throw Error(ErrorCategory::not_dualizable, "polyhedron has no graph vertices");
  for (int v = 0; v < p.graph_vertices; ++v)
    if (p.degree(v) != 4)
      throw Error(ErrorCategory::not_dualizable,
                  "graph vertex " + std::to_string(v) + " has degree " +
                      std::to_string(p.degree(v)) + ", expected 4");

  Triangulation t(p.graph_vertices);
  std::vector<std::array<bool, 4>> used(static_cast<std::size_t>(p.graph_vertices),
                                        {false, false, false, false});
  for (std::size_t i = 0; i < p.graph_edges.size(); ++i) {
    const PolyhedronEdge& e = p.graph_edges[i];
    for (int side = 0; side < 2; ++side) {
      const int v = e.ends[static_cast<std::size_t>(side)];
      const int f = e.faces[static_cast<std::size_t>(side)];
      if (v < 0 || v >= p.graph_vertices)
        throw Error(ErrorCategory::not_dualizable,
                    "edge " + std::to_string(i) + " leaves the vertex range");
      if (f < 0 || f > 3)
        throw Error(ErrorCategory::not_dualizable,
                    "edge " + std::to_string(i) + " has face slot " + std::to_string(f));
    }
    const FaceEnd a{e.ends[0], e.faces[0]}, b{e.ends[1], e.faces[1]};
    if (a == b)
      throw Error(ErrorCategory::not_dualizable,
                  "graph vertex " + std::to_string(a.tet) +
                      " glues a face slot to itself");
    if (e.perm(e.faces[0]) != e.faces[1])
      throw Error(ErrorCategory::not_dualizable,
                  "edge " + std::to_string(i) +
                      " carries a label matching that misses its own face slots");
    for (const FaceEnd& fe : {a, b}) {
      if (used[static_cast<std::size_t>(fe.tet)][static_cast<std::size_t>(fe.face)])
        throw Error(ErrorCategory::not_dualizable,
                    "graph vertex " + std::to_string(fe.tet) +
                        " has two edges in one face slot");
      used[static_cast<std::size_t>(fe.tet)][static_cast<std::size_t>(fe.face)] = true;
    }
    t.glue(a, b, e.perm);
  }
  t.validate();

  // The regions must be the edge walks of the rebuilt triangulation.
  const EdgeClassification ec = edge_classes(t);
  if (ec.classes.size() != p.regions.size())
    throw Error(ErrorCategory::not_dualizable,
                "polyhedron has " + std::to_string(p.regions.size()) +
                    " regions but its graph dualizes with " +
                    std::to_string(ec.classes.size()) + " edge classes");
  std::unordered_map<std::string, int> available;
  for (const PolyhedronRegion& r : p.regions)
    ++available[detail::canonical_cyclic_key(r.word)];
  const SpecialPolyhedron rebuilt = dual_polyhedron(t, ec);
  for (std::size_t i = 0; i < rebuilt.regions.size(); ++i) {
    const auto it =
        available.find(detail::canonical_cyclic_key(rebuilt.regions[i].word));
    if (it == available.end() || it->second == 0)
      throw Error(ErrorCategory::not_dualizable,
                  "no region matches the walk of edge class " +
                      std::to_string(ec.classes[i].id));
    --it->second;
  }
  return t;
}

namespace detail {

/// Sparse staging area for the relation matrix of abelianized_pi1.  Entries
/// with pivot value +-1 are eliminated by unimodular row and column moves
/// (each contributing a trivial invariant factor) until only a small residue
/// is left for the dense Smith routine.  Region words coming from repeated
/// local rewrites consist overwhelmingly of single-letter and two-letter
/// relations, so the elimination removes almost everything without fill-in.
class SparseRelations {
 public:
  SparseRelations(std::size_t rows, std::size_t cols)
      : row_deg_(rows, 0), row_cols_(rows), row_alive_(rows, true),
        cols_(cols), col_alive_(cols, true) {}

  void add(std::size_t row, std::size_t col, int value) {
    staging_[col].emplace_back(static_cast<int>(row), value);
  }

  AbelianGroup reduce() {
    for (auto& [col, entries] : staging_) {
      std::sort(entries.begin(), entries.end());
      Column& c = cols_[col];
      for (const auto& [row, value] : entries) {
        if (!c.empty() && c.back().first == row)
          c.back().second += value;
        else
          c.emplace_back(row, Integer(value));
        if (c.back().second == 0) c.pop_back();
      }
      for (const auto& [row, value] : c) attach(static_cast<std::size_t>(row), col);
    }
    staging_.clear();

    std::vector<std::size_t> col_queue, row_queue;
    for (std::size_t c = 0; c < cols_.size(); ++c) col_queue.push_back(c);
    for (std::size_t r = 0; r < row_deg_.size(); ++r) row_queue.push_back(r);
    while (!col_queue.empty() || !row_queue.empty()) {
      while (!col_queue.empty()) {
        const std::size_t c = col_queue.back();
        col_queue.pop_back();
        if (!col_alive_[c]) continue;
        if (cols_[c].empty()) {
          col_alive_[c] = false;  // vacuous relation
        } else if (cols_[c].size() == 1 && unit(cols_[c][0].second)) {
          kill_row(static_cast<std::size_t>(cols_[c][0].first), c, &col_queue);
        } else if (cols_[c].size() == 2) {
          pivot_smallest_unit(c, &col_queue, &row_queue);
        }
      }
      while (!row_queue.empty()) {
        const std::size_t r = row_queue.back();
        row_queue.pop_back();
        if (!row_alive_[r] || row_deg_[r] != 1) continue;
        const std::size_t c = sole_column(r);
        if (c == cols_.size()) continue;
        const Integer& coeff = coefficient(c, r);
        if (!unit(coeff)) continue;
        drop_defining_column(r, c, &row_queue);
      }
      if (col_queue.empty() && row_queue.empty() && !general_pivot(&col_queue, &row_queue)) break;
    }

    return finish();
  }

 private:
  using Column = std::vector<std::pair<int, Integer>>;

  static bool unit(const Integer& v) { return v == 1 || v == -1; }

  void attach(std::size_t row, std::size_t col) {
    row_cols_[row].push_back(static_cast<int>(col));
    ++row_deg_[row];
  }

  const Integer& coefficient(std::size_t col, std::size_t row) const {
    static const Integer zero = 0;
    const Column& c = cols_[col];
    const auto it = std::lower_bound(
        c.begin(), c.end(), static_cast<int>(row),
        [](const std::pair<int, Integer>& e, int r) { return e.first < r; });
    return it != c.end() && it->first == static_cast<int>(row) ? it->second : zero;
  }

  /// Distinct live columns currently containing the row.
  std::vector<std::size_t> live_columns(std::size_t row) {
    std::vector<int>& raw = row_cols_[row];
    std::sort(raw.begin(), raw.end());
    raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
    std::vector<std::size_t> out;
    std::vector<int> keep;
    for (const int c : raw) {
      const std::size_t cc = static_cast<std::size_t>(c);
      if (!col_alive_[cc] || coefficient(cc, row) == 0) continue;
      out.push_back(cc);
      keep.push_back(c);
    }
    raw = std::move(keep);
    return out;
  }

  std::size_t sole_column(std::size_t row) {
    const std::vector<std::size_t> live = live_columns(row);
    return live.size() == 1 ? live[0] : cols_.size();
  }

  void erase_entry(std::size_t col, std::size_t row) {
    Column& c = cols_[col];
    const auto it = std::lower_bound(
        c.begin(), c.end(), static_cast<int>(row),
        [](const std::pair<int, Integer>& e, int r) { return e.first < r; });
    if (it != c.end() && it->first == static_cast<int>(row)) {
      c.erase(it);
      --row_deg_[row];
    }
  }

  /// The single-entry relation col says the generator row is zero: the row
  /// disappears from every other relation with no fill-in.
  void kill_row(std::size_t row, std::size_t col, std::vector<std::size_t>* col_queue) {
    for (const std::size_t c : live_columns(row)) {
      if (c == col) continue;
      erase_entry(c, row);
      col_queue->push_back(c);
    }
    row_alive_[row] = false;
    col_alive_[col] = false;
    row_deg_[row] = 0;
    cols_[col].clear();
    ++pivots_;
  }

  /// The relation col is the only place the generator row occurs, with a unit
  /// coefficient: it merely defines that generator, so both drop out.
  void drop_defining_column(std::size_t row, std::size_t col,
                            std::vector<std::size_t>* row_queue) {
    for (const auto& [r, value] : cols_[col]) {
      if (static_cast<std::size_t>(r) == row) continue;
      --row_deg_[static_cast<std::size_t>(r)];
      row_queue->push_back(static_cast<std::size_t>(r));
    }
    row_alive_[row] = false;
    col_alive_[col] = false;
    row_deg_[row] = 0;
    cols_[col].clear();
    ++pivots_;
  }

  /// Full pivot at (row, col): clear the row from every other column by
  /// column moves, then drop the defining pair.  Fill-in is bounded by the
  /// pivot column's other entries.
  void pivot_at(std::size_t row, std::size_t col,
                std::vector<std::size_t>* col_queue, std::vector<std::size_t>* row_queue) {
    const Integer s = coefficient(col, row);  // +-1
    for (const std::size_t c : live_columns(row)) {
      if (c == col) continue;
      const Integer w = coefficient(c, row);
      subtract_scaled(c, col, w * s);  // clears the row entry in c
      col_queue->push_back(c);
    }
    drop_defining_column(row, col, row_queue);
  }

  /// cols_[target] -= factor * cols_[source]
  void subtract_scaled(std::size_t target, std::size_t source, const Integer& factor) {
    const Column& src = cols_[source];
    Column& dst = cols_[target];
    Column merged;
    merged.reserve(dst.size() + src.size());
    std::size_t i = 0, j = 0;
    while (i < dst.size() || j < src.size()) {
      if (j == src.size() || (i < dst.size() && dst[i].first < src[j].first)) {
        merged.push_back(std::move(dst[i++]));
      } else if (i == dst.size() || src[j].first < dst[i].first) {
        Integer v = -factor * src[j].second;
        if (v != 0) {
          attach(static_cast<std::size_t>(src[j].first), target);
          merged.emplace_back(src[j].first, std::move(v));
        }
        ++j;
      } else {
        Integer v = dst[i].second - factor * src[j].second;
        if (v != 0)
          merged.emplace_back(dst[i].first, std::move(v));
        else
          --row_deg_[static_cast<std::size_t>(dst[i].first)];
        ++i, ++j;
      }
    }
    dst = std::move(merged);
  }

  /// Pivot on the smallest unit entry of a short column, preferring the row
  /// of lower degree to bound fill-in.
  void pivot_smallest_unit(std::size_t col,
                           std::vector<std::size_t>* col_queue, std::vector<std::size_t>* row_queue) {
    std::size_t best_row = row_deg_.size();
    for (const auto& [r, value] : cols_[col])
      if (unit(value) &&
          (best_row == row_deg_.size() ||
           row_deg_[static_cast<std::size_t>(r)] < row_deg_[best_row]))
        best_row = static_cast<std::size_t>(r);
    if (best_row == row_deg_.size()) return;
    pivot_at(best_row, col, col_queue, row_queue);
  }

  /// One Markowitz-style pivot over the whole residue; returns false when no
  /// unit entry remains or the residue is already small enough for the dense
  /// routine.
  bool general_pivot(std::vector<std::size_t>* col_queue, std::vector<std::size_t>* row_queue) {
    std::size_t live_rows = 0, live_cols = 0;
    for (std::size_t r = 0; r < row_alive_.size(); ++r)
      live_rows += row_alive_[r] && row_deg_[r] > 0 ? 1 : 0;
    for (std::size_t c = 0; c < cols_.size(); ++c) live_cols += col_alive_[c] ? 1 : 0;
    if (live_rows * live_cols <= kDenseCap) return false;
    std::size_t best_row = 0, best_col = 0, best_score = 0;
    bool found = false;
    for (std::size_t c = 0; c < cols_.size(); ++c) {
      if (!col_alive_[c]) continue;
      for (const auto& [r, value] : cols_[c]) {
        if (!unit(value)) continue;
        const std::size_t score =
            (cols_[c].size() - 1) * (row_deg_[static_cast<std::size_t>(r)] - 1);
        if (!found || score < best_score) {
          found = true;
          best_score = score;
          best_row = static_cast<std::size_t>(r);
          best_col = c;
        }
      }
    }
    if (!found) return false;
    pivot_at(best_row, best_col, col_queue, row_queue);
    return true;
  }

  AbelianGroup finish() const {
    std::vector<std::size_t> row_index(row_deg_.size(), 0), col_index;
    std::size_t live_rows = 0;
    for (std::size_t r = 0; r < row_deg_.size(); ++r)
      if (row_alive_[r] && row_deg_[r] > 0) row_index[r] = live_rows++;
    for (std::size_t c = 0; c < cols_.size(); ++c)
      if (col_alive_[c] && !cols_[c].empty()) col_index.push_back(c);
    IntegerMatrix residue(live_rows, col_index.size());
    for (std::size_t j = 0; j < col_index.size(); ++j)
      for (const auto& [r, value] : cols_[col_index[j]])
        residue(row_index[static_cast<std::size_t>(r)], j) = value;
    const SmithDecomposition snf = smith_normal_form(residue);
    AbelianGroup g;
    g.rank = row_deg_.size() - pivots_ - snf.rank;
    for (const Integer& d : snf.diagonal)
      if (d > 1) g.torsion.push_back(d);
    return g;
  }

  static constexpr std::size_t kDenseCap = 120'000;

  std::unordered_map<std::size_t, std::vector<std::pair<int, int>>> staging_;
  std::vector<int> row_deg_;
  std::vector<std::vector<int>> row_cols_;
  std::vector<char> row_alive_;
  std::vector<Column> cols_;
  std::vector<char> col_alive_;
  std::size_t pivots_ = 0;
};

}  // namespace detail

/// First homology of the polyhedron: graph edges off a spanning tree
/// generate, closed regions impose their abelianized words as relations.
inline AbelianGroup abelianized_pi1(const SpecialPolyhedron& p) {
  const int n = p.graph_vertices;
  if (n == 0) return AbelianGroup{};

  // spanning tree by breadth-first search
  std::vector<std::vector<std::pair<int, int>>> incident(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < p.graph_edges.size(); ++i) {
    const PolyhedronEdge& e = p.graph_edges[i];
    incident[static_cast<std::size_t>(e.ends[0])].emplace_back(static_cast<int>(i), e.ends[1]);
    if (e.ends[1] != e.ends[0])
      incident[static_cast<std::size_t>(e.ends[1])].emplace_back(static_cast<int>(i), e.ends[0]);
  }
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::vector<bool> in_tree(p.graph_edges.size(), false);
  std::vector<int> queue{0};
  seen[0] = true;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (const auto& [edge, other] : incident[static_cast<std::size_t>(queue[head])]) {
      if (seen[static_cast<std::size_t>(other)]) continue;
      seen[static_cast<std::size_t>(other)] = true;
      in_tree[static_cast<std::size_t>(edge)] = true;
      queue.push_back(other);
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw Error(ErrorCategory::disconnected, "polyhedron graph is disconnected");

  std::vector<int> generator_of(p.graph_edges.size(), -1);
  std::size_t generators = 0;
  for (std::size_t i = 0; i < p.graph_edges.size(); ++i)
    if (!in_tree[i]) generator_of[i] = static_cast<int>(generators++);

  std::size_t closed = 0;
  for (const PolyhedronRegion& r : p.regions) closed += r.open ? 0 : 1;
  detail::SparseRelations relations(generators, closed);
  std::size_t col = 0;
  for (const PolyhedronRegion& r : p.regions) {
    if (r.open) continue;
    for (const auto& [edge, sign] : r.word)
      if (generator_of[static_cast<std::size_t>(edge)] >= 0)
        relations.add(static_cast<std::size_t>(generator_of[static_cast<std::size_t>(edge)]),
                      col, sign);
    ++col;
  }
  return relations.reduce();
}

}  // namespace tri3
