#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <numeric>
#include <random>
#include <set>

#include <tri3/orbits.hpp>

#include "util.hpp"

using namespace tri3;
using tri3::testutil::data_path;
using tri3::testutil::random_triangulation;
using tri3::testutil::read_file;

namespace {

struct Dsu {
  std::vector<int> parent;
  explicit Dsu(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x)
      x = parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    return x;
  }
  void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

/// Independent partition of the 6n tetrahedron edges into gluing orbits,
/// working on directed germs (t, (u, v)).  An orbit is non-orientable
/// exactly when some directed germ is equivalent to its own reverse.
struct EdgeOracle {
  std::vector<int> wedge_cls;    // 6n entries, class ids in canonical order
  std::vector<int> valences;     // per class
  std::vector<char> orientable;  // per class
};

EdgeOracle edge_oracle(const Triangulation& T) {
  const int n = T.size();
  const auto didx = [](int t, int u, int v) { return (t * 4 + u) * 4 + v; };
  Dsu directed(16 * n);
  Dsu undirected(6 * n);
  for (int t = 0; t < n; ++t)
    for (int u = 0; u < 4; ++u)
      for (int v = 0; v < 4; ++v) {
        if (u == v) continue;
        for (int f = 0; f < 4; ++f) {
          if (f == u || f == v) continue;
          const Gluing& g = T.gluing(t, f);
          directed.unite(didx(t, u, v), didx(g.to.tet, g.perm(u), g.perm(v)));
          undirected.unite(t * 6 + edge_index(u, v),
                           g.to.tet * 6 + edge_index(g.perm(u), g.perm(v)));
        }
      }
  EdgeOracle out;
  out.wedge_cls.assign(static_cast<std::size_t>(6 * n), -1);
  std::map<int, int> root_to_id;
  for (int w = 0; w < 6 * n; ++w) {
    const int root = undirected.find(w);
    const auto [it, fresh] = root_to_id.try_emplace(root, static_cast<int>(root_to_id.size()));
    if (fresh) {
      out.valences.push_back(0);
      out.orientable.push_back(1);
    }
    out.wedge_cls[static_cast<std::size_t>(w)] = it->second;
    ++out.valences[static_cast<std::size_t>(it->second)];
  }
  for (int w = 0; w < 6 * n; ++w) {
    const int t = w / 6;
    const auto [a, b] = tet_edges[static_cast<std::size_t>(w % 6)];
    if (directed.find(didx(t, a, b)) == directed.find(didx(t, b, a)))
      out.orientable[static_cast<std::size_t>(out.wedge_cls[static_cast<std::size_t>(w)])] = 0;
  }
  return out;
}

/// Independent Euler characteristic and orientability of one link surface.
/// Orientability is decided by exhaustive search over all orientation
/// assignments, so it shares no logic with the propagation in the library.
struct LinkOracleResult {
  int chi = 0;
  bool orientable = false;
};

LinkOracleResult link_oracle(const Triangulation& T,
                             const std::vector<std::array<int, 2>>& corners) {
  const int F = static_cast<int>(corners.size());
  std::map<std::array<int, 2>, int> index;
  for (int i = 0; i < F; ++i) index[corners[static_cast<std::size_t>(i)]] = i;

  const auto partner_side = [&](int ci, int f) {
    const auto [t, v] = corners[static_cast<std::size_t>(ci)];
    const Gluing& g = T.gluing(t, f);
    return std::pair<int, int>(index.at(std::array<int, 2>{g.to.tet, g.perm(v)}),
                               g.to.face);
  };

  // Count sides (each gluing-orbit of triangle sides once).
  int edges_count = 0;
  std::set<std::pair<int, int>> seen;
  for (int ci = 0; ci < F; ++ci) {
    const int v = corners[static_cast<std::size_t>(ci)][1];
    for (int f = 0; f < 4; ++f) {
      if (f == v || seen.count({ci, f})) continue;
      seen.insert({ci, f});
      seen.insert(partner_side(ci, f));
      ++edges_count;
    }
  }

  // Count link vertices via germs (ci, w).
  Dsu germs(4 * F);
  for (int ci = 0; ci < F; ++ci) {
    const auto [t, v] = corners[static_cast<std::size_t>(ci)];
    for (int w = 0; w < 4; ++w) {
      if (w == v) continue;
      for (int f : faces_containing_edge(v, w)) {
        const Gluing& g = T.gluing(t, f);
        const int cj = index.at(std::array<int, 2>{g.to.tet, g.perm(v)});
        germs.unite(ci * 4 + w, cj * 4 + g.perm(w));
      }
    }
  }
  std::set<int> roots;
  for (int ci = 0; ci < F; ++ci) {
    const int v = corners[static_cast<std::size_t>(ci)][1];
    for (int w = 0; w < 4; ++w)
      if (w != v) roots.insert(germs.find(ci * 4 + w));
  }
  const int vertices_count = static_cast<int>(roots.size());

  // Orientability by brute force over all 2^F orientation assignments.
  const auto cycle_of = [&](int ci, bool flip) {
    const int v = corners[static_cast<std::size_t>(ci)][1];
    std::vector<int> labels;
    for (int w = 0; w < 4; ++w)
      if (w != v) labels.push_back(w);
    if (flip) std::reverse(labels.begin(), labels.end());
    return labels;
  };
  const auto traverses = [](const std::vector<int>& cycle, int from, int to) {
    for (int k = 0; k < 3; ++k)
      if (cycle[static_cast<std::size_t>(k)] == from &&
          cycle[static_cast<std::size_t>((k + 1) % 3)] == to)
        return true;
    return false;
  };

  bool orientable = false;
  for (unsigned mask = 0; mask < (1u << F) && !orientable; ++mask) {
    bool ok = true;
    for (int ci = 0; ci < F && ok; ++ci) {
      const auto [t, v] = corners[static_cast<std::size_t>(ci)];
      const auto cyc = cycle_of(ci, (mask >> ci) & 1u);
      for (int f = 0; f < 4 && ok; ++f) {
        if (f == v) continue;
        const Gluing& g = T.gluing(t, f);
        const auto [cj, f2] = partner_side(ci, f);
        const auto cyc2 = cycle_of(cj, (mask >> cj) & 1u);
        // the side on face f joins the two labels other than v and f
        std::array<int, 2> xy{};
        int k = 0;
        for (int w = 0; w < 4; ++w)
          if (w != v && w != f) xy[static_cast<std::size_t>(k++)] = w;
        const int from = traverses(cyc, xy[0], xy[1]) ? xy[0] : xy[1];
        const int to = xy[0] + xy[1] - from;
        // coherent orientations traverse the glued side in opposite ways
        if (!traverses(cyc2, g.perm(to), g.perm(from))) ok = false;
        (void)f2;
      }
    }
    orientable = ok;
  }

  return LinkOracleResult{vertices_count - edges_count + F, orientable};
}

}  // namespace

TEST_CASE("edge classes of the two-tetrahedra identity gluing") {
  const Triangulation T = Triangulation::parse(read_file(data_path("fig1.tri")));
  const EdgeClassification ec = edge_classes(T);
  REQUIRE(ec.face_classes.size() == 4);
  REQUIRE(ec.classes.size() == 6);
  int total = 0;
  for (const EdgeClass& c : ec.classes) {
    REQUIRE(c.valence == 2);
    REQUIRE(c.orientable);
    REQUIRE(c.wedges.size() == 2);
    REQUIRE(c.boundary_word.size() == 2);
    // one crossing in each graph direction, through two distinct face pairs
    REQUIRE(c.boundary_word[0].second + c.boundary_word[1].second == 0);
    REQUIRE(c.boundary_word[0].first != c.boundary_word[1].first);
    total += c.valence;
  }
  REQUIRE(total == 12);
  REQUIRE(is_manifold(T).manifold);
  REQUIRE(is_manifold(T).non_orientable_classes.empty());
}

TEST_CASE("edge classes of the one-tet example") {
  const Triangulation T = Triangulation::parse(read_file(data_path("one_tet.tri")));
  const EdgeClassification ec = edge_classes(T);
  std::multiset<int> valences;
  for (const EdgeClass& c : ec.classes) {
    valences.insert(c.valence);
    REQUIRE(c.orientable);
  }
  REQUIRE(valences == std::multiset<int>{1, 1, 4});
  REQUIRE(is_manifold(T).manifold);
}

TEST_CASE("edge partition matches the directed-germ oracle") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 5);
    const Triangulation T = random_triangulation(n, rng);
    const EdgeClassification ec = edge_classes(T);
    const EdgeOracle oracle = edge_oracle(T);

    REQUIRE(ec.classes.size() == oracle.valences.size());
    // the two partitions agree up to renaming of class ids
    std::map<int, int> mine_to_oracle;
    for (int t = 0; t < n; ++t)
      for (int e = 0; e < 6; ++e) {
        const int mine = ec.edge_class_of[static_cast<std::size_t>(t)][static_cast<std::size_t>(e)];
        const int theirs = oracle.wedge_cls[static_cast<std::size_t>(t * 6 + e)];
        REQUIRE(mine >= 0);
        const auto [it, fresh] = mine_to_oracle.try_emplace(mine, theirs);
        REQUIRE(it->second == theirs);
      }
    int total = 0;
    for (const EdgeClass& c : ec.classes) {
      const int oid = mine_to_oracle.at(c.id);
      REQUIRE(c.valence == oracle.valences[static_cast<std::size_t>(oid)]);
      REQUIRE(c.orientable == static_cast<bool>(oracle.orientable[static_cast<std::size_t>(oid)]));
      // walk closure: one turn if orientable, two turns if not
      REQUIRE(c.wedges.size() == static_cast<std::size_t>(c.orientable ? c.valence : 2 * c.valence));
      REQUIRE(c.boundary_word.size() == c.wedges.size());
      total += c.valence;
    }
    REQUIRE(total == 6 * n);
  }
}

TEST_CASE("valence sum equals 6n on ten thousand random gluings") {
  std::mt19937_64 rng(20260823);
  for (int trial = 0; trial < 10'000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const Triangulation T = random_triangulation(n, rng);
    const EdgeClassification ec = edge_classes(T);
    int total = 0;
    for (const EdgeClass& c : ec.classes) total += c.valence;
    REQUIRE(total == 6 * n);
  }
}

TEST_CASE("boundary words cross faces containing the wedge") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Triangulation T = random_triangulation(1 + static_cast<int>(rng() % 4), rng);
    const EdgeClassification ec = edge_classes(T);
    for (const EdgeClass& c : ec.classes)
      for (std::size_t i = 0; i < c.wedges.size(); ++i) {
        const Wedge& w = c.wedges[i];
        const auto faces = faces_containing_edge(w.a, w.b);
        const int fc = c.boundary_word[i].first;
        const bool hits =
            ec.face_class_of[static_cast<std::size_t>(w.tet)][static_cast<std::size_t>(faces[0])] == fc ||
            ec.face_class_of[static_cast<std::size_t>(w.tet)][static_cast<std::size_t>(faces[1])] == fc;
        REQUIRE(hits);
        REQUIRE(std::abs(c.boundary_word[i].second) == 1);
      }
  }
}

TEST_CASE("walk tie-break seeds do not change the partition data") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const Triangulation T = random_triangulation(1 + static_cast<int>(rng() % 4), rng);
    const EdgeClassification base = edge_classes(T);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const EdgeClassification other = edge_classes(T, WalkOptions{seed});
      REQUIRE(other.edge_class_of == base.edge_class_of);
      REQUIRE(other.classes.size() == base.classes.size());
      for (std::size_t i = 0; i < base.classes.size(); ++i) {
        REQUIRE(other.classes[i].valence == base.classes[i].valence);
        REQUIRE(other.classes[i].orientable == base.classes[i].orientable);
        REQUIRE(other.classes[i].wedges.size() == base.classes[i].wedges.size());
        std::multiset<Wedge> w1(base.classes[i].wedges.begin(), base.classes[i].wedges.end());
        std::multiset<Wedge> w2(other.classes[i].wedges.begin(), other.classes[i].wedges.end());
        REQUIRE(w1 == w2);
      }
    }
  }
}

TEST_CASE("vertex links of the two-tetrahedra identity gluing are spheres") {
  const Triangulation T = Triangulation::parse(read_file(data_path("fig1.tri")));
  const std::vector<VertexLink> links = vertex_links(T);
  REQUIRE(links.size() == 4);
  int corner_total = 0;
  for (const VertexLink& l : links) {
    REQUIRE(l.corners.size() == 2);
    REQUIRE(l.euler_characteristic == 2);
    REQUIRE(l.orientable);
    REQUIRE(l.genus == 0);
    corner_total += static_cast<int>(l.corners.size());
  }
  REQUIRE(corner_total == 8);
}

TEST_CASE("vertex links of the one-tet example are spheres") {
  const Triangulation T = Triangulation::parse(read_file(data_path("one_tet.tri")));
  const std::vector<VertexLink> links = vertex_links(T);
  REQUIRE(links.size() == 2);
  for (const VertexLink& l : links) {
    REQUIRE(l.euler_characteristic == 2);
    REQUIRE(l.orientable);
  }
}

TEST_CASE("vertex links match the exhaustive-orientation oracle") {
  std::mt19937_64 rng(777);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const Triangulation T = random_triangulation(n, rng);
    const std::vector<VertexLink> links = vertex_links(T);
    int corner_total = 0;
    for (const VertexLink& l : links) {
      corner_total += static_cast<int>(l.corners.size());
      REQUIRE(l.euler_characteristic <= 2);
      const LinkOracleResult oracle = link_oracle(T, l.corners);
      REQUIRE(l.euler_characteristic == oracle.chi);
      REQUIRE(l.orientable == oracle.orientable);
      if (l.orientable)
        REQUIRE(l.euler_characteristic == 2 - 2 * l.genus);
      else
        REQUIRE(l.euler_characteristic == 2 - l.genus);
    }
    REQUIRE(corner_total == 4 * n);
  }
}

TEST_CASE("non-orientable edge classes are reported by the manifold test") {
  int non_manifold_count = 0;
  for (const Triangulation& T : tri3::testutil::all_one_tet_systems()) {
    const EdgeOracle oracle = edge_oracle(T);
    const bool oracle_manifold =
        std::all_of(oracle.orientable.begin(), oracle.orientable.end(),
                    [](char c) { return c != 0; });
    const ManifoldReport report = is_manifold(T);
    REQUIRE(report.manifold == oracle_manifold);
    REQUIRE(report.manifold == report.non_orientable_classes.empty());
    if (!report.manifold) {
      ++non_manifold_count;
      const EdgeClassification ec = edge_classes(T);
      for (int id : report.non_orientable_classes)
        REQUIRE_FALSE(ec.classes[static_cast<std::size_t>(id)].orientable);
    }
  }
  // the search does hit gluings with Moebius edge classes
  REQUIRE(non_manifold_count > 0);
}
