#pragma once

#include <algorithm>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <tri3/core.hpp>

namespace tri3::testutil {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string data_path(const std::string& name) {
  return std::string(TRI3_SOURCE_DIR) + "/tests/data/" + name;
}

inline Perm4 perm(int a, int b, int c, int d) { return Perm4::from_images(a, b, c, d); }

/// Uniformly random complete gluing pattern on n tetrahedra; resamples
/// until the gluing graph is connected.
inline Triangulation random_triangulation(int n, std::mt19937_64& rng) {
  for (;;) {
    Triangulation T(n);
    std::vector<FaceEnd> ends;
    for (int t = 0; t < n; ++t)
      for (int f = 0; f < 4; ++f) ends.push_back(FaceEnd{t, f});
    std::shuffle(ends.begin(), ends.end(), rng);
    for (std::size_t i = 0; i + 1 < ends.size(); i += 2) {
      const FaceEnd a = ends[i];
      const FaceEnd b = ends[i + 1];
      std::vector<Perm4> candidates;
      for (const Perm4& p : Perm4::all())
        if (p(a.face) == b.face) candidates.push_back(p);
      std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
      T.glue(a, b, candidates[pick(rng)]);
    }
    if (T.connected()) return T;
  }
}

/// Random relabeling (tet permutation + per-tet vertex permutations).
inline Triangulation random_relabel(const Triangulation& T, std::mt19937_64& rng) {
  const int n = T.size();
  std::vector<int> tet_map(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) tet_map[static_cast<std::size_t>(i)] = i;
  std::shuffle(tet_map.begin(), tet_map.end(), rng);
  std::vector<Perm4> vertex_maps;
  std::uniform_int_distribution<std::size_t> pick(0, 23);
  for (int i = 0; i < n; ++i) vertex_maps.push_back(Perm4::all()[pick(rng)]);
  return relabel(T, tet_map, vertex_maps);
}

/// All 108 complete gluing systems on one tetrahedron: three perfect
/// matchings of the four faces, six admissible permutations per pair.
inline std::vector<Triangulation> all_one_tet_systems() {
  static const std::array<std::array<std::array<int, 2>, 2>, 3> matchings{{
      {{{0, 1}, {2, 3}}},
      {{{0, 2}, {1, 3}}},
      {{{0, 3}, {1, 2}}},
  }};
  std::vector<Triangulation> out;
  for (const auto& m : matchings) {
    std::array<std::vector<Perm4>, 2> perms;
    for (int pair = 0; pair < 2; ++pair)
      for (const Perm4& p : Perm4::all())
        if (p(m[static_cast<std::size_t>(pair)][0]) ==
            m[static_cast<std::size_t>(pair)][1])
          perms[static_cast<std::size_t>(pair)].push_back(p);
    for (const Perm4& p0 : perms[0])
      for (const Perm4& p1 : perms[1]) {
        Triangulation T(1);
        T.glue(FaceEnd{0, m[0][0]}, FaceEnd{0, m[0][1]}, p0);
        T.glue(FaceEnd{0, m[1][0]}, FaceEnd{0, m[1][1]}, p1);
        out.push_back(std::move(T));
      }
  }
  return out;
}

/// Runs fn and returns the category of the Error it throws; fails if it
/// does not throw a tri3::Error.
inline ErrorCategory category_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.category();
  }
  throw std::runtime_error("expected the operation to throw tri3::Error");
}

}  // namespace tri3::testutil
