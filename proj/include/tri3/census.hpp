#pragma once
/// \file
/// Canonical forms, isomorphism testing, automorphism groups, and
/// isomorph-free enumeration of loose triangulations.
///
/// Two triangulations are combinatorially equivalent when a simultaneous
/// relabeling (a permutation of the tetrahedra together with a vertex
/// relabeling of each tetrahedron) carries every gluing of one onto a gluing
/// of the other.  The canonical form of a triangulation is the
/// lexicographically least serialization over all breadth-first transport
/// relabelings, so equal signatures characterize equivalent triangulations.

#include <algorithm>
#include <array>
#include <atomic>
#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <tri3/core.hpp>
#include <tri3/geometry.hpp>

namespace tri3 {

/// A combinatorial equivalence witness: tetrahedron t of the source is sent
/// to tet_map[t] of the target and its vertex labels are renamed by
/// vertex_maps[t]; gluing permutations transport by conjugation.
struct Isomorphism {
  std::vector<int> tet_map;
  std::vector<Perm4> vertex_maps;

  friend bool operator==(const Isomorphism&, const Isomorphism&) = default;

  /// True when applying this relabeling to `from` reproduces `to` exactly.
  bool maps(const Triangulation& from, const Triangulation& to) const {
    const std::size_t n = static_cast<std::size_t>(from.size());
    if (from.size() != to.size()) return false;
    if (tet_map.size() != n || vertex_maps.size() != n) return false;
    std::vector<char> hit(n, 0);
    for (int v : tet_map) {
      if (v < 0 || v >= from.size() || hit[static_cast<std::size_t>(v)]) return false;
      hit[static_cast<std::size_t>(v)] = 1;
    }
    return relabel(from, tet_map, vertex_maps) == to;
  }
};

/// The identity relabeling on n tetrahedra.
inline Isomorphism identity_isomorphism(int n) {
  Isomorphism iso;
  iso.tet_map.resize(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) iso.tet_map[static_cast<std::size_t>(t)] = t;
  iso.vertex_maps.assign(static_cast<std::size_t>(n), Perm4{});
  return iso;
}

namespace detail {

/// One gluing in serialization order: the lexicographically smaller face-end,
/// its partner, and the permutation images.  Record streams compare exactly
/// like the serialized text for triangulations with fewer than ten tetrahedra,
/// and in a labeling-independent way in general.
struct GluingRecord {
  int a_tet = 0;
  int a_face = 0;
  int b_tet = 0;
  int b_face = 0;
  std::array<int, 4> perm{};

  friend constexpr auto operator<=>(const GluingRecord&, const GluingRecord&) = default;
};

inline GluingRecord make_record(FaceEnd a, FaceEnd b, const Perm4& p) {
  return GluingRecord{a.tet, a.face, b.tet, b.face, {p(0), p(1), p(2), p(3)}};
}

/// Breadth-first transport relabeling.  Starting from a base tetrahedron with
/// a chosen vertex relabeling, tetrahedra are renamed in discovery order and
/// vertex labels are transported so that every discovery step happens along
/// the identity permutation.  next() emits the gluing records of the
/// relabeled triangulation in serialization order; the walk ends at the first
/// slot whose gluing is not installed (partial triangulations) or when no
/// reachable tetrahedron remains (base in a small component).
class TransportWalk {
 public:
  TransportWalk(const Triangulation& T, int base_tet, const Perm4& base_map)
      : T_(&T),
        new_of_(static_cast<std::size_t>(T.size()), -1),
        old_of_(static_cast<std::size_t>(T.size()), -1),
        vmap_(static_cast<std::size_t>(T.size())),
        inv_vmap_(static_cast<std::size_t>(T.size())) {
    reset(base_tet, base_map);
  }

  /// Restarts the walk from another base without reallocating.
  void reset(int base_tet, const Perm4& base_map) {
    std::fill(new_of_.begin(), new_of_.end(), -1);
    new_of_[static_cast<std::size_t>(base_tet)] = 0;
    old_of_[0] = base_tet;
    vmap_[static_cast<std::size_t>(base_tet)] = base_map;
    inv_vmap_[static_cast<std::size_t>(base_tet)] = base_map.inverse();
    discovered_ = 1;
    k_ = 0;
    f_ = 0;
    stalled_ = false;
  }

  /// Produces the next record; false once the walk has ended.
  bool next(GluingRecord& out) {
    if (stalled_) return false;
    while (k_ < discovered_) {
      if (f_ == 4) {
        ++k_;
        f_ = 0;
        continue;
      }
      const int t = old_of_[static_cast<std::size_t>(k_)];
      const Perm4 s = vmap_[static_cast<std::size_t>(t)];
      const int f = inv_vmap_[static_cast<std::size_t>(t)](f_);
      if (!T_->is_glued(t, f)) {
        stalled_ = true;
        return false;
      }
      const Gluing& g = T_->gluing(t, f);
      const std::size_t t2 = static_cast<std::size_t>(g.to.tet);
      if (new_of_[t2] < 0) {
        new_of_[t2] = discovered_;
        old_of_[static_cast<std::size_t>(discovered_)] = g.to.tet;
        vmap_[t2] = s * g.perm.inverse();
        inv_vmap_[t2] = vmap_[t2].inverse();
        ++discovered_;
      }
      const FaceEnd here{k_, f_};
      const FaceEnd there{new_of_[t2], vmap_[t2](g.to.face)};
      ++f_;
      if (there < here) continue;  // already emitted from the smaller key
      out = make_record(here, there, vmap_[t2] * g.perm * s.inverse());
      return true;
    }
    return false;
  }

  /// Old-to-new tetrahedron labels (-1 where the walk never arrived).
  const std::vector<int>& tet_map() const { return new_of_; }
  /// Per old tetrahedron, the vertex relabeling chosen by transport.
  const std::vector<Perm4>& vertex_maps() const { return vmap_; }

 private:
  const Triangulation* T_;
  std::vector<int> new_of_;
  std::vector<int> old_of_;
  std::vector<Perm4> vmap_;
  std::vector<Perm4> inv_vmap_;
  int discovered_ = 1;
  int k_ = 0;
  int f_ = 0;
  bool stalled_ = false;
};

/// Per-tetrahedron relabeling invariant: the sorted valences of the six edge
/// classes meeting the tetrahedron.  Any equivalence preserves it, so only
/// base images sharing the fingerprint of tetrahedron 0 can seed one; the
/// prefilter keeps the searches near-linear on very large inputs.
inline std::vector<std::array<int, 6>> tet_fingerprints(const Triangulation& T,
                                                        const EdgeClassification& ec) {
  std::vector<std::array<int, 6>> out(static_cast<std::size_t>(T.size()));
  for (int t = 0; t < T.size(); ++t) {
    std::array<int, 6>& fp = out[static_cast<std::size_t>(t)];
    for (int e = 0; e < 6; ++e) {
      const int cls = ec.edge_class_of[static_cast<std::size_t>(t)][static_cast<std::size_t>(e)];
      fp[static_cast<std::size_t>(e)] = ec.classes[static_cast<std::size_t>(cls)].valence;
    }
    std::sort(fp.begin(), fp.end());
  }
  return out;
}

/// Tries to extend "source tetrahedron 0 maps to (t0, s0)" to a full
/// equivalence from `from` onto `to` by propagating along gluings.
inline std::optional<Isomorphism> extend_equivalence(const Triangulation& from,
                                                     const Triangulation& to,
                                                     int t0, const Perm4& s0) {
  const std::size_t n = static_cast<std::size_t>(from.size());
  std::vector<int> img(n, -1);
  std::vector<Perm4> vm(n);
  std::vector<char> used(n, 0);
  img[0] = t0;
  vm[0] = s0;
  used[static_cast<std::size_t>(t0)] = 1;
  std::vector<int> queue{0};
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const int t = queue[qi];
    const std::size_t ti = static_cast<std::size_t>(t);
    for (int f = 0; f < 4; ++f) {
      const Gluing& g = from.gluing(t, f);
      const Gluing& h = to.gluing(img[ti], vm[ti](f));
      const std::size_t t2 = static_cast<std::size_t>(g.to.tet);
      const Perm4 forced = h.perm * vm[ti] * g.perm.inverse();
      if (img[t2] < 0) {
        if (used[static_cast<std::size_t>(h.to.tet)]) return std::nullopt;
        used[static_cast<std::size_t>(h.to.tet)] = 1;
        img[t2] = h.to.tet;
        vm[t2] = forced;
        queue.push_back(g.to.tet);
      } else if (img[t2] != h.to.tet || !(vm[t2] == forced)) {
        return std::nullopt;
      }
    }
  }
  Isomorphism iso{std::move(img), std::move(vm)};
  if (!iso.maps(from, to)) return std::nullopt;
  return iso;
}

}  // namespace detail

/// A canonical representative of a combinatorial equivalence class.
struct CanonicalForm {
  Triangulation representative;
  /// serialize() of the representative; equal signatures characterize
  /// equivalent triangulations.
  std::string signature;
  /// Relabels the input triangulation onto the representative.
  Isomorphism to_representative;
};

/// Computes the canonical form: over every choice of base tetrahedron and
/// vertex relabeling of it, runs the breadth-first transport relabeling and
/// keeps the least resulting serialization.  Idempotent, and constant on
/// equivalence classes.
inline CanonicalForm canonical_form(const Triangulation& T) {
  T.validate();
  const int n = T.size();
  std::vector<detail::GluingRecord> best, cur;
  int best_t0 = 0;
  Perm4 best_s0{};
  bool first = true;
  detail::GluingRecord r;
  for (int t0 = 0; t0 < n; ++t0)
    for (const Perm4& s0 : Perm4::all()) {
      detail::TransportWalk walk(T, t0, s0);
      cur.clear();
      while (walk.next(r)) cur.push_back(r);
      if (first || cur < best) {
        best = cur;
        best_t0 = t0;
        best_s0 = s0;
        first = false;
      }
    }
  detail::TransportWalk walk(T, best_t0, best_s0);
  while (walk.next(r)) {
  }
  Isomorphism iso{walk.tet_map(), walk.vertex_maps()};
  Triangulation rep = relabel(T, iso.tet_map, iso.vertex_maps);
  std::string signature = rep.serialize();
  return CanonicalForm{std::move(rep), std::move(signature), std::move(iso)};
}

/// Searches for a combinatorial equivalence from `a` onto `b`; the returned
/// witness is verified against both triangulations before being handed out.
/// A witness exists if and only if the two canonical signatures agree.
inline std::optional<Isomorphism> is_isomorphic(const Triangulation& a,
                                                const Triangulation& b) {
  a.validate();
  b.validate();
  if (a.size() != b.size()) return std::nullopt;
  const std::vector<std::array<int, 6>> fa = detail::tet_fingerprints(a, edge_classes(a));
  const std::vector<std::array<int, 6>> fb = detail::tet_fingerprints(b, edge_classes(b));
  for (int t0 = 0; t0 < a.size(); ++t0) {
    if (fb[static_cast<std::size_t>(t0)] != fa[0]) continue;
    for (const Perm4& s0 : Perm4::all())
      if (auto iso = detail::extend_equivalence(a, b, t0, s0)) return iso;
  }
  return std::nullopt;
}

/// Automorphism group data together with the isometry-group dictionary for
/// the double.  The orientation-preserving isometry group of the double is
/// identified with the automorphism group, and the full isometry group with
/// its product with the order-two mirror swap; the identification is claimed
/// (valid = true) only when the triangulation is not flagged by
/// exceptional_candidate().
struct IsomGroupReport {
  std::size_t aut_order = 0;
  /// Every automorphism except the identity (the groups are small enough to
  /// list in full, and the full list certainly generates).
  std::vector<Isomorphism> aut_generators;
  std::size_t isom_plus_order = 0;  ///< = aut_order
  std::size_t isom_order = 0;       ///< = 2 * aut_order
  bool exceptional_flag = false;
  bool valid = false;
};

/// Computes the automorphism group by backtracking over the image of
/// tetrahedron 0 with transport propagation.  Orientation-reversing vertex
/// relabelings count as automorphisms; the mirror factor of the double is
/// accounted separately by isom_order.
inline IsomGroupReport automorphisms(const Triangulation& T,
                                     const EdgeClassification& ec) {
  T.validate();
  IsomGroupReport report;
  const Isomorphism id = identity_isomorphism(T.size());
  const std::vector<std::array<int, 6>> fp = detail::tet_fingerprints(T, ec);
  for (int t0 = 0; t0 < T.size(); ++t0) {
    if (fp[static_cast<std::size_t>(t0)] != fp[0]) continue;
    for (const Perm4& s0 : Perm4::all())
      if (auto iso = detail::extend_equivalence(T, T, t0, s0)) {
        ++report.aut_order;
        if (!(*iso == id)) report.aut_generators.push_back(std::move(*iso));
      }
  }
  report.isom_plus_order = report.aut_order;
  report.isom_order = 2 * report.aut_order;
  report.exceptional_flag = exceptional_candidate(T, ec);
  report.valid = !report.exceptional_flag;
  return report;
}

inline IsomGroupReport automorphisms(const Triangulation& T) {
  return automorphisms(T, edge_classes(T));
}

/// Options for the census enumeration.
struct CensusOptions {
  /// Worker threads; results are identical for every value.
  int jobs = 1;
  /// When nonzero, stop after this many classes and flag the truncation.
  std::size_t limit = 0;
  /// Optional filter, applied to each canonical representative.
  std::function<bool(const Triangulation&)> filter;
};

struct CensusResult {
  /// One canonical form per equivalence class, in ascending signature order.
  std::vector<CanonicalForm> classes;
  /// True when `limit` stopped the search before it finished; the class list
  /// is guaranteed complete only when this is false.  Never silent.
  bool truncated = false;
};

namespace detail {

/// Depth-first generation of complete gluings with two standard reductions:
/// fresh tetrahedra are brought in with the smallest unused index, and a
/// branch is pruned as soon as some transport relabeling of the partial
/// gluing is lexicographically smaller than the partial gluing itself (no
/// completion of such a branch can be its own canonical representative).
/// A complete gluing is emitted iff it realizes the least transport stream,
/// which selects exactly one labeled triangulation per equivalence class.
///
/// Record streams only ever extend as gluings are added, so a relabeling
/// whose stream is already strictly larger than the prefix can never become
/// smaller again.  The search therefore carries the set of still-undecided
/// relabelings (encoded as base_tet * 24 + index into Perm4::all()) down the
/// tree and drops dead candidates permanently.
class CensusSearch {
 public:
  CensusSearch(int n, const CensusOptions& opts, std::atomic<std::size_t>& found,
               std::atomic<bool>& truncated)
      : n_(n), opts_(&opts), found_(&found), truncated_(&truncated), T_(n),
        walk_(T_, 0, Perm4{}) {}

  /// Replays a previously collected prefix (already prune-checked).
  void seed(const std::vector<GluingRecord>& prefix) {
    for (const GluingRecord& rec : prefix) apply(rec);
  }

  /// Runs the search below the current prefix, appending results to `out`.
  void run(std::vector<CanonicalForm>& out) {
    out_ = &out;
    frontier_ = nullptr;
    start();
  }

  /// Expands the tree only down to `depth` gluings and collects the surviving
  /// prefixes instead of recursing further.
  void collect_frontier(int depth, std::vector<std::vector<GluingRecord>>& out) {
    frontier_ = &out;
    frontier_depth_ = depth;
    start();
  }

 private:
  void start() {
    std::vector<int> alive;
    if (refresh_alive({}, 0, alive)) return;  // a smaller relabeling exists
    alive_stack_.push_back(std::move(alive));
    dfs();
    alive_stack_.pop_back();
  }

  void apply(const GluingRecord& rec) {
    T_.glue(FaceEnd{rec.a_tet, rec.a_face}, FaceEnd{rec.b_tet, rec.b_face},
            Perm4::from_images(rec.perm[0], rec.perm[1], rec.perm[2], rec.perm[3]));
    prefix_.push_back(rec);
    touched_ = std::max(touched_, std::max(rec.a_tet, rec.b_tet) + 1);
  }

  bool stopped() const {
    return opts_->limit != 0 &&
           found_->load(std::memory_order_relaxed) >= opts_->limit;
  }

  /// Rewalks the candidates in `parent` plus all bases in the tetrahedra
  /// [fresh_from, touched_) against the current prefix.  Returns true when
  /// some candidate is strictly smaller (prune); otherwise stores the ones
  /// still tied with the prefix in `child`.
  bool refresh_alive(const std::vector<int>& parent, int fresh_from,
                     std::vector<int>& child) {
    child.clear();
    GluingRecord r;
    // -1: prune the branch, 0: candidate is dead, 1: still tied.
    const auto verdict = [&](int cand) {
      walk_.reset(cand / 24, Perm4::all()[static_cast<std::size_t>(cand % 24)]);
      std::size_t pos = 0;
      while (pos < prefix_.size() && walk_.next(r)) {
        if (r < prefix_[pos]) return -1;
        if (prefix_[pos] < r) return 0;
        ++pos;
      }
      return 1;
    };
    for (const int cand : parent) {
      const int v = verdict(cand);
      if (v < 0) return true;
      if (v > 0) child.push_back(cand);
    }
    for (int t0 = fresh_from; t0 < touched_; ++t0)
      for (int k = 0; k < 24; ++k) {
        const int v = verdict(t0 * 24 + k);
        if (v < 0) return true;
        if (v > 0) child.push_back(t0 * 24 + k);
      }
    return false;
  }

  void dfs() {
    if (stopped()) {
      // Work remained when the cap was hit, so the stream is marked short.
      truncated_->store(true, std::memory_order_relaxed);
      return;
    }
    if (frontier_ && static_cast<int>(prefix_.size()) == frontier_depth_) {
      frontier_->push_back(prefix_);
      return;
    }
    FaceEnd open{-1, 0};
    for (int t = 0; t < n_ && open.tet < 0; ++t)
      for (int f = 0; f < 4; ++f)
        if (!T_.is_glued(t, f)) {
          open = FaceEnd{t, f};
          break;
        }
    if (open.tet < 0) {
      emit();
      return;
    }
    const int t = open.tet;
    const int f = open.face;
    const int last_tet = std::min(touched_, n_ - 1);
    const std::vector<int> parent = alive_stack_.back();
    std::vector<int> child;
    for (int t2 = t; t2 <= last_tet; ++t2)
      for (int f2 = (t2 == t ? f + 1 : 0); f2 < 4; ++f2) {
        if (T_.is_glued(t2, f2)) continue;
        for (const Perm4& p : Perm4::all()) {
          if (p(f) != f2) continue;
          const int saved_touched = touched_;
          apply(make_record(FaceEnd{t, f}, FaceEnd{t2, f2}, p));
          if (!refresh_alive(parent, saved_touched, child)) {
            alive_stack_.push_back(std::move(child));
            dfs();
            child = std::move(alive_stack_.back());
            alive_stack_.pop_back();
          }
          touched_ = saved_touched;
          prefix_.pop_back();
          T_.unglue(FaceEnd{t, f});
        }
      }
  }

  void emit() {
    if (!T_.connected()) return;
    // At a complete connected gluing every surviving candidate has matched
    // the full record stream, so the identity labeling is least exactly when
    // a candidate survived; an empty set means the least stream belongs to
    // another labeling of the same class.
    if (alive_stack_.back().empty()) return;
    if (opts_->filter && !opts_->filter(T_)) return;
    if (opts_->limit != 0) {
      const std::size_t index = found_->fetch_add(1, std::memory_order_relaxed);
      if (index >= opts_->limit) {
        truncated_->store(true, std::memory_order_relaxed);
        return;
      }
    }
    out_->push_back(CanonicalForm{T_, T_.serialize(), identity_isomorphism(n_)});
  }

  int n_;
  const CensusOptions* opts_;
  std::atomic<std::size_t>* found_;
  std::atomic<bool>* truncated_;
  Triangulation T_;
  TransportWalk walk_;
  std::vector<GluingRecord> prefix_;
  int touched_ = 1;
  std::vector<std::vector<int>> alive_stack_;
  std::vector<CanonicalForm>* out_ = nullptr;
  std::vector<std::vector<GluingRecord>>* frontier_ = nullptr;
  int frontier_depth_ = 0;
};

}  // namespace detail

/// Enumerates every combinatorial equivalence class of complete connected
/// gluings on n tetrahedra, exactly once each, in ascending signature order.
/// The order and the set of classes do not depend on the worker count.
inline CensusResult enumerate_census(int n, const CensusOptions& opts = {}) {
  if (n < 1)
    throw Error(ErrorCategory::domain, "census needs at least one tetrahedron");
  std::atomic<std::size_t> found{0};
  std::atomic<bool> truncated{false};
  CensusResult result;
  const int jobs = std::max(1, opts.jobs);
  if (jobs == 1) {
    detail::CensusSearch search(n, opts, found, truncated);
    search.run(result.classes);
  } else {
    std::vector<std::vector<detail::GluingRecord>> frontier;
    {
      detail::CensusSearch splitter(n, opts, found, truncated);
      splitter.collect_frontier(std::min(2, 2 * n), frontier);
    }
    std::vector<std::vector<CanonicalForm>> buckets(frontier.size());
    std::atomic<std::size_t> cursor{0};
    auto work = [&]() {
      for (;;) {
        const std::size_t i = cursor.fetch_add(1);
        if (i >= frontier.size()) return;
        detail::CensusSearch search(n, opts, found, truncated);
        search.seed(frontier[i]);
        search.run(buckets[i]);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int j = 0; j < jobs; ++j) pool.emplace_back(work);
    for (std::thread& th : pool) th.join();
    for (std::vector<CanonicalForm>& bucket : buckets)
      for (CanonicalForm& form : bucket) result.classes.push_back(std::move(form));
  }
  std::sort(result.classes.begin(), result.classes.end(),
            [](const CanonicalForm& a, const CanonicalForm& b) {
              return a.signature < b.signature;
            });
  if (opts.limit != 0 && result.classes.size() > opts.limit)
    result.classes.erase(
        result.classes.begin() + static_cast<std::ptrdiff_t>(opts.limit),
        result.classes.end());
  result.truncated = truncated.load();
  return result;
}

}  // namespace tri3
