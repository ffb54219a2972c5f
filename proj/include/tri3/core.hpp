#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tri3 {

/// Category attached to every error raised by the library, so callers can
/// react to failure modes without parsing messages.
enum class ErrorCategory {
  syntax,            ///< malformed textual input
  incomplete_gluing, ///< some face-end is left unpaired
  non_involutive,    ///< the pairing system is not a fixed-point-free involution
  self_glued,        ///< a face-end is paired with itself
  disconnected,      ///< the gluing graph is not connected
  not_dualizable,    ///< a polyhedron is not the dual of any triangulation
  domain,            ///< other precondition violation
};

/// Library-wide exception type carrying an ErrorCategory.
class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

/// A permutation of the four vertex labels {0,1,2,3} of a tetrahedron.
///
/// Composition is in function order: (a * b)(x) == a(b(x)).
class Perm4 {
 public:
  constexpr Perm4() : images_{0, 1, 2, 3} {}

  /// Builds the permutation k -> i_k; the images must be a rearrangement
  /// of 0,1,2,3.
  static constexpr Perm4 from_images(int i0, int i1, int i2, int i3) {
    unsigned seen = 0;
    for (int v : {i0, i1, i2, i3}) {
      if (v < 0 || v > 3)
        throw std::invalid_argument("Perm4 image out of range");
      seen |= 1u << static_cast<unsigned>(v);
    }
    if (seen != 0xfu)
      throw std::invalid_argument("Perm4 images are not a permutation");
    Perm4 p;
    p.images_ = {static_cast<std::uint8_t>(i0), static_cast<std::uint8_t>(i1),
                 static_cast<std::uint8_t>(i2), static_cast<std::uint8_t>(i3)};
    return p;
  }

  static constexpr Perm4 identity() { return Perm4(); }

  /// The transposition exchanging labels a and b (a != b).
  static constexpr Perm4 transposition(int a, int b) {
    if (a == b) throw std::invalid_argument("transposition needs two distinct labels");
    std::array<int, 4> im{0, 1, 2, 3};
    std::swap(im[static_cast<std::size_t>(a)], im[static_cast<std::size_t>(b)]);
    return from_images(im[0], im[1], im[2], im[3]);
  }

  constexpr int operator()(int x) const {
    return images_[static_cast<std::size_t>(x)];
  }

  constexpr Perm4 inverse() const {
    std::array<int, 4> im{};
    for (int x = 0; x < 4; ++x) im[images_[static_cast<std::size_t>(x)]] = x;
    return from_images(im[0], im[1], im[2], im[3]);
  }

  friend constexpr Perm4 operator*(const Perm4& a, const Perm4& b) {
    return from_images(a(b(0)), a(b(1)), a(b(2)), a(b(3)));
  }

  constexpr bool is_identity() const { return *this == Perm4(); }

  auto operator<=>(const Perm4&) const = default;

  /// All 24 permutations, in lexicographic order of their image tuples.
  static const std::array<Perm4, 24>& all() {
    static const std::array<Perm4, 24> table = [] {
      std::array<Perm4, 24> out{};
      std::array<int, 4> im{0, 1, 2, 3};
      std::size_t k = 0;
      do {
        out[k++] = from_images(im[0], im[1], im[2], im[3]);
      } while (std::next_permutation(im.begin(), im.end()));
      return out;
    }();
    return table;
  }

 private:
  std::array<std::uint8_t, 4> images_;
};

/// One face of one tetrahedron.  Face f is the face opposite vertex f, so
/// it carries the three vertex labels other than f.
struct FaceEnd {
  int tet = 0;
  int face = 0;

  auto operator<=>(const FaceEnd&) const = default;
};

/// Where a face-end is glued: the partner face-end plus the vertex-label
/// permutation from the source tetrahedron to the target one.  The
/// permutation maps the source face index to the target face index.
struct Gluing {
  FaceEnd to;
  Perm4 perm;

  bool operator==(const Gluing&) const = default;
};

/// Vertex pairs of the six edges of a tetrahedron, in lexicographic order.
inline constexpr std::array<std::array<int, 2>, 6> tet_edges{
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

/// Index into tet_edges of the edge with vertex pair {a, b}.
constexpr int edge_index(int a, int b) {
  if (a > b) {
    int t = a;
    a = b;
    b = t;
  }
  return 3 * a - a * (a - 1) / 2 + (b - a - 1);
}

/// The two faces of a tetrahedron containing the edge {a, b}.  A face is
/// indexed by its opposite vertex, so these are the two labels other than
/// a and b, in increasing order.
constexpr std::array<int, 2> faces_containing_edge(int a, int b) {
  std::array<int, 2> out{};
  int k = 0;
  for (int f = 0; f < 4; ++f)
    if (f != a && f != b) out[static_cast<std::size_t>(k++)] = f;
  return out;
}

/// A gluing pattern on n tetrahedra: a complete, fixed-point-free,
/// involutive pairing of the 4n face-ends, each pairing decorated with a
/// vertex-label permutation, with connected gluing graph.
///
/// Partially glued patterns can be represented while building one (see
/// glue()/unglue()); validate() checks the full set of structural rules.
class Triangulation {
 public:
  explicit Triangulation(int n) {
    if (n <= 0)
      throw Error(ErrorCategory::domain, "tetrahedron count must be positive");
    glue_.resize(static_cast<std::size_t>(n));
    for (auto& faces : glue_) faces.fill(unglued_slot());
  }

  /// Number of tetrahedra.
  int size() const { return static_cast<int>(glue_.size()); }

  bool is_glued(FaceEnd fe) const { return at(fe).to.tet >= 0; }
  bool is_glued(int t, int f) const { return is_glued(FaceEnd{t, f}); }

  /// The pairing installed at fe; fe must be glued.
  const Gluing& gluing(FaceEnd fe) const {
    const Gluing& g = at(fe);
    if (g.to.tet < 0)
      throw Error(ErrorCategory::incomplete_gluing,
                  "face (" + std::to_string(fe.tet) + "," + std::to_string(fe.face) +
                      ") is not glued");
    return g;
  }
  const Gluing& gluing(int t, int f) const { return gluing(FaceEnd{t, f}); }

  /// Installs the pairing a <-> b with vertex permutation p; p must map
  /// a.face to b.face, the two ends must be distinct and both unglued.
  /// The reverse pairing (with the inverse permutation) is installed
  /// automatically, keeping the system involutive by construction.
  void glue(FaceEnd a, FaceEnd b, const Perm4& p) {
    check_range(a);
    check_range(b);
    if (a == b)
      throw Error(ErrorCategory::self_glued,
                  "face (" + std::to_string(a.tet) + "," + std::to_string(a.face) +
                      ") glued to itself");
    if (p(a.face) != b.face)
      throw Error(ErrorCategory::domain,
                  "gluing permutation does not carry the source face index to the "
                  "target face index");
    if (is_glued(a) || is_glued(b))
      throw Error(ErrorCategory::non_involutive, "face-end already paired");
    at(a) = Gluing{b, p};
    at(b) = Gluing{a, p.inverse()};
  }

  /// Removes the pairing at a and at its partner.
  void unglue(FaceEnd a) {
    const Gluing g = gluing(a);
    at(g.to) = unglued_slot();
    at(a) = unglued_slot();
  }

  /// True iff every face-end is paired.
  bool complete() const {
    for (int t = 0; t < size(); ++t)
      for (int f = 0; f < 4; ++f)
        if (!is_glued(t, f)) return false;
    return true;
  }

  /// True iff the gluing graph (tetrahedra as nodes, installed pairings as
  /// arcs) is connected.
  bool connected() const {
    std::vector<char> seen(glue_.size(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      const int t = stack.back();
      stack.pop_back();
      for (int f = 0; f < 4; ++f) {
        const Gluing& g = glue_[static_cast<std::size_t>(t)][static_cast<std::size_t>(f)];
        if (g.to.tet < 0) continue;
        if (!seen[static_cast<std::size_t>(g.to.tet)]) {
          seen[static_cast<std::size_t>(g.to.tet)] = 1;
          ++count;
          stack.push_back(g.to.tet);
        }
      }
    }
    return count == size();
  }

  /// Checks all structural rules: completeness, involutivity (partner
  /// points back with the inverse permutation), no self-gluing, face index
  /// carried to face index, connectedness.  Throws Error with the category
  /// of the first violated rule.
  void validate() const {
    for (int t = 0; t < size(); ++t)
      for (int f = 0; f < 4; ++f) {
        const FaceEnd fe{t, f};
        const Gluing& g = at(fe);
        const std::string where =
            "face (" + std::to_string(t) + "," + std::to_string(f) + ")";
        if (g.to.tet < 0)
          throw Error(ErrorCategory::incomplete_gluing, where + " is not glued");
        if (g.to.tet >= size() || g.to.face < 0 || g.to.face > 3)
          throw Error(ErrorCategory::domain, where + " glued out of range");
        if (g.to == fe)
          throw Error(ErrorCategory::self_glued, where + " glued to itself");
        if (g.perm(f) != g.to.face)
          throw Error(ErrorCategory::non_involutive,
                      where + ": permutation does not carry the face index to the "
                              "partner face index");
        const Gluing& back = at(g.to);
        if (back.to != fe || !(back.perm == g.perm.inverse()))
          throw Error(ErrorCategory::non_involutive,
                      where + ": partner does not point back with the inverse "
                              "permutation");
      }
    if (!connected())
      throw Error(ErrorCategory::disconnected, "gluing graph is not connected");
  }

  /// Parses the TRI text format and returns a fully validated object.
  ///
  /// Format (UTF-8, line based): first content line `tri <n>`, then exactly
  /// 2n pairing lines `<t> <f> : <t'> <f'> : <p0> <p1> <p2> <p3>` where p_k
  /// is the image of vertex label k.  Text from `%` to end of line is a
  /// comment.  Tokens are separated by blanks.
  static Triangulation parse(std::string_view text);

  /// Canonical text form: one line per pairing, keyed by the
  /// lexicographically smaller face-end, in ascending key order.
  /// parse(serialize()) reproduces the object exactly.
  std::string serialize() const;

  bool operator==(const Triangulation&) const = default;

 private:
  static Gluing unglued_slot() { return Gluing{FaceEnd{-1, 0}, Perm4()}; }

  void check_range(FaceEnd fe) const {
    if (fe.tet < 0 || fe.tet >= size() || fe.face < 0 || fe.face > 3)
      throw Error(ErrorCategory::domain,
                  "face (" + std::to_string(fe.tet) + "," + std::to_string(fe.face) +
                      ") out of range");
  }

  Gluing& at(FaceEnd fe) {
    return glue_[static_cast<std::size_t>(fe.tet)][static_cast<std::size_t>(fe.face)];
  }
  const Gluing& at(FaceEnd fe) const {
    return glue_[static_cast<std::size_t>(fe.tet)][static_cast<std::size_t>(fe.face)];
  }

  std::vector<std::array<Gluing, 4>> glue_;
};

namespace detail {

struct Token {
  std::string_view text;
  int column = 0;  // 1-based
};

/// Splits one line into blank-separated tokens; ':' is always its own token.
inline std::vector<Token> tokenize_line(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    if (c == ':') {
      out.push_back(Token{line.substr(i, 1), static_cast<int>(i) + 1});
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r' &&
           line[j] != ':')
      ++j;
    out.push_back(Token{line.substr(i, j - i), static_cast<int>(i) + 1});
    i = j;
  }
  return out;
}

}  // namespace detail

inline Triangulation Triangulation::parse(std::string_view text) {
  using detail::Token;

  int line_no = 0;
  auto syntax_error = [&line_no](int column, const std::string& msg) -> Error {
    return Error(ErrorCategory::syntax, "line " + std::to_string(line_no) +
                                            ", column " + std::to_string(column) +
                                            ": " + msg);
  };
  auto parse_int = [&](const Token& tok, long min_value, long max_value,
                       const char* what) -> long {
    long value = 0;
    const char* begin = tok.text.data();
    const char* end = begin + tok.text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
      throw syntax_error(tok.column, std::string("expected ") + what +
                                         " (a decimal integer), got '" +
                                         std::string(tok.text) + "'");
    if (value < min_value || value > max_value)
      throw syntax_error(tok.column, std::string(what) + " out of range: " +
                                         std::string(tok.text));
    return value;
  };

  long n = -1;
  std::vector<Triangulation> holder;  // delayed construction
  long pairs_seen = 0;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
    ++line_no;

    const std::size_t comment = line.find('%');
    if (comment != std::string_view::npos) line = line.substr(0, comment);
    const std::vector<Token> toks = detail::tokenize_line(line);
    if (toks.empty()) continue;

    if (n < 0) {
      if (toks[0].text != "tri")
        throw syntax_error(toks[0].column, "expected header 'tri <n>'");
      if (toks.size() != 2)
        throw syntax_error(toks[0].column, "header must be exactly 'tri <n>'");
      n = parse_int(toks[1], 1, 50'000'000, "tetrahedron count");
      holder.emplace_back(static_cast<int>(n));
      continue;
    }

    if (pairs_seen == 2 * n)
      throw syntax_error(toks[0].column,
                         "more than " + std::to_string(2 * n) + " pairing lines");
    if (toks.size() != 10 || toks[2].text != ":" || toks[5].text != ":")
      throw syntax_error(toks[0].column,
                         "expected '<t> <f> : <t'> <f'> : <p0> <p1> <p2> <p3>'");

    const int t = static_cast<int>(parse_int(toks[0], 0, n - 1, "tetrahedron index"));
    const int f = static_cast<int>(parse_int(toks[1], 0, 3, "face index"));
    const int t2 = static_cast<int>(parse_int(toks[3], 0, n - 1, "tetrahedron index"));
    const int f2 = static_cast<int>(parse_int(toks[4], 0, 3, "face index"));
    std::array<int, 4> im{};
    for (int k = 0; k < 4; ++k)
      im[static_cast<std::size_t>(k)] = static_cast<int>(
          parse_int(toks[static_cast<std::size_t>(6 + k)], 0, 3, "permutation image"));
    if ((1u << im[0] | 1u << im[1] | 1u << im[2] | 1u << im[3]) != 0xfu)
      throw syntax_error(toks[6].column, "permutation images must be 0,1,2,3 in some order");
    const Perm4 p = Perm4::from_images(im[0], im[1], im[2], im[3]);
    if (p(f) != f2)
      throw syntax_error(toks[6].column,
                         "permutation sends face " + std::to_string(f) + " to " +
                             std::to_string(p(f)) + ", but the target face is " +
                             std::to_string(f2));

    const FaceEnd a{t, f};
    const FaceEnd b{t2, f2};
    Triangulation& T = holder.front();
    if (a == b)
      throw Error(ErrorCategory::self_glued,
                  "line " + std::to_string(line_no) + ": face (" + std::to_string(t) +
                      "," + std::to_string(f) + ") glued to itself");
    if (T.is_glued(a) || T.is_glued(b)) {
      const FaceEnd dup = T.is_glued(a) ? a : b;
      throw Error(ErrorCategory::non_involutive,
                  "line " + std::to_string(line_no) + ": face (" +
                      std::to_string(dup.tet) + "," + std::to_string(dup.face) +
                      ") appears in more than one pairing");
    }
    T.glue(a, b, p);
    ++pairs_seen;
  }

  if (n < 0)
    throw Error(ErrorCategory::syntax,
                "line 1: empty input, expected header 'tri <n>'");
  if (pairs_seen != 2 * n)
    throw Error(ErrorCategory::incomplete_gluing,
                "expected " + std::to_string(2 * n) + " pairing lines, got " +
                    std::to_string(pairs_seen));
  holder.front().validate();
  return std::move(holder.front());
}

inline std::string Triangulation::serialize() const {
  std::string out = "tri " + std::to_string(size()) + "\n";
  for (int t = 0; t < size(); ++t)
    for (int f = 0; f < 4; ++f) {
      const FaceEnd fe{t, f};
      const Gluing& g = gluing(fe);  // throws if incomplete
      if (g.to < fe) continue;       // emitted at the smaller key
      out += std::to_string(t);
      out += ' ';
      out += std::to_string(f);
      out += " : ";
      out += std::to_string(g.to.tet);
      out += ' ';
      out += std::to_string(g.to.face);
      out += " :";
      for (int k = 0; k < 4; ++k) {
        out += ' ';
        out += std::to_string(g.perm(k));
      }
      out += '\n';
    }
  return out;
}

/// Applies a simultaneous relabeling: tetrahedron t is renamed tet_map[t]
/// and its vertex labels are renamed by vertex_maps[t]; gluing permutations
/// are conjugated accordingly.  tet_map must be a permutation of 0..n-1 and
/// vertex_maps must have length n.
inline Triangulation relabel(const Triangulation& T, const std::vector<int>& tet_map,
                             const std::vector<Perm4>& vertex_maps) {
  const int n = T.size();
  if (static_cast<int>(tet_map.size()) != n ||
      static_cast<int>(vertex_maps.size()) != n)
    throw Error(ErrorCategory::domain, "relabeling data has wrong length");
  std::vector<char> hit(static_cast<std::size_t>(n), 0);
  for (int v : tet_map) {
    if (v < 0 || v >= n || hit[static_cast<std::size_t>(v)])
      throw Error(ErrorCategory::domain, "tet_map is not a permutation");
    hit[static_cast<std::size_t>(v)] = 1;
  }

  Triangulation out(n);
  for (int t = 0; t < n; ++t)
    for (int f = 0; f < 4; ++f) {
      if (!T.is_glued(t, f)) continue;
      const Gluing& g = T.gluing(t, f);
      const FaceEnd a{tet_map[static_cast<std::size_t>(t)],
                      vertex_maps[static_cast<std::size_t>(t)](f)};
      if (out.is_glued(a)) continue;  // installed from the other end already
      const FaceEnd b{tet_map[static_cast<std::size_t>(g.to.tet)],
                      vertex_maps[static_cast<std::size_t>(g.to.tet)](g.to.face)};
      out.glue(a, b,
               vertex_maps[static_cast<std::size_t>(g.to.tet)] * g.perm *
                   vertex_maps[static_cast<std::size_t>(t)].inverse());
    }
  return out;
}

}  // namespace tri3
