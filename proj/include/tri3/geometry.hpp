#pragma once

/// Geometric invariants of the octahedral hyperbolic structure carried by a
/// loose gluing: volumes, cusp cross-sections, and the valence-based
/// certificates.  Everything is derived from the edge classification; no
/// numerical geometry is solved for.

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <tri3/orbits.hpp>

namespace tri3 {

namespace detail {

inline constexpr double pi = 3.141592653589793238462643383279502884;

/// Riemann zeta at even integers s >= 2, via a direct sum plus an
/// Euler-Maclaurin tail; absolute error far below 1e-15 for every s used.
inline double zeta_even(int s) {
  constexpr int cutoff = 1000;
  double sum = 0.0;
  for (int k = cutoff - 1; k >= 1; --k) sum += std::pow(k, -s);
  const double K = cutoff;
  sum += std::pow(K, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(K, -s) +
         s * std::pow(K, -s - 1.0) / 12.0 -
         s * (s + 1.0) * (s + 2.0) * std::pow(K, -s - 3.0) / 720.0;
  return sum;
}

}  // namespace detail

/// The Lobachevsky function: the volume integrand of ideal hyperbolic
/// polyhedra, defined by the Fourier series (1/2) sum sin(2 k theta) / k^2.
/// Evaluated to absolute error below 1e-12 by range reduction (odd,
/// pi-periodic) followed by the zeta-accelerated power series, whose terms
/// shrink geometrically with ratio at most 1/4.
inline double lobachevsky(double theta) {
  const double x = std::remainder(theta, detail::pi);  // x in [-pi/2, pi/2]
  if (x == 0.0) return 0.0;

  static const std::array<double, 48> coeff = [] {
    std::array<double, 48> c{};
    double inv_pi2 = 1.0 / (detail::pi * detail::pi);
    double scale = inv_pi2;
    for (std::size_t m = 1; m < c.size(); ++m) {
      c[m] = detail::zeta_even(static_cast<int>(2 * m)) * scale /
             (static_cast<double>(m) * (2.0 * m + 1.0));
      scale *= inv_pi2;
    }
    return c;
  }();

  const double x2 = x * x;
  double power = x * x2;  // x^{2m+1}
  double series = 0.0;
  for (std::size_t m = 1; m < coeff.size(); ++m) {
    const double term = coeff[m] * power;
    series += term;
    if (std::abs(term) < 1e-18) break;
    power *= x2;
  }
  return x - x * std::log(std::abs(2.0 * x)) + series;
}

/// Volume of the regular ideal hyperbolic octahedron.
inline double octahedron_volume() {
  static const double v = 8.0 * lobachevsky(detail::pi / 4.0);
  return v;
}

struct VolumeReport {
  int n = 0;
  double v_O = 0.0;    ///< regular ideal octahedron volume
  double vol_N = 0.0;  ///< n * v_O
  double vol_D = 0.0;  ///< 2 * vol_N
  int genus = 0;       ///< n + 1
  int boundary_euler = 0;  ///< -2n
  int pm_complexity = 0;   ///< 10n
  /// Per cusp of the double (one per edge class): horoball volume = valence.
  std::vector<double> cusp_horoball_volumes;
  double total_horoball_volume = 0.0;  ///< 6n
};

inline VolumeReport volume_report(const Triangulation& t,
                                  const EdgeClassification& ec) {
  VolumeReport r;
  r.n = t.size();
  r.v_O = octahedron_volume();
  r.vol_N = static_cast<double>(r.n) * r.v_O;
  r.vol_D = 2.0 * r.vol_N;
  r.genus = r.n + 1;
  r.boundary_euler = -2 * r.n;
  r.pm_complexity = 10 * r.n;
  double total = 0.0;
  for (const EdgeClass& c : ec.classes) {
    r.cusp_horoball_volumes.push_back(static_cast<double>(c.valence));
    total += static_cast<double>(c.valence);
  }
  r.total_horoball_volume = total;
  return r;
}

inline VolumeReport volume_report(const Triangulation& t) {
  return volume_report(t, edge_classes(t));
}

enum class CuspShapeKind { rectangle, rhombus };

inline const char* to_string(CuspShapeKind k) {
  return k == CuspShapeKind::rectangle ? "rectangle" : "rhombus";
}

/// Euclidean cross-section of the cusp of the double sitting at one edge
/// class: a torus of area 2q with a length-2 meridian; orientable classes
/// give a rectangle with a length-q longitude, non-orientable ones a rhombus.
struct CuspShape {
  int edge_class = 0;
  int valence = 0;
  bool orientable = false;
  double area = 0.0;             ///< 2 * valence
  double meridian_length = 2.0;  ///< always 2
  std::optional<double> longitude_length;  ///< valence; orientable only
  CuspShapeKind shape_kind = CuspShapeKind::rectangle;
  double nonmeridinal_min_length = 0.0;  ///< valence
};

inline std::vector<CuspShape> cusp_shapes(const Triangulation& t,
                                          const EdgeClassification& ec) {
  (void)t;
  std::vector<CuspShape> out;
  for (const EdgeClass& c : ec.classes) {
    CuspShape s;
    s.edge_class = c.id;
    s.valence = c.valence;
    s.orientable = c.orientable;
    s.area = 2.0 * c.valence;
    s.meridian_length = 2.0;
    if (c.orientable) s.longitude_length = static_cast<double>(c.valence);
    s.shape_kind = c.orientable ? CuspShapeKind::rectangle : CuspShapeKind::rhombus;
    s.nonmeridinal_min_length = static_cast<double>(c.valence);
    out.push_back(s);
  }
  return out;
}

inline std::vector<CuspShape> cusp_shapes(const Triangulation& t) {
  return cusp_shapes(t, edge_classes(t));
}

enum class CertificateKind { none_below_6, valence_6, valence_7 };

inline const char* to_string(CertificateKind k) {
  switch (k) {
    case CertificateKind::valence_6: return "VALENCE_6";
    case CertificateKind::valence_7: return "VALENCE_7";
    default: return "NONE_BELOW_6";
  }
}

struct CertificateClaim {
  std::string id;
  std::string statement;
};

struct CertificateCusp {
  int edge_class = 0;
  int valence = 0;
  double nonmeridinal_bound = 0.0;
};

/// The valence-based certificate.  Angle data is always filled in; claims
/// are emitted only at the thresholds that justify them.  NONE_BELOW_6
/// certifies nothing and in particular never disproves hyperbolicity.
struct Certificate {
  CertificateKind kind = CertificateKind::none_below_6;
  int min_valence = 0;
  std::vector<CertificateCusp> cusps;
  std::vector<CertificateClaim> claims;
  /// Per edge class: the dihedral angle 2*pi / valence.
  std::vector<double> angle_assignment;
  /// Per (tet, vertex): the sum of the three incident edge angles.
  std::vector<std::array<double, 4>> vertex_sums;
};

inline Certificate certify(const Triangulation& t, const EdgeClassification& ec) {
  Certificate cert;
  cert.min_valence = ec.min_valence();

  for (const EdgeClass& c : ec.classes) {
    cert.angle_assignment.push_back(2.0 * detail::pi / c.valence);
    cert.cusps.push_back(
        CertificateCusp{c.id, c.valence, static_cast<double>(c.valence)});
  }
  cert.vertex_sums.assign(static_cast<std::size_t>(t.size()), {0.0, 0.0, 0.0, 0.0});
  for (int tet = 0; tet < t.size(); ++tet)
    for (int v = 0; v < 4; ++v) {
      double sum = 0.0;
      for (int w = 0; w < 4; ++w) {
        if (w == v) continue;
        const int cls = ec.edge_class_of[static_cast<std::size_t>(tet)]
                                        [static_cast<std::size_t>(edge_index(
                                            std::min(v, w), std::max(v, w)))];
        sum += cert.angle_assignment[static_cast<std::size_t>(cls)];
      }
      cert.vertex_sums[static_cast<std::size_t>(tet)][static_cast<std::size_t>(v)] = sum;
    }

  if (cert.min_valence >= 6) {
    cert.kind = CertificateKind::valence_6;
    cert.claims.push_back(CertificateClaim{
        "angle-taut",
        "assigning angle 2*pi/valence to each edge class gives every "
        "tetrahedron vertex an angle sum of at most pi"});
    cert.claims.push_back(CertificateClaim{
        "hyperbolic-interior",
        "if the gluing triangulates a manifold, that manifold admits a "
        "finite-volume hyperbolic metric in which every edge is essential"});
    cert.claims.push_back(CertificateClaim{
        "nonmeridinal-haken",
        "filling the double along any slope other than a meridian yields a "
        "Haken manifold whose core curves are essential"});
  }
  if (cert.min_valence >= 7) {
    cert.kind = CertificateKind::valence_7;
    cert.claims.push_back(CertificateClaim{
        "nonmeridinal-hyperbolic",
        "filling the double along any slope other than a meridian yields a "
        "hyperbolic manifold"});
    cert.claims.push_back(CertificateClaim{
        "exceptional-slope-unique",
        "each cusp of the double carries at most one exceptional slope, and "
        "every non-meridinal slope on a cusp of valence q has length at "
        "least q"});
  }
  return cert;
}

inline Certificate certify(const Triangulation& t) {
  return certify(t, edge_classes(t));
}

/// Conservative detector for the short list of fillings with extra
/// isometries: true means "possibly on the list", false is a proof of
/// absence.  A single-tetrahedron gluing is always a candidate; otherwise
/// every edge class must match one of the four allowed (valence,
/// orientability) profiles: (1, orientable), (2, orientable),
/// (4, orientable), (1, non-orientable).
inline bool exceptional_candidate(const Triangulation& t,
                                  const EdgeClassification& ec) {
  if (t.size() == 1) return true;
  for (const EdgeClass& c : ec.classes) {
    const bool allowed = (c.orientable && (c.valence == 1 || c.valence == 2 ||
                                           c.valence == 4)) ||
                         (!c.orientable && c.valence == 1);
    if (!allowed) return false;
  }
  return true;
}

inline bool exceptional_candidate(const Triangulation& t) {
  return exceptional_candidate(t, edge_classes(t));
}

}  // namespace tri3
