#pragma once

#include <array>
#include <optional>
#include <string>

#include "bsq/curve.hpp"

namespace bsq {

using Vec3 = std::array<double, 3>;

/// Which plane the vector P is assumed to lie in for the winding number.
struct PlaneSpec {
  enum class Kind { Auto, VanishingIndex, Normal };
  Kind kind = Kind::Auto;
  int index = 3;  ///< 1, 2 or 3: p_index vanishes along the curve
  Vec3 normal{0.0, 0.0, 1.0};

  static PlaneSpec automatic() { return {}; }
  static PlaneSpec vanishing(int i) { return {Kind::VanishingIndex, i, {}}; }
  static PlaneSpec with_normal(const Vec3& c) { return {Kind::Normal, 3, c}; }
};

/// Snaps components below 1e-12 to zero, normalizes, and makes the first
/// nonzero of (c3, c1, c2) positive.
Vec3 canonical_normal(Vec3 c);

/// Linear maps q1 = a.P, q2 = b.P taking the plane C.P = 0 onto the complex
/// plane by the rotation sending C to e3. For C = e1, e2, e3 these reduce to
/// -p3 + i p2, p1 - i p3 and p1 + i p2.
struct PlaneMap {
  Vec3 a;
  Vec3 b;
  Vec3 c;
};
PlaneMap plane_map(const Vec3& normal);

/// Least-squares normal of the sample P directions (smallest eigenvector of
/// sum P^ P^T), canonicalized, with the planarity residual max|C.P| / max|P|.
struct PlaneFit {
  Vec3 normal;
  double residual = 0.0;
};
PlaneFit fit_plane_normal(const PauliSymbol& sym, const LevelCurve& curve);

struct Winding {
  int value = 0;
  double raw = 0.0;       ///< (1/2pi) of the integrated d arg q
  double residual = 0.0;  ///< |raw - value|
  Vec3 normal{};
};

/// Throws NotPlanar, OriginOnCurve or RoundingAmbiguous.
Winding winding(const PauliSymbol& sym, const LevelCurve& curve,
                const PlaneSpec& plane = PlaneSpec::automatic());

/// +-integral of (1 - cos theta)/2 d phi. Throws PoleOnCurve, UnwrapFailure.
Quadrature berry_phase(const PauliSymbol& sym, Branch b, const LevelCurve& curve);
/// Integral of (+-p0 + w|P|) sin(theta)/4 {theta, phi} dt with w = norm_weight.
Quadrature rw_phase(const PauliSymbol& sym, Branch b, const LevelCurve& curve,
                    double norm_weight = 3.0);
/// Integral of (r0 +- sum r_i p_i / |P|) dt.
Quadrature h1_phase(const PauliSymbol& sym, Branch b, const LevelCurve& curve);

struct PhaseErrors {
  double S0 = 0.0;
  double theta_B = 0.0;
  double theta_RW = 0.0;
  double I_H1 = 0.0;
  double S1 = 0.0;
};

struct PhaseReport {
  double E = 0.0;
  Branch branch = Branch::Plus;
  Region region = Region::Well;
  double period_T = 0.0;
  double S0 = 0.0;
  double theta_B = 0.0;
  double theta_RW = 0.0;
  double I_H1 = 0.0;
  double S1_raw = 0.0;  ///< pi - I_H1 - theta_B - theta_RW
  double S1 = 0.0;      ///< S1_raw reduced to (-pi, pi]
  std::optional<int> winding;
  double winding_residual = 0.0;
  std::optional<Vec3> plane_normal;
  bool quantized_branch_used = false;
  PhaseErrors errors;
};

struct PhaseOptions {
  PlaneSpec plane = PlaneSpec::automatic();
  /// Skip the planarity test and always use the curve integrals.
  bool force_generic = false;
  /// Weight of |P| in the Rammal-Wilkinson density. The default 3 sums the
  /// two curvature terms of the subprincipal symbol; 2 keeps only the first.
  double rw_norm_weight = 3.0;
};

PhaseReport assemble(const PauliSymbol& sym, Branch b, const LevelCurve& curve,
                     const PhaseOptions& opts = {});

/// Representative of v modulo 2 pi in (-pi, pi].
double reduce_angle(double v);

std::string phase_csv_header();
std::string phase_csv_row(const PhaseReport& r);

}  // namespace bsq
