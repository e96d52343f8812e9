#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "bsq/expr.hpp"

namespace bsq {

enum class Branch { Plus, Minus };

/// +1 for Plus, -1 for Minus.
inline double branch_sign(Branch b) noexcept { return b == Branch::Plus ? 1.0 : -1.0; }
std::string_view branch_name(Branch b) noexcept;
Branch parse_branch(std::string_view text);

struct Domain {
  enum class Kind { Line, TorusX, TorusXXi };
  Kind kind = Kind::Line;
  double period_x = 0.0;
  double period_xi = 0.0;

  static Domain line() { return {}; }
  static Domain torus_x(double px) { return {Kind::TorusX, px, 0.0}; }
  static Domain torus_x_xi(double px, double pxi) { return {Kind::TorusXXi, px, pxi}; }

  bool periodic_x() const noexcept { return kind != Kind::Line; }
  bool periodic_xi() const noexcept { return kind == Kind::TorusXXi; }
};

struct Point {
  double x = 0.0;
  double xi = 0.0;
};

/// H0 = p0 + p1 s1 + p2 s2 + p3 s3 and H1 = r0 + r1 s1 + r2 s2 + r3 s3.
struct PauliSymbol {
  std::array<Expr, 4> p;
  std::array<Expr, 4> r;
  Domain domain;
  std::string name;
  /// A point inside the curves of interest; used to seed the tracer.
  std::optional<Point> hint;

  /// Throws ConfigError if a torus field is not periodic to 1e-10.
  void validate() const;
};

/// The symbol of -H: every field negated.
PauliSymbol negated(const PauliSymbol& sym);

/// Values and first derivatives of the principal fields at one point.
struct Jet {
  std::array<double, 4> p{};
  std::array<double, 4> px{};
  std::array<double, 4> pxi{};

  double norm_P() const noexcept;
};

Jet jet(const PauliSymbol& sym, double x, double xi);

double norm_P(const PauliSymbol& sym, double x, double xi);
double eigenvalue(const PauliSymbol& sym, Branch b, double x, double xi);

/// (d mu/dx, d mu/dxi) of the selected branch.
std::pair<double, double> eigenvalue_grad(const PauliSymbol& sym, Branch b, double x,
                                          double xi);

struct Spherical {
  double theta = 0.0;
  double phi = 0.0;
};

/// Throws CrossingError if |P| = 0, PoleError if p1^2 + p2^2 < 1e-12 |P|^2.
Spherical spherical(const PauliSymbol& sym, double x, double xi);
Spherical spherical_from_P(double p1, double p2, double p3);
/// theta only; needs |P| > 0.
double polar_angle(double p1, double p2, double p3);

using Vec2c = Eigen::Vector2cd;

Vec2c eigenvector_from_angles(Branch b, double theta, double phi);
Vec2c eigenvector(const PauliSymbol& sym, Branch b, double x, double xi);

/// 2x2 Hermitian matrix q0 + q1 s1 + q2 s2 + q3 s3.
Eigen::Matrix2cd pauli_matrix(double q0, double q1, double q2, double q3);

/// Pieces of the subprincipal integrand at one point. Brackets use
/// {a, b} = a_xi b_x - a_x b_xi.
struct F1Terms {
  double h1 = 0.0;          ///< r0 +- sum r_i p_i / |P|
  double mu1_prime = 0.0;   ///< |P| sin(theta)/2 {theta, phi}
  double mu1_dprime = 0.0;  ///< +-(1 - cos theta)/2 {mu, phi}
  double mu1_tprime = 0.0;  ///< (+-p0 + |P|) sin(theta)/4 {theta, phi}

  double mu1() const noexcept { return mu1_prime + mu1_dprime + mu1_tprime; }
  double total() const noexcept { return h1 + mu1(); }
};

/// Everything the phase integrals need at a point of a curve.
struct LocalFrame {
  Jet jet;
  double norm_P = 0.0;
  double mu = 0.0;
  double mu_x = 0.0;
  double mu_xi = 0.0;
  double theta = 0.0;
  double phi = 0.0;
  double theta_x = 0.0;
  double theta_xi = 0.0;
  double phi_x = 0.0;
  double phi_xi = 0.0;

  double bracket_theta_phi() const noexcept { return theta_xi * phi_x - theta_x * phi_xi; }
  double bracket_mu_phi() const noexcept { return mu_xi * phi_x - mu_x * phi_xi; }
};

LocalFrame local_frame(const PauliSymbol& sym, Branch b, double x, double xi);

double h1_density(const PauliSymbol& sym, Branch b, double x, double xi);
F1Terms f1_terms(const PauliSymbol& sym, Branch b, double x, double xi);
double f1_integrand(const PauliSymbol& sym, Branch b, double x, double xi);

}  // namespace bsq
