#include "bsq/symbol.hpp"

#include <cmath>

#include "bsq/error.hpp"

namespace bsq {

std::string_view branch_name(Branch b) noexcept {
  return b == Branch::Plus ? "plus" : "minus";
}

Branch parse_branch(std::string_view text) {
  if (text == "plus" || text == "+") return Branch::Plus;
  if (text == "minus" || text == "-") return Branch::Minus;
  throw Error(ErrorKind::ConfigError,
              "branch must be 'plus' or 'minus', got '" + std::string(text) + "'");
}

void PauliSymbol::validate() const {
  if (domain.periodic_x() && !(domain.period_x > 0.0))
    throw Error(ErrorKind::ConfigError, "torus period_x must be positive");
  if (domain.periodic_xi() && !(domain.period_xi > 0.0))
    throw Error(ErrorKind::ConfigError, "torus period_xi must be positive");
  if (!domain.periodic_x()) return;

  constexpr double kGolden = 0.6180339887498949;
  constexpr double kSilver = 0.4142135623730950;
  const char* labels[8] = {"p0", "p1", "p2", "p3", "r0", "r1", "r2", "r3"};
  for (int j = 0; j < 16; ++j) {
    const double x = -1.0 + 2.0 * std::fmod(1.0 + j * kGolden, 1.0);
    const double xi = -1.0 + 2.0 * std::fmod(0.5 + j * kSilver, 1.0);
    for (int f = 0; f < 8; ++f) {
      const Expr& e = f < 4 ? p[static_cast<std::size_t>(f)] : r[static_cast<std::size_t>(f - 4)];
      const double v = e.eval(x, xi);
      double dx = std::abs(e.eval(x + domain.period_x, xi) - v);
      double dxi = domain.periodic_xi() ? std::abs(e.eval(x, xi + domain.period_xi) - v) : 0.0;
      if (dx >= 1e-10 || dxi >= 1e-10) {
        throw Error(ErrorKind::ConfigError, std::string(labels[f]) + " = " + e.str() +
                                                " is not periodic on the torus domain");
      }
    }
  }
}

PauliSymbol negated(const PauliSymbol& sym) {
  PauliSymbol out = sym;
  for (std::size_t i = 0; i < 4; ++i) {
    out.p[i] = Expr::parse("-(" + sym.p[i].str() + ")");
    out.r[i] = Expr::parse("-(" + sym.r[i].str() + ")");
  }
  out.name = "negated " + sym.name;
  return out;
}

double Jet::norm_P() const noexcept { return std::sqrt(p[1] * p[1] + p[2] * p[2] + p[3] * p[3]); }

Jet jet(const PauliSymbol& sym, double x, double xi) {
  Jet j;
  for (std::size_t i = 0; i < 4; ++i) {
    j.p[i] = sym.p[i].eval(x, xi);
    const auto [gx, gxi] = sym.p[i].grad(x, xi);
    j.px[i] = gx;
    j.pxi[i] = gxi;
  }
  return j;
}

double norm_P(const PauliSymbol& sym, double x, double xi) {
  const double p1 = sym.p[1].eval(x, xi);
  const double p2 = sym.p[2].eval(x, xi);
  const double p3 = sym.p[3].eval(x, xi);
  return std::sqrt(p1 * p1 + p2 * p2 + p3 * p3);
}

double eigenvalue(const PauliSymbol& sym, Branch b, double x, double xi) {
  return sym.p[0].eval(x, xi) + branch_sign(b) * norm_P(sym, x, xi);
}

std::pair<double, double> eigenvalue_grad(const PauliSymbol& sym, Branch b, double x,
                                          double xi) {
  const Jet j = jet(sym, x, xi);
  const double n = j.norm_P();
  const double s = branch_sign(b);
  double mx = j.px[0];
  double mxi = j.pxi[0];
  if (n > 0.0) {
    for (std::size_t i = 1; i < 4; ++i) {
      mx += s * j.p[i] * j.px[i] / n;
      mxi += s * j.p[i] * j.pxi[i] / n;
    }
  }
  return {mx, mxi};
}

double polar_angle(double p1, double p2, double p3) {
  const double rho = std::hypot(p1, p2);
  if (rho == 0.0 && p3 == 0.0) throw Error(ErrorKind::CrossingError, "P = 0: eigenvalue crossing");
  return std::atan2(rho, p3);
}

Spherical spherical_from_P(double p1, double p2, double p3) {
  const double rho2 = p1 * p1 + p2 * p2;
  const double n2 = rho2 + p3 * p3;
  if (n2 == 0.0) throw Error(ErrorKind::CrossingError, "P = 0: eigenvalue crossing");
  if (rho2 < 1e-12 * n2)
    throw Error(ErrorKind::PoleError, "p1^2 + p2^2 vanishes: azimuth undefined");
  Spherical s;
  s.theta = std::atan2(std::sqrt(rho2), p3);
  s.phi = std::atan2(p2, p1);
  if (s.phi <= -M_PI) s.phi = M_PI;
  return s;
}

Spherical spherical(const PauliSymbol& sym, double x, double xi) {
  return spherical_from_P(sym.p[1].eval(x, xi), sym.p[2].eval(x, xi), sym.p[3].eval(x, xi));
}

Vec2c eigenvector_from_angles(Branch b, double theta, double phi) {
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  Vec2c u;
  if (b == Branch::Plus) {
    u << c, std::polar(s, phi);
  } else {
    u << -std::polar(s, -phi), c;
  }
  return u;
}

Vec2c eigenvector(const PauliSymbol& sym, Branch b, double x, double xi) {
  const Spherical s = spherical(sym, x, xi);
  return eigenvector_from_angles(b, s.theta, s.phi);
}

Eigen::Matrix2cd pauli_matrix(double q0, double q1, double q2, double q3) {
  using C = std::complex<double>;
  Eigen::Matrix2cd m;
  m << C(q0 + q3, 0.0), C(q1, -q2), C(q1, q2), C(q0 - q3, 0.0);
  return m;
}

LocalFrame local_frame(const PauliSymbol& sym, Branch b, double x, double xi) {
  LocalFrame f;
  f.jet = jet(sym, x, xi);
  const auto& p = f.jet.p;
  const auto& px = f.jet.px;
  const auto& pxi = f.jet.pxi;
  const Spherical sp = spherical_from_P(p[1], p[2], p[3]);
  f.theta = sp.theta;
  f.phi = sp.phi;
  const double s = branch_sign(b);
  const double rho2 = p[1] * p[1] + p[2] * p[2];
  const double rho = std::sqrt(rho2);
  const double n2 = rho2 + p[3] * p[3];
  f.norm_P = std::sqrt(n2);
  f.mu = p[0] + s * f.norm_P;

  auto partials = [&](const std::array<double, 4>& d, double& mu_d, double& theta_d,
                      double& phi_d) {
    const double norm_d = (p[1] * d[1] + p[2] * d[2] + p[3] * d[3]) / f.norm_P;
    const double rho_d = (p[1] * d[1] + p[2] * d[2]) / rho;
    mu_d = d[0] + s * norm_d;
    theta_d = (p[3] * rho_d - rho * d[3]) / n2;
    phi_d = (p[1] * d[2] - p[2] * d[1]) / rho2;
  };
  partials(px, f.mu_x, f.theta_x, f.phi_x);
  partials(pxi, f.mu_xi, f.theta_xi, f.phi_xi);
  return f;
}

double h1_density(const PauliSymbol& sym, Branch b, double x, double xi) {
  const double p1 = sym.p[1].eval(x, xi);
  const double p2 = sym.p[2].eval(x, xi);
  const double p3 = sym.p[3].eval(x, xi);
  const double n = std::sqrt(p1 * p1 + p2 * p2 + p3 * p3);
  if (n == 0.0) throw Error(ErrorKind::CrossingError, "P = 0: eigenvalue crossing");
  const double dot = sym.r[1].eval(x, xi) * p1 + sym.r[2].eval(x, xi) * p2 +
                     sym.r[3].eval(x, xi) * p3;
  return sym.r[0].eval(x, xi) + branch_sign(b) * dot / n;
}

F1Terms f1_terms(const PauliSymbol& sym, Branch b, double x, double xi) {
  const LocalFrame f = local_frame(sym, b, x, xi);
  const double s = branch_sign(b);
  const double tp = f.bracket_theta_phi();
  const double sin_t = std::sin(f.theta);
  F1Terms t;
  t.h1 = h1_density(sym, b, x, xi);
  t.mu1_prime = f.norm_P * 0.5 * sin_t * tp;
  t.mu1_dprime = s * 0.5 * (1.0 - std::cos(f.theta)) * f.bracket_mu_phi();
  t.mu1_tprime = (s * f.jet.p[0] + f.norm_P) * 0.25 * sin_t * tp;
  return t;
}

double f1_integrand(const PauliSymbol& sym, Branch b, double x, double xi) {
  return f1_terms(sym, b, x, xi).total();
}

}  // namespace bsq
