#pragma once

// Independent reference computations used only by the tests.

#include <chrono>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

#include "bsq/curve.hpp"
#include "bsq/symbol.hpp"

namespace oracle {

inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
  if (n % 2) ++n;
  const double step = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * step) * (i % 2 ? 4.0 : 2.0);
  return s * step / 3.0;
}

// Level curve x^2 + xi^2 + x^4 = E^2 of the non-planar example: turning
// point x0 with x0^2 = (sqrt(1 + 4E^2) - 1) / 2, and
// E^2 - x^2 - x^4 = (x0^2 - x^2)(x^2 + x0^2 + 1).
inline double rw_turning_point(double E) {
  return std::sqrt((std::sqrt(1.0 + 4.0 * E * E) - 1.0) / 2.0);
}

// (3/E) int_0^x0 x^2 / sqrt(E^2 - x^2 - x^4) dx with x = x0 sin u.
inline double rw_example_theta_rw(double E) {
  const double x0 = rw_turning_point(E);
  return simpson(
      [&](double u) {
        const double x = x0 * std::sin(u);
        return 3.0 / E * x * x / std::sqrt(x * x + x0 * x0 + 1.0);
      },
      0.0, std::numbers::pi / 2);
}

// -2 int_0^x0 (E^2 + x^4) / (E (E + x^2) sqrt(E^2 - x^2 - x^4)) dx.
inline double rw_example_theta_b(double E) {
  const double x0 = rw_turning_point(E);
  return simpson(
      [&](double u) {
        const double x = x0 * std::sin(u);
        return -2.0 * (E * E + x * x * x * x) / (E * (E + x * x) * std::sqrt(x * x + x0 * x0 + 1.0));
      },
      0.0, std::numbers::pi / 2);
}

// Area of {mu < E} or {mu > E} around `c`, assuming it is star-shaped with
// respect to c: (1/2) int r(phi)^2 dphi with the boundary radius found by
// marching out from c and bisecting. Periodic trapezoid rule in phi.
inline double polar_area(const bsq::PauliSymbol& sym, bsq::Branch b, double E, bsq::Point c,
                         int n_angles = 1024, double dr = 1e-3) {
  auto g = [&](double phi, double r) {
    return bsq::eigenvalue(sym, b, c.x + r * std::cos(phi), c.xi + r * std::sin(phi)) - E;
  };
  double sum = 0.0;
  for (int k = 0; k < n_angles; ++k) {
    const double phi = 2.0 * std::numbers::pi * k / n_angles;
    const double s0 = g(phi, 0.0);
    double lo = 0.0;
    double hi = dr;
    while (std::signbit(g(phi, hi)) == std::signbit(s0)) {
      lo = hi;
      hi += dr;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      (std::signbit(g(phi, mid)) == std::signbit(s0) ? lo : hi) = mid;
    }
    const double r = 0.5 * (lo + hi);
    sum += 0.5 * r * r;
  }
  return sum * 2.0 * std::numbers::pi / n_angles;
}

// Phase densities straight from the inner-product definitions, for the
// eigenvector multiplied by exp(i eta):
//   mu1'   = (1/2i) <{H0 - mu, e}, e>
//   mu1''  = (1/i)  <{mu, e}, e>
//   mu1''' = mu Im <e_x, e_xi>
// with {a, b} = a_xi b_x - a_x b_xi and <v, w> = sum v_k conj(w_k).
struct RawDensities {
  double mu1_prime = 0.0;
  double mu1_dprime = 0.0;
  double mu1_tprime = 0.0;
};

using Gauge = std::function<double(double x, double xi)>;

inline RawDensities raw_densities(const bsq::PauliSymbol& sym, bsq::Branch b, double x, double xi,
                                  const Gauge& eta, double d = 1e-5) {
  using cd = std::complex<double>;
  auto e = [&](double X, double XI) -> bsq::Vec2c {
    return std::exp(cd(0.0, eta(X, XI))) * bsq::eigenvector(sym, b, X, XI);
  };
  auto H = [&](double X, double XI) {
    const auto j = bsq::jet(sym, X, XI);
    return bsq::pauli_matrix(j.p[0], j.p[1], j.p[2], j.p[3]);
  };
  auto mu = [&](double X, double XI) { return bsq::eigenvalue(sym, b, X, XI); };
  auto ip = [](const bsq::Vec2c& v, const bsq::Vec2c& w) { return w.dot(v); };

  const bsq::Vec2c u = e(x, xi);
  const bsq::Vec2c ux = (e(x + d, xi) - e(x - d, xi)) / (2 * d);
  const bsq::Vec2c uxi = (e(x, xi + d) - e(x, xi - d)) / (2 * d);
  const Eigen::Matrix2cd Hx = (H(x + d, xi) - H(x - d, xi)) / (2 * d);
  const Eigen::Matrix2cd Hxi = (H(x, xi + d) - H(x, xi - d)) / (2 * d);
  const double m = mu(x, xi);
  const double mx = (mu(x + d, xi) - mu(x - d, xi)) / (2 * d);
  const double mxi = (mu(x, xi + d) - mu(x, xi - d)) / (2 * d);
  const Eigen::Matrix2cd I = Eigen::Matrix2cd::Identity();

  RawDensities r;
  r.mu1_prime = (ip((Hxi - mxi * I) * ux - (Hx - mx * I) * uxi, u) / cd(0.0, 2.0)).real();
  r.mu1_dprime = (ip(mxi * ux - mx * uxi, u) / cd(0.0, 1.0)).real();
  r.mu1_tprime = m * std::imag(ip(ux, uxi));
  return r;
}

struct RawPhases {
  double theta_B = 0.0;
  double theta_RW = 0.0;
};

inline RawPhases raw_phases(const bsq::PauliSymbol& sym, bsq::Branch b,
                            const bsq::LevelCurve& curve, const Gauge& eta) {
  RawPhases out;
  out.theta_B = bsq::integrate_dt(curve, [&](double x, double xi) {
                  return raw_densities(sym, b, x, xi, eta).mu1_dprime;
                }).value;
  out.theta_RW = bsq::integrate_dt(curve, [&](double x, double xi) {
                   const auto r = raw_densities(sym, b, x, xi, eta);
                   return r.mu1_prime + r.mu1_tprime;
                 }).value;
  return out;
}

// Distance of v from the nearest multiple of 2 pi.
inline double dist_2pi(double v) {
  const double t = 2.0 * std::numbers::pi;
  return std::abs(v - t * std::round(v / t));
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace oracle
