#include "bsq/curve.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include <unsupported/Eigen/FFT>

#include "bsq/csv.hpp"
#include "bsq/error.hpp"

namespace bsq {

std::string_view region_name(Region r) noexcept { return r == Region::Well ? "well" : "barrier"; }

namespace {

constexpr double kGradTol = 1e-8;
constexpr double kGapTol = 1e-8;
constexpr int kRaySamples = 4000;

struct FieldEval {
  double mu = 0.0;
  double gx = 0.0;
  double gxi = 0.0;
  double gnorm = 0.0;
  double normP = 0.0;
};

FieldEval field(const PauliSymbol& sym, Branch b, double x, double xi) {
  const Jet j = jet(sym, x, xi);
  FieldEval f;
  f.normP = j.norm_P();
  if (f.normP < kGapTol) {
    throw Error(ErrorKind::CrossingOnCurve, "|P| = " + format_number(f.normP) + " at x=" +
                                                format_number(x) + ", xi=" + format_number(xi));
  }
  const double s = branch_sign(b);
  f.mu = j.p[0] + s * f.normP;
  f.gx = j.px[0];
  f.gxi = j.pxi[0];
  for (std::size_t i = 1; i < 4; ++i) {
    f.gx += s * j.p[i] * j.px[i] / f.normP;
    f.gxi += s * j.p[i] * j.pxi[i] / f.normP;
  }
  f.gnorm = std::hypot(f.gx, f.gxi);
  if (f.gnorm < kGradTol) {
    throw Error(ErrorKind::DegenerateGradient, "|grad mu| = " + format_number(f.gnorm) +
                                                   " at x=" + format_number(x) +
                                                   ", xi=" + format_number(xi));
  }
  return f;
}

struct SeedInfo {
  Point seed;
  double scale = 0.0;
  double speed = 0.0;  ///< largest |grad mu| at the four ray crossings
};

Point resolve_hint(const PauliSymbol& sym, const TraceOptions& opts) {
  if (opts.hint) return *opts.hint;
  if (sym.hint) return *sym.hint;
  return {};
}

/// First sign change of mu - E along hint + s*dir, s in (0, R].
std::optional<double> ray_crossing(const PauliSymbol& sym, Branch b, double E, Point hint,
                                   double dx, double dxi, double R) {
  auto g = [&](double s) { return eigenvalue(sym, b, hint.x + s * dx, hint.xi + s * dxi) - E; };
  const double g0 = g(0.0);
  if (g0 == 0.0) return std::nullopt;
  double s_prev = 0.0;
  for (int k = 1; k <= kRaySamples; ++k) {
    const double u = static_cast<double>(k) / kRaySamples;
    const double s = R * u * u;
    double gs = 0.0;
    try {
      gs = g(s);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::DomainError) return std::nullopt;
      throw;
    }
    if ((gs > 0.0) != (g0 > 0.0) || gs == 0.0) {
      double lo = s_prev;
      double hi = s;
      for (int it = 0; it < 200 && hi - lo > 4e-16 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (gm == 0.0) return mid;
        if ((gm > 0.0) == (g0 > 0.0))
          lo = mid;
        else
          hi = mid;
      }
      return 0.5 * (lo + hi);
    }
    s_prev = s;
  }
  return std::nullopt;
}

struct Tracer {
  const PauliSymbol& sym;
  Branch b;
  double E;
  double tol_level;

  /// Newton back onto mu = E along the gradient: chord steps first, then
  /// fresh gradients if those stall.
  Point correct(Point p, double gx, double gxi) const {
    double r = 0.0;
    for (int it = 0; it < 26; ++it) {
      if (it >= 6) {
        const auto [fx, fxi] = eigenvalue_grad(sym, b, p.x, p.xi);
        gx = fx;
        gxi = fxi;
      }
      r = eigenvalue(sym, b, p.x, p.xi) - E;
      if (std::abs(r) <= 1e-3 * tol_level) return p;
      const double g2 = gx * gx + gxi * gxi;
      p.x -= r * gx / g2;
      p.xi -= r * gxi / g2;
    }
    r = eigenvalue(sym, b, p.x, p.xi) - E;
    if (std::abs(r) > tol_level) {
      throw Error(ErrorKind::NotClosed, "corrector failed to return to the level set at x=" +
                                            format_number(p.x) + ", xi=" + format_number(p.xi));
    }
    return p;
  }

  /// One RK4 step of length h in flow time along the Hamilton field.
  Point step(Point p, const FieldEval& f1, double h) const {
    auto dir = [](const FieldEval& f) { return std::pair{f.gxi, -f.gx}; };
    const auto [a1, b1] = dir(f1);
    const FieldEval f2 = field(sym, b, p.x + 0.5 * h * a1, p.xi + 0.5 * h * b1);
    const auto [a2, b2] = dir(f2);
    const FieldEval f3 = field(sym, b, p.x + 0.5 * h * a2, p.xi + 0.5 * h * b2);
    const auto [a3, b3] = dir(f3);
    const FieldEval f4 = field(sym, b, p.x + h * a3, p.xi + h * b3);
    const auto [a4, b4] = dir(f4);
    Point q{p.x + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4),
            p.xi + h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)};
    return correct(q, f4.gx, f4.gxi);
  }
};

SeedInfo locate_seed(const PauliSymbol& sym, Branch b, double E, const TraceOptions& opts) {
  const Point hint = resolve_hint(sym, opts);
  const double Rx = sym.domain.periodic_x() ? sym.domain.period_x : opts.search_radius;
  const double Rxi = sym.domain.periodic_xi() ? sym.domain.period_xi : opts.search_radius;
  const auto xp = ray_crossing(sym, b, E, hint, 1.0, 0.0, Rx);
  const auto xm = ray_crossing(sym, b, E, hint, -1.0, 0.0, Rx);
  const auto ip = ray_crossing(sym, b, E, hint, 0.0, 1.0, Rxi);
  const auto im = ray_crossing(sym, b, E, hint, 0.0, -1.0, Rxi);
  if (!xp || !xm || !ip || !im) {
    throw Error(ErrorKind::SeedNotFound,
                "no closed level curve " + std::string(branch_name(b)) + " = " + format_number(E) +
                    " around (" + format_number(hint.x) + ", " + format_number(hint.xi) +
                    ") within the search box");
  }
  SeedInfo info;
  info.scale = std::max(*xp + *xm, *ip + *im);
  info.seed = {hint.x + *xp, hint.xi};
  for (const Point& q : {info.seed, Point{hint.x - *xm, hint.xi}, Point{hint.x, hint.xi + *ip},
                         Point{hint.x, hint.xi - *im}}) {
    info.speed = std::max(info.speed, field(sym, b, q.x, q.xi).gnorm);
  }
  const double tol = 1e-10 * std::max(1.0, std::abs(E));
  const FieldEval f = field(sym, b, info.seed.x, info.seed.xi);
  info.seed = Tracer{sym, b, E, tol}.correct(info.seed, f.gx, f.gxi);
  return info;
}

bool point_in_polygon(const std::vector<CurveSample>& s, std::size_t n, double x, double xi) {
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const double yi = s[i].xi;
    const double yj = s[j].xi;
    if ((yi > xi) != (yj > xi)) {
      const double xc = s[j].x + (xi - yj) * (s[i].x - s[j].x) / (yi - yj);
      if (x < xc) inside = !inside;
    }
  }
  return inside;
}

/// Smallest even number >= n whose odd part has only the factors 3 and 5.
std::size_t smooth_even(std::size_t n) {
  for (std::size_t m = std::max<std::size_t>(n, 16);; ++m) {
    if (m % 2) continue;
    std::size_t r = m;
    for (std::size_t f : {2, 3, 5})
      while (r % f == 0) r /= f;
    if (r == 1) return m;
  }
}

/// Derivative with respect to sigma in [0, 2 pi) of periodic samples.
std::vector<double> spectral_derivative(const std::vector<double>& v) {
  const std::size_t n = v.size();
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> hat;
  fft.fwd(hat, v);
  for (std::size_t k = 0; k < n; ++k) {
    const long m = k <= n / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
    hat[k] *= (2 * k == n) ? 0.0 : std::complex<double>(0.0, static_cast<double>(m));
  }
  std::vector<std::complex<double>> out;
  fft.inv(out, hat);
  std::vector<double> d(n);
  for (std::size_t k = 0; k < n; ++k) d[k] = out[k].real();
  return d;
}

}  // namespace

Point find_seed(const PauliSymbol& sym, Branch b, double E, const TraceOptions& opts) {
  return locate_seed(sym, b, E, opts).seed;
}

LevelCurve trace(const PauliSymbol& sym, Branch b, double E, const TraceOptions& opts) {
  const SeedInfo info = locate_seed(sym, b, E, opts);
  const Point seed = info.seed;
  LevelCurve c;
  c.options = opts;
  c.energy_E = E;
  c.branch = b;
  c.scale = info.scale;
  c.ds = opts.ds > 0.0 ? opts.ds : info.scale / 256.0;
  const double tol_level = opts.tol_level > 0.0 ? opts.tol_level : 1e-10 * std::max(1.0, std::abs(E));
  auto default_close = [&] { return opts.tol_close > 0.0 ? opts.tol_close : 10.0 * c.ds; };
  auto default_steps = [&] {
    return opts.max_steps > 0 ? opts.max_steps
                              : static_cast<std::size_t>(std::ceil(100.0 * info.scale / c.ds));
  };
  double tol_close = default_close();
  const Tracer tr{sym, b, E, tol_level};

  const FieldEval f0 = field(sym, b, seed.x, seed.xi);
  const double tx = f0.gxi / f0.gnorm;
  const double txi = -f0.gx / f0.gnorm;
  const double Lx = sym.domain.periodic_x() ? sym.domain.period_x : 0.0;
  const double Lxi = sym.domain.periodic_xi() ? sym.domain.period_xi : 0.0;

  // Pass 1: march until the section through the seed is crossed again. With
  // an automatic step, repeat with a smaller one while the tangent turns by
  // more than kMaxTurn per step.
  constexpr double kMaxTurn = 0.2;
  double period = 0.0;
  for (int attempt = 0;; ++attempt) {
    const std::size_t max_steps = default_steps();
    Point p = seed;
    FieldEval f = f0;
    double g_prev = 0.0;
    double max_turn = 0.0;
    bool closed = false;
    const double dt = c.ds / info.speed;
    for (std::size_t k = 1; k <= max_steps; ++k) {
      p = tr.step(p, f, dt);
      const FieldEval f_next = field(sym, b, p.x, p.xi);
      max_turn = std::max(max_turn, std::abs(std::atan2(f.gx * f_next.gxi - f.gxi * f_next.gx,
                                                        f.gx * f_next.gx + f.gxi * f_next.gxi)));
      f = f_next;
      double dx = p.x - seed.x;
      double dxi = p.xi - seed.xi;
      double shift_x = Lx > 0.0 ? std::round(dx / Lx) : 0.0;
      double shift_xi = Lxi > 0.0 ? std::round(dxi / Lxi) : 0.0;
      dx -= shift_x * Lx;
      dxi -= shift_xi * Lxi;
      const double g = dx * tx + dxi * txi;
      if (k >= 3 && g_prev <= 0.0 && g > 0.0 && std::hypot(dx, dxi) < tol_close) {
        if (shift_x != 0.0 || shift_xi != 0.0) {
          throw Error(ErrorKind::NotClosed,
                      "level curve closes only modulo the lattice (non-contractible loop)");
        }
        const double alpha = -g_prev / (g - g_prev);
        period = (static_cast<double>(k) - 1.0 + alpha) * dt;
        closed = true;
        break;
      }
      g_prev = g;
    }
    if (!closed) {
      throw Error(ErrorKind::NotClosed,
                  "curve did not close within " + std::to_string(max_steps) + " steps");
    }
    if (opts.ds > 0.0 || max_turn <= kMaxTurn || attempt == 3) break;
    c.ds *= 0.9 * kMaxTurn / max_turn;
    tol_close = default_close();
  }

  // Pass 2: n uniform steps in flow time, adjusting the period until the end
  // point lands on the seed.
  const std::size_t n =
      smooth_even(static_cast<std::size_t>(std::ceil(period * info.speed / c.ds)));
  std::vector<Point> pts(n);
  std::vector<FieldEval> fe(n);
  double gap = 0.0;
  for (int pass = 0; pass < 6; ++pass) {
    const double h = period / static_cast<double>(n);
    Point p = seed;
    FieldEval f = f0;
    for (std::size_t k = 0; k < n; ++k) {
      pts[k] = p;
      fe[k] = f;
      p = tr.step(p, f, h);
      if (k + 1 < n) f = field(sym, b, p.x, p.xi);
    }
    const double dx = p.x - seed.x;
    const double dxi = p.xi - seed.xi;
    const double g = dx * tx + dxi * txi;
    gap = std::hypot(dx, dxi);
    if (gap > tol_close) {
      throw Error(ErrorKind::NotClosed, "closure gap " + format_number(gap) + " exceeds " +
                                            format_number(tol_close));
    }
    if (std::abs(g) <= 1e-13 * std::max(1.0, info.scale)) break;
    period -= g / f0.gnorm;
  }

  c.samples.resize(n + 1);
  c.weights.resize(n);
  c.dx_dt.resize(n);
  c.h_min_gap = std::numeric_limits<double>::infinity();
  c.grad_min = std::numeric_limits<double>::infinity();
  // Flow-time weights from the spectral tangent: dt = dX . (mu_xi, -mu_x) / |grad mu|^2.
  std::vector<double> xs(n), xis(n);
  for (std::size_t k = 0; k < n; ++k) {
    xs[k] = pts[k].x;
    xis[k] = pts[k].xi;
  }
  const std::vector<double> dxs = spectral_derivative(xs);
  const std::vector<double> dxis = spectral_derivative(xis);
  const double dsig = 2.0 * M_PI / static_cast<double>(n);
  double T = 0.0;
  c.length = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const FieldEval& f = fe[k];
    c.length += dsig * std::hypot(dxs[k], dxis[k]);
    c.weights[k] = dsig * (dxs[k] * f.gxi - dxis[k] * f.gx) / (f.gnorm * f.gnorm);
    c.dx_dt[k] = f.gxi;
    T += c.weights[k];
    c.h_min_gap = std::min(c.h_min_gap, f.normP);
    c.grad_min = std::min(c.grad_min, f.gnorm);
  }
  c.period_T = T;
  double t = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    c.samples[k] = {pts[k].x, pts[k].xi, t};
    t += 0.5 * (c.weights[k] + c.weights[(k + 1) % n]);
  }
  for (std::size_t k = 1; k < n; ++k) c.samples[k].t *= T / t;
  c.samples[n] = {seed.x, seed.xi, T};
  c.region = classify(sym, c);
  return c;
}

double polygon_area(const LevelCurve& curve) {
  const std::size_t n = curve.size();
  double a = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = curve.samples[i];
    const auto& q = curve.samples[i + 1];
    a += p.x * q.xi - q.x * p.xi;
  }
  return 0.5 * a;
}

Region classify(const PauliSymbol& sym, const LevelCurve& curve) {
  const std::size_t n = curve.size();
  const double area = polygon_area(curve);
  const auto& s0 = curve.samples[0];
  const auto [gx, gxi] = eigenvalue_grad(sym, curve.branch, s0.x, s0.xi);
  const double gn = std::hypot(gx, gxi);
  for (double delta = 3.0 * curve.ds; delta <= 0.25 * curve.scale + 3.0 * curve.ds; delta *= 2.0) {
    for (double sgn : {-1.0, 1.0}) {
      const double x = s0.x + sgn * delta * gx / gn;
      const double xi = s0.xi + sgn * delta * gxi / gn;
      if (!point_in_polygon(curve.samples, n, x, xi)) continue;
      const double mu = eigenvalue(sym, curve.branch, x, xi);
      if (mu == curve.energy_E) continue;
      const Region r = mu < curve.energy_E ? Region::Well : Region::Barrier;
      const bool clockwise = area < 0.0;
      if ((r == Region::Well) != clockwise) {
        throw Error(ErrorKind::Inconsistent,
                    "interior probe says " + std::string(region_name(r)) +
                        " but the flow runs " + (clockwise ? "clockwise" : "counterclockwise"));
      }
      return r;
    }
  }
  throw Error(ErrorKind::Inconsistent, "no interior probe point found");
}

Quadrature integrate_values(const LevelCurve& curve, const std::vector<double>& values) {
  const std::size_t n = curve.size();
  double full = 0.0;
  double half = 0.0;
  double mag = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double v = values[k] * curve.weights[k];
    full += v;
    mag += std::abs(v);
    if (k % 2 == 0) half += 2.0 * v;
  }
  return {full, std::max(std::abs(full - half), 1e-10 * mag)};
}

Quadrature integrate_dt(const LevelCurve& curve, const PointField& f) {
  std::vector<double> v(curve.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = f(curve.samples[k].x, curve.samples[k].xi);
  return integrate_values(curve, v);
}

Quadrature action_S0(const LevelCurve& curve) {
  std::vector<double> v(curve.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = curve.samples[k].xi * curve.dx_dt[k];
  return integrate_values(curve, v);
}

std::string curve_csv(const LevelCurve& curve) {
  std::string out = "# E,branch,period_T,region\n";
  out += "# " + csv_row({csv_number(curve.energy_E), std::string(branch_name(curve.branch)),
                         csv_number(curve.period_T), std::string(region_name(curve.region))});
  out += csv_row({"t", "x", "xi"});
  for (const auto& s : curve.samples)
    out += csv_row({csv_number(s.t), csv_number(s.x), csv_number(s.xi)});
  return out;
}

}  // namespace bsq
