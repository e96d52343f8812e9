#include "bsq/phases.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Eigenvalues>

#include "bsq/csv.hpp"
#include "bsq/error.hpp"

namespace bsq {

namespace {

constexpr double kPlanarTol = 1e-8;
constexpr int kMaxRefine = 5;

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 sample_P(const PauliSymbol& sym, const CurveSample& s) {
  return {sym.p[1].eval(s.x, s.xi), sym.p[2].eval(s.x, s.xi), sym.p[3].eval(s.x, s.xi)};
}

double wrap_pi(double d) {
  d = std::remainder(d, 2.0 * M_PI);
  return d;
}

/// Re-traces with halved steps until `coarse(curve)` is false.
LevelCurve refine_until(const PauliSymbol& sym, const LevelCurve& curve,
                        const std::function<bool(const LevelCurve&)>& coarse,
                        std::string_view what) {
  TraceOptions opts = curve.options;
  double ds = curve.ds;
  for (int level = 1; level <= kMaxRefine; ++level) {
    ds *= 0.5;
    opts.ds = ds;
    LevelCurve fine = trace(sym, curve.branch, curve.energy_E, opts);
    if (!coarse(fine)) return fine;
  }
  throw Error(ErrorKind::UnwrapFailure,
              std::string(what) + " still jumps by more than pi/2 between samples after " +
                  std::to_string(kMaxRefine) + " refinements");
}

/// Azimuth samples; throws PoleOnCurve if p1^2 + p2^2 is too small anywhere.
std::vector<double> azimuths(const PauliSymbol& sym, const LevelCurve& curve) {
  std::vector<double> phi(curve.size());
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const Vec3 P = sample_P(sym, curve.samples[k]);
    const double rho2 = P[0] * P[0] + P[1] * P[1];
    if (rho2 < 1e-12 * (rho2 + P[2] * P[2])) {
      throw Error(ErrorKind::PoleOnCurve,
                  "p1^2 + p2^2 vanishes on the curve at x=" + format_number(curve.samples[k].x) +
                      ", xi=" + format_number(curve.samples[k].xi));
    }
    phi[k] = std::atan2(P[1], P[0]);
  }
  return phi;
}

bool jumps(const std::vector<double>& angle) {
  const std::size_t n = angle.size();
  for (std::size_t k = 0; k < n; ++k)
    if (std::abs(wrap_pi(angle[(k + 1) % n] - angle[k])) >= 0.5 * M_PI) return true;
  return false;
}

/// The curve itself, or a refined re-trace on which phi unwraps cleanly.
LevelCurve unwrappable(const PauliSymbol& sym, const LevelCurve& curve) {
  if (!jumps(azimuths(sym, curve))) return curve;
  return refine_until(
      sym, curve, [&](const LevelCurve& c) { return jumps(azimuths(sym, c)); }, "phi");
}

std::vector<double> q_args(const PlaneMap& m, const PauliSymbol& sym, const LevelCurve& curve) {
  std::vector<double> arg(curve.size());
  for (std::size_t k = 0; k < arg.size(); ++k) {
    const Vec3 P = sample_P(sym, curve.samples[k]);
    arg[k] = std::atan2(dot(m.b, P), dot(m.a, P));
  }
  return arg;
}

}  // namespace

Vec3 canonical_normal(Vec3 c) {
  double n = std::sqrt(dot(c, c));
  if (!(n > 0.0)) throw Error(ErrorKind::ConfigError, "plane normal must be nonzero");
  for (double& v : c) v /= n;
  for (double& v : c)
    if (std::abs(v) < 1e-12) v = 0.0;
  n = std::sqrt(dot(c, c));
  for (double& v : c) v /= n;
  const double lead = c[2] != 0.0 ? c[2] : (c[0] != 0.0 ? c[0] : c[1]);
  if (lead < 0.0)
    for (double& v : c) v = -v;
  return c;
}

PlaneMap plane_map(const Vec3& normal) {
  const Vec3 c = canonical_normal(normal);
  const double c1 = c[0];
  const double c2 = c[1];
  const double c3 = c[2];
  const double r2 = c1 * c1 + c2 * c2;
  PlaneMap m;
  m.c = c;
  if (r2 == 0.0) {
    m.a = {1.0, 0.0, 0.0};
    m.b = {0.0, 1.0, 0.0};
    return m;
  }
  const double k = (1.0 - c3) / r2;
  m.a = {c3 + c2 * c2 * k, -c1 * c2 * k, -c1};
  m.b = {-c1 * c2 * k, c3 + c1 * c1 * k, -c2};
  return m;
}

PlaneFit fit_plane_normal(const PauliSymbol& sym, const LevelCurve& curve) {
  Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
  std::vector<Vec3> Ps(curve.size());
  double max_norm = 0.0;
  for (std::size_t k = 0; k < Ps.size(); ++k) {
    Ps[k] = sample_P(sym, curve.samples[k]);
    const double n = std::sqrt(dot(Ps[k], Ps[k]));
    max_norm = std::max(max_norm, n);
    if (n == 0.0) continue;
    const Eigen::Vector3d u(Ps[k][0] / n, Ps[k][1] / n, Ps[k][2] / n);
    M += u * u.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(M);
  const Eigen::Vector3d v = es.eigenvectors().col(0);
  PlaneFit fit;
  fit.normal = canonical_normal({v[0], v[1], v[2]});
  double worst = 0.0;
  for (const auto& P : Ps) worst = std::max(worst, std::abs(dot(fit.normal, P)));
  fit.residual = max_norm > 0.0 ? worst / max_norm : 0.0;
  return fit;
}

Winding winding(const PauliSymbol& sym, const LevelCurve& curve, const PlaneSpec& plane) {
  Vec3 normal{0.0, 0.0, 1.0};
  switch (plane.kind) {
    case PlaneSpec::Kind::Auto: {
      const PlaneFit fit = fit_plane_normal(sym, curve);
      if (fit.residual >= kPlanarTol) {
        throw Error(ErrorKind::NotPlanar, "P is not confined to a plane along the curve (residual " +
                                              format_number(fit.residual) + ")");
      }
      normal = fit.normal;
      break;
    }
    case PlaneSpec::Kind::VanishingIndex:
      if (plane.index < 1 || plane.index > 3)
        throw Error(ErrorKind::ConfigError, "vanishing index must be 1, 2 or 3");
      normal = {0.0, 0.0, 0.0};
      normal[static_cast<std::size_t>(plane.index - 1)] = 1.0;
      break;
    case PlaneSpec::Kind::Normal:
      normal = plane.normal;
      break;
  }
  const PlaneMap m = plane_map(normal);
  if (plane.kind != PlaneSpec::Kind::Auto) {
    for (const auto& s : curve.samples) {
      const Vec3 P = sample_P(sym, s);
      if (std::abs(dot(m.c, P)) >= kPlanarTol * std::sqrt(dot(P, P))) {
        throw Error(ErrorKind::NotPlanar, "C.P does not vanish at x=" + format_number(s.x) +
                                              ", xi=" + format_number(s.xi));
      }
    }
  }

  LevelCurve fine = curve;
  if (jumps(q_args(m, sym, curve))) {
    fine = refine_until(
        sym, curve, [&](const LevelCurve& c) { return jumps(q_args(m, sym, c)); }, "arg q");
  }

  const std::size_t n = fine.size();
  const double s = branch_sign(fine.branch);
  std::vector<double> rate(n);
  double discrete = 0.0;
  double prev_arg = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& smp = fine.samples[k];
    const Jet j = jet(sym, smp.x, smp.xi);
    const double np = j.norm_P();
    double mx = j.px[0];
    double mxi = j.pxi[0];
    for (std::size_t i = 1; i < 4; ++i) {
      mx += s * j.p[i] * j.px[i] / np;
      mxi += s * j.p[i] * j.pxi[i] / np;
    }
    const Vec3 P{j.p[1], j.p[2], j.p[3]};
    const Vec3 Pdot{j.px[1] * mxi - j.pxi[1] * mx, j.px[2] * mxi - j.pxi[2] * mx,
                    j.px[3] * mxi - j.pxi[3] * mx};
    const double q1 = dot(m.a, P);
    const double q2 = dot(m.b, P);
    const double q2n = q1 * q1 + q2 * q2;
    if (std::sqrt(q2n) < 1e-8) {
      throw Error(ErrorKind::OriginOnCurve, "q passes through the origin at x=" +
                                                format_number(smp.x) + ", xi=" + format_number(smp.xi));
    }
    rate[k] = (q1 * dot(m.b, Pdot) - q2 * dot(m.a, Pdot)) / q2n;
    const double arg = std::atan2(q2, q1);
    if (k > 0) discrete += wrap_pi(arg - prev_arg);
    prev_arg = arg;
  }
  {
    const Vec3 P0 = sample_P(sym, fine.samples[0]);
    discrete += wrap_pi(std::atan2(dot(m.b, P0), dot(m.a, P0)) - prev_arg);
  }

  Winding w;
  w.normal = m.c;
  w.raw = integrate_values(fine, rate).value / (2.0 * M_PI);
  w.value = static_cast<int>(std::lround(w.raw));
  w.residual = std::abs(w.raw - w.value);
  const long counted = std::lround(discrete / (2.0 * M_PI));
  if (w.residual >= 0.05 || counted != w.value) {
    throw Error(ErrorKind::RoundingAmbiguous,
                "winding integral " + format_number(w.raw) + " does not round cleanly");
  }
  return w;
}

Quadrature berry_phase(const PauliSymbol& sym, Branch b, const LevelCurve& curve) {
  const LevelCurve c = unwrappable(sym, curve);
  const double s = branch_sign(b);
  return integrate_dt(c, [&](double x, double xi) {
    const LocalFrame f = local_frame(sym, b, x, xi);
    return s * 0.5 * (1.0 - std::cos(f.theta)) * f.bracket_mu_phi();
  });
}

Quadrature rw_phase(const PauliSymbol& sym, Branch b, const LevelCurve& curve,
                    double norm_weight) {
  const LevelCurve c = unwrappable(sym, curve);
  const double s = branch_sign(b);
  return integrate_dt(c, [&](double x, double xi) {
    const LocalFrame f = local_frame(sym, b, x, xi);
    return (s * f.jet.p[0] + norm_weight * f.norm_P) * 0.25 * std::sin(f.theta) * f.bracket_theta_phi();
  });
}

Quadrature h1_phase(const PauliSymbol& sym, Branch b, const LevelCurve& curve) {
  try {
    return integrate_dt(curve, [&](double x, double xi) { return h1_density(sym, b, x, xi); });
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::CrossingError) throw Error(ErrorKind::CrossingOnCurve, e.what());
    throw;
  }
}

double reduce_angle(double v) {
  double r = std::remainder(v, 2.0 * M_PI);
  if (r <= -M_PI) r += 2.0 * M_PI;
  return r;
}

PhaseReport assemble(const PauliSymbol& sym, Branch b, const LevelCurve& curve,
                     const PhaseOptions& opts) {
  PhaseReport r;
  r.E = curve.energy_E;
  r.branch = b;
  r.region = curve.region;
  r.period_T = curve.period_T;
  const Quadrature S0 = action_S0(curve);
  r.S0 = S0.value;
  r.errors.S0 = S0.error;
  const Quadrature h1 = h1_phase(sym, b, curve);
  r.I_H1 = h1.value;
  r.errors.I_H1 = h1.error;

  bool quantized = false;
  if (!opts.force_generic) {
    if (opts.plane.kind == PlaneSpec::Kind::Auto) {
      const PlaneFit fit = fit_plane_normal(sym, curve);
      quantized = fit.residual < kPlanarTol;
    } else {
      quantized = true;
    }
  }
  if (quantized) {
    const Winding w = winding(sym, curve, opts.plane);
    r.winding = w.value;
    r.winding_residual = w.residual;
    r.plane_normal = w.normal;
    r.theta_B = branch_sign(b) * M_PI * w.value;
    r.theta_RW = 0.0;
    r.quantized_branch_used = true;
  } else {
    const Quadrature tb = berry_phase(sym, b, curve);
    const Quadrature trw = rw_phase(sym, b, curve, opts.rw_norm_weight);
    r.theta_B = tb.value;
    r.theta_RW = trw.value;
    r.errors.theta_B = tb.error;
    r.errors.theta_RW = trw.error;
  }
  r.S1_raw = M_PI - r.I_H1 - r.theta_B - r.theta_RW;
  r.S1 = reduce_angle(r.S1_raw);
  r.errors.S1 = r.errors.I_H1 + r.errors.theta_B + r.errors.theta_RW;
  return r;
}

std::string phase_csv_header() {
  return csv_row({"E", "branch", "S0", "theta_B", "theta_RW", "I_H1", "S1", "winding",
                  "quantized"});
}

std::string phase_csv_row(const PhaseReport& r) {
  return csv_row({csv_number(r.E), std::string(branch_name(r.branch)), csv_number(r.S0),
                  csv_number(r.theta_B), csv_number(r.theta_RW), csv_number(r.I_H1),
                  csv_number(r.S1), r.winding ? std::to_string(*r.winding) : std::string(),
                  r.quantized_branch_used ? "1" : "0"});
}

}  // namespace bsq
