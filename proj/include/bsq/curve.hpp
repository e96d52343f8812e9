#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bsq/symbol.hpp"

namespace bsq {

enum class Region { Well, Barrier };
std::string_view region_name(Region r) noexcept;

struct CurveSample {
  double x = 0.0;
  double xi = 0.0;
  double t = 0.0;
};

/// Zero fields select the automatic defaults.
struct TraceOptions {
  /// Nominal arc-length step where the flow is fastest; the flow-time step is
  /// ds / max|grad mu|. Default curve-scale / 256, reduced automatically
  /// while the tangent turns by more than 0.2 rad per step.
  double ds = 0.0;
  double tol_level = 0.0;   ///< default 1e-10 * max(1, |E|)
  double tol_close = 0.0;   ///< default 10 * ds
  std::size_t max_steps = 0;  ///< default ceil(100 * curve-scale / ds)
  double search_radius = 20.0;  ///< seed search along non-periodic directions
  std::optional<Point> hint;    ///< overrides the symbol's hint
};

/// A closed level curve of one eigenvalue branch, sampled at equal flow-time
/// steps along the Hamilton flow. `samples` has n + 1 entries; the last one
/// repeats the first at t = period_T.
struct LevelCurve {
  std::vector<CurveSample> samples;
  double period_T = 0.0;
  double energy_E = 0.0;
  Branch branch = Branch::Plus;
  Region region = Region::Well;
  double h_min_gap = 0.0;
  double grad_min = 0.0;

  double ds = 0.0;
  double length = 0.0;
  double scale = 0.0;
  TraceOptions options;
  /// Flow-time quadrature weights for the n distinct samples.
  std::vector<double> weights;
  /// dx/dt = d mu/d xi at the n distinct samples.
  std::vector<double> dx_dt;

  std::size_t size() const noexcept { return weights.size(); }
};

struct Quadrature {
  double value = 0.0;
  double error = 0.0;
};

/// Interior hint scanned along the four axis rays; a sign change of mu - E on
/// every ray is required. Returns the crossing on the +x ray.
Point find_seed(const PauliSymbol& sym, Branch b, double E, const TraceOptions& opts = {});

LevelCurve trace(const PauliSymbol& sym, Branch b, double E, const TraceOptions& opts = {});

Region classify(const PauliSymbol& sym, const LevelCurve& curve);

/// Signed shoelace area of the sample polygon, counterclockwise positive.
double polygon_area(const LevelCurve& curve);

using PointField = std::function<double(double x, double xi)>;

/// Periodic trapezoid rule in the sample parameter with weights taken from
/// the spectral tangent; spectrally accurate for smooth f.
/// The error estimate compares with the rule on every second sample.
Quadrature integrate_dt(const LevelCurve& curve, const PointField& f);

/// Same rule for values already evaluated at the n distinct samples.
Quadrature integrate_values(const LevelCurve& curve, const std::vector<double>& values);

/// Integral of xi dx in the flow orientation.
Quadrature action_S0(const LevelCurve& curve);

std::string curve_csv(const LevelCurve& curve);

}  // namespace bsq
