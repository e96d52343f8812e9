#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bsq/phases.hpp"

namespace bsq {

struct GridOptions {
  std::size_t initial_points = 9;
  std::size_t max_points = 600;
  /// Midpoint probes must reproduce S_eff to tol * max(1, |S_eff|).
  double tol = 1e-8;
  /// Anchor the grid at the extremum of mu (where the curve shrinks to a
  /// point and S0 = 0) if it lies at or next to the window.
  bool include_extremum = false;
  TraceOptions trace;
  PhaseOptions phases;
};

struct ActionNode {
  double E = 0.0;
  double S0 = 0.0;
  double T = 0.0;    ///< dS0/dE, the period
  double S1 = 0.0;   ///< continuous in E; the lowest traced node in (-pi, pi]
  double dS1 = 0.0;  ///< finite-difference slope from neighboring nodes
  bool anchor = false;
};

/// Well: S_eff = S0 + h S1. Barrier: S_eff = -(S0 + h S1), which keeps the
/// spectrum of -H equal to minus the spectrum of H when S1 is not a multiple
/// of pi. The S1 term is dropped for order 0.
class ActionFunction {
 public:
  Branch branch = Branch::Plus;
  Region region = Region::Well;
  std::array<double, 2> window{};
  int order = 1;
  double h = 0.0;
  std::vector<ActionNode> nodes;  ///< sorted by E
  double max_probe_error = 0.0;

  double S0(double E) const;
  double T(double E) const;
  double S1(double E) const;
  double S_eff(double E, double h) const;
  double S_eff_slope(double E, double h) const;
  double S_eff(double E) const { return S_eff(E, h); }

  double lower() const { return nodes.front().E; }
  double upper() const { return nodes.back().E; }

 private:
  std::size_t interval(double E) const;
};

/// Extremum of mu near the hint: minimum for a well, maximum for a barrier.
struct Extremum {
  Point at;
  double value = 0.0;
};
Extremum find_extremum(const PauliSymbol& sym, Branch b, Region region,
                       const TraceOptions& opts = {});

/// Throws NonMonotone if S_eff is not strictly monotone across the grid.
ActionFunction build_action(const PauliSymbol& sym, Branch b, std::array<double, 2> window,
                            double h, int order, const GridOptions& opts = {});

struct SpectrumRow {
  long k = 0;
  double E = 0.0;
  int order = 1;
  double residual = 0.0;
};

struct SpectrumTable {
  double h = 0.0;
  Branch branch = Branch::Plus;
  std::array<double, 2> window{};
  std::vector<SpectrumRow> rows;  ///< sorted by E
};

/// Roots of S_eff(E) = 2 pi k h for every k whose target lies in the range
/// of S_eff over the grid.
SpectrumTable predict_spectrum(const ActionFunction& action, double h);

std::string spectrum_csv(const SpectrumTable& table);

}  // namespace bsq
