#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bsq/symbol.hpp"

namespace bsq {

struct QuantPlan {
  enum class Basis { FourierLine, FourierTorus };
  Basis basis = Basis::FourierLine;
  double L = 8.0;      ///< half-width, line only
  std::size_t N = 256; ///< power of two >= 64
  double h = 0.1;
  double kx = 0.0;     ///< torus only

  static QuantPlan line(double L, std::size_t N, double h) {
    return {Basis::FourierLine, L, N, h, 0.0};
  }
  static QuantPlan torus(std::size_t N, double h, double kx = 0.0) {
    return {Basis::FourierTorus, 0.0, N, h, kx};
  }

  /// Throws ConfigError on a bad N, h or L.
  void validate() const;
  /// xi at basis index j (mode n = j - N/2).
  double xi(std::size_t j) const;
};

/// Spin-major layout: row s * N + j holds spin component s, basis index j.
/// Line: j indexes the grid x_j = -L + 2 L j / N. Torus: j indexes the
/// Fourier mode n = j - N/2.
struct HermitianMatrix {
  Eigen::MatrixXcd m;
  double h = 0.0;
  QuantPlan plan;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(m.rows()); }
  /// max |M - M*| / max |M|
  double hermiticity_residual() const;
};

/// The x-dependent coefficient of one xi-basis function, per Pauli component.
struct SymbolTerm {
  enum class XiBasis { One, Xi, Xi2, Cos, Sin };
  int component = 0;
  XiBasis beta = XiBasis::One;
  /// Coefficient at the line grid or at the 4N torus sample points.
  std::vector<double> a;
};

/// Decomposes p_i + h r_i into sum_m a_m(x) beta_m(xi). Throws
/// UnsupportedSymbol when the fit fails a check at extra xi nodes or a field
/// cannot be evaluated on the sample points.
std::vector<SymbolTerm> extract_terms(const PauliSymbol& sym, const QuantPlan& plan);

HermitianMatrix quantize(const PauliSymbol& sym, const QuantPlan& plan);

enum class DecayPolicy { Off, Reject, Filter };

/// Off for symbols periodic in xi, whose states extend over every period of
/// the Fourier range; Reject on the line with a window; Filter otherwise.
DecayPolicy default_decay(const PauliSymbol& sym, const QuantPlan& plan, bool windowed);

struct EigenOptions {
  std::optional<std::array<double, 2>> window;
  DecayPolicy decay = DecayPolicy::Off;
  /// Largest admissible eigenvector mass in the outer 10% of the basis.
  double decay_tol = 1e-8;
};

struct EigenResult {
  std::vector<double> values;        ///< ascending
  std::vector<double> boundary_mass; ///< per value; empty when decay is off
  std::size_t filtered = 0;
};

/// Dense Hermitian eigensolve. Eigenvectors with boundary mass above
/// decay_tol are dropped by Filter. Reject drops those with more than half of
/// their mass at the boundary, and extra members of a degenerate cluster that
/// already holds a decaying vector (states of the periodization seam); it
/// throws PlanTooSmall for the rest.
EigenResult eigenvalues(const HermitianMatrix& M, const EigenOptions& opts = {});

/// Eigenpairs in the window, vectors as columns.
struct EigenPairs {
  std::vector<double> values;
  Eigen::MatrixXcd vectors;
};
EigenPairs eigenpairs(const HermitianMatrix& M, std::optional<std::array<double, 2>> window);

/// Mass of a unit vector in the outer 10% of the basis, both spins.
double boundary_mass(const Eigen::Ref<const Eigen::VectorXcd>& v, std::size_t N);

/// The `count` entries of smallest absolute value, sorted by value.
std::vector<double> smallest_abs(std::vector<double> values, std::size_t count);

struct BandTable {
  std::vector<double> kx;
  /// rows[i] holds the eigenvalues nearest zero at kx[i], ascending.
  std::vector<std::vector<double>> rows;

  /// max - min of every column.
  std::vector<double> variation() const;
};

/// Eigenvalues nearest zero of the Timmel-Mele models over a kx grid. The
/// tight-binding variant has no kx and yields a single row at kx = 0.
enum class TmVariant { Low, TightBinding };
BandTable tm_bands(TmVariant variant, double h, const QuantPlan& plan,
                   const std::vector<double>& kx_grid, std::size_t count);

std::string eigenvalue_csv(const std::vector<double>& values);
std::string band_csv(const BandTable& table);

}  // namespace bsq
