#include "bsq/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <lapacke.h>
#include <unsupported/Eigen/FFT>

#include "bsq/csv.hpp"
#include "bsq/error.hpp"
#include "bsq/presets.hpp"

namespace bsq {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr std::size_t kBasis = 5;

double beta_value(SymbolTerm::XiBasis b, double xi) {
  switch (b) {
    case SymbolTerm::XiBasis::One: return 1.0;
    case SymbolTerm::XiBasis::Xi: return xi;
    case SymbolTerm::XiBasis::Xi2: return xi * xi;
    case SymbolTerm::XiBasis::Cos: return std::cos(2.0 * kPi * xi);
    case SymbolTerm::XiBasis::Sin: return std::sin(2.0 * kPi * xi);
  }
  return 0.0;
}

constexpr std::array<double, kBasis> kFitNodes{-0.61, -0.23, 0.07, 0.38, 0.71};
constexpr std::array<double, 4> kCheckNodes{1.37, -2.9, 0.93, 4.6};

bool power_of_two(std::size_t n) { return n && !(n & (n - 1)); }

std::vector<double> sample_points(const QuantPlan& plan) {
  std::vector<double> xs;
  if (plan.basis == QuantPlan::Basis::FourierLine) {
    xs.resize(plan.N);
    for (std::size_t j = 0; j < plan.N; ++j)
      xs[j] = -plan.L + 2.0 * plan.L * static_cast<double>(j) / static_cast<double>(plan.N);
  } else {
    const std::size_t M = 4 * plan.N;
    xs.resize(M);
    for (std::size_t j = 0; j < M; ++j) xs[j] = static_cast<double>(j) / static_cast<double>(M);
  }
  return xs;
}

// Hermitian operator of one term in the plan's basis, upper triangle filled.
void add_term(Eigen::MatrixXcd& Q, const SymbolTerm& term, const QuantPlan& plan) {
  const std::size_t N = plan.N;
  const auto n = static_cast<Eigen::Index>(N);
  std::vector<double> beta(N);
  for (std::size_t j = 0; j < N; ++j) beta[j] = beta_value(term.beta, plan.xi(j));

  if (plan.basis == QuantPlan::Basis::FourierLine) {
    if (term.beta == SymbolTerm::XiBasis::One) {
      for (Eigen::Index j = 0; j < n; ++j) Q(j, j) += term.a[static_cast<std::size_t>(j)];
      return;
    }
    // Circulant kernel c_d = (1/N) sum_n beta(xi_n) exp(2 pi i n d / N).
    std::vector<cd> roots(N);
    for (std::size_t k = 0; k < N; ++k)
      roots[k] = std::polar(1.0, 2.0 * kPi * static_cast<double>(k) / static_cast<double>(N));
    std::vector<cd> c(N);
    for (std::size_t d = 0; d < N; ++d) {
      cd s = 0.0;
      for (std::size_t j = 0; j < N; ++j) {
        const long mode = static_cast<long>(j) - static_cast<long>(N / 2);
        const auto idx = static_cast<std::size_t>(
            ((mode * static_cast<long>(d)) % static_cast<long>(N) + static_cast<long>(N)) %
            static_cast<long>(N));
        s += beta[j] * roots[idx];
      }
      c[d] = s / static_cast<double>(N);
    }
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index l = j; l < n; ++l) {
        const auto d = static_cast<std::size_t>((j - l + n) % n);
        Q(j, l) += 0.5 * (term.a[static_cast<std::size_t>(j)] + term.a[static_cast<std::size_t>(l)]) *
                   c[d];
      }
    return;
  }

  // Torus: Fourier coefficients of a on 4N samples, tiny ones set to zero.
  const std::size_t M = term.a.size();
  Eigen::FFT<double> fft;
  std::vector<cd> spec;
  fft.fwd(spec, term.a);
  double amax = 0.0;
  for (const auto& v : spec) amax = std::max(amax, std::abs(v));
  auto coef = [&](long k) -> cd {
    const auto idx = static_cast<std::size_t>((k % static_cast<long>(M) + static_cast<long>(M)) %
                                              static_cast<long>(M));
    const cd v = spec[idx];
    if (std::abs(v) <= 1e-13 * amax) return 0.0;
    return v / static_cast<double>(M);
  };
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index l = j; l < n; ++l) {
      const cd a = coef(static_cast<long>(j - l));
      if (a == cd(0.0)) continue;
      Q(j, l) += 0.5 * a * (beta[static_cast<std::size_t>(j)] + beta[static_cast<std::size_t>(l)]);
    }
}

void mirror_upper(Eigen::MatrixXcd& Q) {
  for (Eigen::Index j = 0; j < Q.rows(); ++j) {
    Q(j, j) = Q(j, j).real();
    for (Eigen::Index l = j + 1; l < Q.cols(); ++l) Q(l, j) = std::conj(Q(j, l));
  }
}

struct Solved {
  std::vector<double> values;
  Eigen::MatrixXcd vectors;
};

Solved solve(const HermitianMatrix& M, std::optional<std::array<double, 2>> window, bool vectors) {
  const auto n = static_cast<lapack_int>(M.dim());
  Solved out;
  if (n == 0) return out;
  Eigen::MatrixXcd a = M.m;
  std::vector<double> w(static_cast<std::size_t>(n));
  Eigen::MatrixXcd z(vectors ? n : 1, vectors ? n : 1);
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n));
  lapack_int found = 0;
  const char range = window ? 'V' : 'A';
  const double vl = window ? (*window)[0] : 0.0;
  const double vu = window ? (*window)[1] : 0.0;
  const lapack_int info = LAPACKE_zheevr(
      LAPACK_COL_MAJOR, vectors ? 'V' : 'N', range, 'U', n,
      reinterpret_cast<lapack_complex_double*>(a.data()), n, vl, vu, 0, 0,
      LAPACKE_dlamch('S'), &found, w.data(), reinterpret_cast<lapack_complex_double*>(z.data()),
      vectors ? n : 1, isuppz.data());
  if (info != 0)
    throw Error(ErrorKind::ConvergenceFailure,
                "Hermitian eigensolver failed (info " + std::to_string(info) + ")");
  out.values.assign(w.begin(), w.begin() + found);
  if (vectors) out.vectors = z.leftCols(found);
  return out;
}

}  // namespace

void QuantPlan::validate() const {
  if (!power_of_two(N) || N < 64)
    throw Error(ErrorKind::ConfigError, "plan N must be a power of two >= 64");
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorKind::ConfigError, "plan h must be > 0");
  if (basis == Basis::FourierLine && !(L > 0.0))
    throw Error(ErrorKind::ConfigError, "plan L must be > 0");
}

double QuantPlan::xi(std::size_t j) const {
  const double n = static_cast<double>(j) - static_cast<double>(N / 2);
  if (basis == Basis::FourierLine) return kPi * n * h / L;
  return 2.0 * kPi * n * h + h * kx;
}

double HermitianMatrix::hermiticity_residual() const {
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() / scale;
}

std::vector<SymbolTerm> extract_terms(const PauliSymbol& sym, const QuantPlan& plan) {
  plan.validate();
  const bool line = plan.basis == QuantPlan::Basis::FourierLine;
  if (line && sym.domain.periodic_x())
    throw Error(ErrorKind::UnsupportedSymbol, "periodic symbol needs a torus plan");
  if (!line && (!sym.domain.periodic_x() || std::abs(sym.domain.period_x - 1.0) > 1e-12))
    throw Error(ErrorKind::UnsupportedSymbol, "torus plan needs a symbol of period 1 in x");

  const auto xs = sample_points(plan);
  using B = SymbolTerm::XiBasis;
  constexpr std::array<B, kBasis> basis{B::One, B::Xi, B::Xi2, B::Cos, B::Sin};

  Eigen::Matrix<double, 5, 5> V;
  for (std::size_t k = 0; k < kBasis; ++k)
    for (std::size_t m = 0; m < kBasis; ++m)
      V(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m)) =
          beta_value(basis[m], kFitNodes[k]);
  const Eigen::PartialPivLU<Eigen::Matrix<double, 5, 5>> lu(V);

  std::vector<SymbolTerm> terms;
  for (int i = 0; i < 4; ++i) {
    const Expr& p = sym.p[static_cast<std::size_t>(i)];
    const Expr& r = sym.r[static_cast<std::size_t>(i)];
    auto field = [&](double x, double xi) { return p.eval(x, xi) + plan.h * r.eval(x, xi); };
    const bool in_xi = p.depends_on_xi() || r.depends_on_xi();

    std::array<std::vector<double>, kBasis> coef;
    for (auto& c : coef) c.assign(xs.size(), 0.0);
    try {
      for (std::size_t j = 0; j < xs.size(); ++j) {
        const double x = xs[j];
        if (!in_xi) {
          coef[0][j] = field(x, 0.0);
          continue;
        }
        Eigen::Matrix<double, 5, 1> f;
        double fmax = 0.0;
        for (std::size_t k = 0; k < kBasis; ++k) {
          f(static_cast<Eigen::Index>(k)) = field(x, kFitNodes[k]);
          fmax = std::max(fmax, std::abs(f(static_cast<Eigen::Index>(k))));
        }
        const Eigen::Matrix<double, 5, 1> c = lu.solve(f);
        for (double z : kCheckNodes) {
          double fit = 0.0;
          double size = 1.0 + fmax;
          for (std::size_t m = 0; m < kBasis; ++m) {
            const double t = c(static_cast<Eigen::Index>(m)) * beta_value(basis[m], z);
            fit += t;
            size += std::abs(t);
          }
          if (std::abs(field(x, z) - fit) > 1e-9 * size)
            throw Error(ErrorKind::UnsupportedSymbol,
                        "component " + std::to_string(i) +
                            " is not a combination of 1, xi, xi^2, cos(2 pi xi), sin(2 pi xi)");
        }
        for (std::size_t m = 0; m < kBasis; ++m) coef[m][j] = c(static_cast<Eigen::Index>(m));
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::UnsupportedSymbol) throw;
      throw Error(ErrorKind::UnsupportedSymbol,
                  "component " + std::to_string(i) + " cannot be sampled: " + e.what());
    }

    double fscale = 0.0;
    for (const auto& c : coef)
      for (double v : c) fscale = std::max(fscale, std::abs(v));
    for (std::size_t m = 0; m < kBasis; ++m) {
      double amax = 0.0;
      for (double v : coef[m]) amax = std::max(amax, std::abs(v));
      // Fit noise on a basis function that is not present.
      if (amax <= 1e-12 * std::max(1.0, fscale)) continue;
      if (m > 0 && amax <= 1e-11 * fscale) continue;
      terms.push_back({i, basis[m], std::move(coef[m])});
    }
  }
  return terms;
}

HermitianMatrix quantize(const PauliSymbol& sym, const QuantPlan& plan) {
  const auto terms = extract_terms(sym, plan);
  const auto n = static_cast<Eigen::Index>(plan.N);
  std::array<Eigen::MatrixXcd, 4> Q;
  for (auto& q : Q) q = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& term : terms) add_term(Q[static_cast<std::size_t>(term.component)], term, plan);
  for (auto& q : Q) mirror_upper(q);

  const cd I(0.0, 1.0);
  HermitianMatrix M;
  M.h = plan.h;
  M.plan = plan;
  M.m.resize(2 * n, 2 * n);
  M.m.topLeftCorner(n, n) = Q[0] + Q[3];
  M.m.bottomRightCorner(n, n) = Q[0] - Q[3];
  M.m.topRightCorner(n, n) = Q[1] - I * Q[2];
  M.m.bottomLeftCorner(n, n) = M.m.topRightCorner(n, n).adjoint();
  return M;
}

double boundary_mass(const Eigen::Ref<const Eigen::VectorXcd>& v, std::size_t N) {
  const std::size_t edge = std::max<std::size_t>(1, N / 20);
  double total = 0.0;
  double outer = 0.0;
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t j = 0; j < N; ++j) {
      const double w = std::norm(v(static_cast<Eigen::Index>(s * N + j)));
      total += w;
      if (j < edge || j >= N - edge) outer += w;
    }
  return total > 0.0 ? outer / total : 0.0;
}

EigenPairs eigenpairs(const HermitianMatrix& M, std::optional<std::array<double, 2>> window) {
  auto s = solve(M, window, true);
  return {std::move(s.values), std::move(s.vectors)};
}

EigenResult eigenvalues(const HermitianMatrix& M, const EigenOptions& opts) {
  EigenResult out;
  if (opts.decay == DecayPolicy::Off) {
    out.values = solve(M, opts.window, false).values;
    return out;
  }
  const auto s = solve(M, opts.window, true);
  const std::size_t N = M.plan.N;
  const double cluster_tol = 1e-9 * std::max(1.0, M.m.cwiseAbs().maxCoeff());

  // Within a degenerate cluster only the eigenspace is determined; rotate it
  // to the basis that diagonalizes the boundary mass.
  std::vector<double> mass(s.values.size());
  std::vector<bool> partner(s.values.size(), false);
  for (std::size_t k0 = 0; k0 < s.values.size();) {
    std::size_t k1 = k0 + 1;
    while (k1 < s.values.size() && s.values[k1] - s.values[k1 - 1] < cluster_tol) ++k1;
    if (k1 - k0 == 1) {
      mass[k0] = boundary_mass(s.vectors.col(static_cast<Eigen::Index>(k0)), N);
    } else {
      const auto width = static_cast<Eigen::Index>(k1 - k0);
      Eigen::MatrixXcd V = s.vectors.middleCols(static_cast<Eigen::Index>(k0), width);
      const std::size_t edge = std::max<std::size_t>(1, N / 20);
      for (std::size_t sp = 0; sp < 2; ++sp)
        for (std::size_t j = edge; j < N - edge; ++j) V.row(static_cast<Eigen::Index>(sp * N + j)).setZero();
      const Eigen::MatrixXcd B = V.adjoint() * V;
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(B);
      for (Eigen::Index q = 0; q < width; ++q) {
        mass[k0 + static_cast<std::size_t>(q)] = std::max(0.0, es.eigenvalues()(q));
        partner[k0 + static_cast<std::size_t>(q)] = q > 0 && es.eigenvalues()(0) <= opts.decay_tol;
      }
    }
    k0 = k1;
  }

  for (std::size_t k = 0; k < s.values.size(); ++k) {
    if (mass[k] > opts.decay_tol) {
      // Mostly boundary weight, or an extra state degenerate with a decaying
      // one: created by the periodization seam, not an under-resolved
      // eigenfunction.
      if (opts.decay == DecayPolicy::Reject && mass[k] <= 0.5 && !partner[k])
        throw Error(ErrorKind::PlanTooSmall,
                    "eigenvector at E = " + csv_number(s.values[k]) + " has boundary mass " +
                        csv_number(mass[k]));
      ++out.filtered;
      continue;
    }
    out.values.push_back(s.values[k]);
    out.boundary_mass.push_back(mass[k]);
  }
  return out;
}

std::vector<double> smallest_abs(std::vector<double> values, std::size_t count) {
  std::stable_sort(values.begin(), values.end(),
                   [](double a, double b) { return std::abs(a) < std::abs(b); });
  if (values.size() > count) values.resize(count);
  std::sort(values.begin(), values.end());
  return values;
}

std::vector<double> BandTable::variation() const {
  std::vector<double> out;
  if (rows.empty()) return out;
  std::size_t cols = rows.front().size();
  for (const auto& r : rows) cols = std::min(cols, r.size());
  for (std::size_t c = 0; c < cols; ++c) {
    double lo = rows.front()[c];
    double hi = lo;
    for (const auto& r : rows) {
      lo = std::min(lo, r[c]);
      hi = std::max(hi, r[c]);
    }
    out.push_back(hi - lo);
  }
  return out;
}

DecayPolicy default_decay(const PauliSymbol& sym, const QuantPlan& plan, bool windowed) {
  if (sym.domain.periodic_xi()) return DecayPolicy::Off;
  if (plan.basis == QuantPlan::Basis::FourierLine && windowed) return DecayPolicy::Reject;
  return DecayPolicy::Filter;
}

BandTable tm_bands(TmVariant variant, double h, const QuantPlan& plan,
                   const std::vector<double>& kx_grid, std::size_t count) {
  if (plan.basis != QuantPlan::Basis::FourierTorus)
    throw Error(ErrorKind::ConfigError, "band tables need a torus plan");
  const PauliSymbol sym =
      make_preset(variant == TmVariant::Low ? "timmel_mele_low" : "timmel_mele_tb");
  std::vector<double> grid = variant == TmVariant::Low ? kx_grid : std::vector<double>{0.0};
  if (grid.empty()) grid.push_back(0.0);

  BandTable table;
  table.kx = grid;
  table.rows.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    QuantPlan p = plan;
    p.h = h;
    p.kx = grid[i];
    const auto M = quantize(sym, p);
    EigenOptions opts;
    opts.decay = default_decay(sym, p, false);
    table.rows[i] = smallest_abs(eigenvalues(M, opts).values, count);
  }
  return table;
}

std::string eigenvalue_csv(const std::vector<double>& values) {
  std::string out = csv_row({"index", "value"});
  for (std::size_t k = 0; k < values.size(); ++k)
    out += csv_row({std::to_string(k), csv_number(values[k])});
  return out;
}

std::string band_csv(const BandTable& table) {
  std::size_t cols = 0;
  for (const auto& r : table.rows) cols = std::max(cols, r.size());
  std::vector<std::string> head{"kx"};
  for (std::size_t c = 0; c < cols; ++c) head.push_back("E" + std::to_string(c + 1));
  std::string out = csv_row(head);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    std::vector<std::string> cells{csv_number(table.kx[i])};
    for (std::size_t c = 0; c < cols; ++c)
      cells.push_back(c < table.rows[i].size() ? csv_number(table.rows[i][c]) : "nan");
    out += csv_row(cells);
  }
  return out;
}

}  // namespace bsq
