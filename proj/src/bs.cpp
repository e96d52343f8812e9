#include "bsq/bs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bsq/csv.hpp"
#include "bsq/error.hpp"

namespace bsq {

namespace {

double deriv3(double xe, double xa, double ya, double xb, double yb, double xc, double yc) {
  return ya * ((xe - xb) + (xe - xc)) / ((xa - xb) * (xa - xc)) +
         yb * ((xe - xa) + (xe - xc)) / ((xb - xa) * (xb - xc)) +
         yc * ((xe - xa) + (xe - xb)) / ((xc - xa) * (xc - xb));
}

struct Hermite {
  double t, dt;
  double value(double y0, double d0, double y1, double d1) const {
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * dt * d0 + (-2 * t3 + 3 * t2) * y1 +
           (t3 - t2) * dt * d1;
  }
  double slope(double y0, double d0, double y1, double d1) const {
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * y0 + (-6 * t2 + 6 * t) * y1) / dt + (3 * t2 - 4 * t + 1) * d0 +
           (3 * t2 - 2 * t) * d1;
  }
};

void fill_S1_slopes(std::vector<ActionNode>& nodes) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (!nodes[i].anchor) idx.push_back(i);
  const std::size_t m = idx.size();
  for (std::size_t j = 0; j < m; ++j) {
    ActionNode& nd = nodes[idx[j]];
    if (m == 1) {
      nd.dS1 = 0.0;
    } else if (m == 2) {
      const auto& a = nodes[idx[0]];
      const auto& b = nodes[idx[1]];
      nd.dS1 = (b.S1 - a.S1) / (b.E - a.E);
    } else {
      const std::size_t c = std::clamp<std::size_t>(j, 1, m - 2);
      const auto& a = nodes[idx[c - 1]];
      const auto& b = nodes[idx[c]];
      const auto& d = nodes[idx[c + 1]];
      nd.dS1 = deriv3(nd.E, a.E, a.S1, b.E, b.S1, d.E, d.S1);
    }
  }
}

ActionNode evaluate_node(const PauliSymbol& sym, Branch b, double E, const GridOptions& opts,
                         Region* region) {
  const LevelCurve c = trace(sym, b, E, opts.trace);
  const PhaseReport r = assemble(sym, b, c, opts.phases);
  if (region) *region = c.region;
  ActionNode n;
  n.E = E;
  n.S0 = r.S0;
  n.T = c.period_T;
  n.S1 = r.S1_raw;
  return n;
}

double sign_of(Region r) { return r == Region::Well ? 1.0 : -1.0; }

}  // namespace

std::size_t ActionFunction::interval(double E) const {
  if (nodes.size() < 2) throw Error(ErrorKind::NonMonotone, "action grid has fewer than two nodes");
  if (E <= nodes.front().E) return 0;
  if (E >= nodes.back().E) return nodes.size() - 2;
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), E,
                                   [](double e, const ActionNode& n) { return e < n.E; });
  return static_cast<std::size_t>(it - nodes.begin()) - 1;
}

double ActionFunction::S0(double E) const {
  const std::size_t i = interval(E);
  const ActionNode& a = nodes[i];
  const ActionNode& b = nodes[i + 1];
  if (a.anchor || b.anchor) {
    const ActionNode& anc = a.anchor ? a : b;
    const ActionNode& nb = a.anchor ? b : a;
    const double d = anc.E - nb.E;
    const double c = (anc.S0 - nb.S0 - nb.T * d) / (d * d);
    const double u = E - nb.E;
    return nb.S0 + nb.T * u + c * u * u;
  }
  const Hermite hm{(E - a.E) / (b.E - a.E), b.E - a.E};
  return hm.value(a.S0, a.T, b.S0, b.T);
}

double ActionFunction::T(double E) const {
  const std::size_t i = interval(E);
  const ActionNode& a = nodes[i];
  const ActionNode& b = nodes[i + 1];
  if (a.anchor || b.anchor) {
    const ActionNode& anc = a.anchor ? a : b;
    const ActionNode& nb = a.anchor ? b : a;
    const double d = anc.E - nb.E;
    const double c = (anc.S0 - nb.S0 - nb.T * d) / (d * d);
    return nb.T + 2.0 * c * (E - nb.E);
  }
  const Hermite hm{(E - a.E) / (b.E - a.E), b.E - a.E};
  return hm.slope(a.S0, a.T, b.S0, b.T);
}

double ActionFunction::S1(double E) const {
  const std::size_t i = interval(E);
  const ActionNode& a = nodes[i];
  const ActionNode& b = nodes[i + 1];
  if (a.anchor) return b.S1;
  if (b.anchor) return a.S1;
  const Hermite hm{(E - a.E) / (b.E - a.E), b.E - a.E};
  return hm.value(a.S1, a.dS1, b.S1, b.dS1);
}

double ActionFunction::S_eff(double E, double hh) const {
  return sign_of(region) * (order >= 1 ? S0(E) + hh * S1(E) : S0(E));
}

double ActionFunction::S_eff_slope(double E, double hh) const {
  const std::size_t i = interval(E);
  const ActionNode& a = nodes[i];
  const ActionNode& b = nodes[i + 1];
  double d1 = 0.0;
  if (order >= 1 && !a.anchor && !b.anchor) {
    const Hermite hm{(E - a.E) / (b.E - a.E), b.E - a.E};
    d1 = hm.slope(a.S1, a.dS1, b.S1, b.dS1);
  }
  return sign_of(region) * (T(E) + hh * d1);
}

Extremum find_extremum(const PauliSymbol& sym, Branch b, Region region, const TraceOptions& opts) {
  const double sgn = region == Region::Well ? 1.0 : -1.0;
  auto f = [&](const Point& p) {
    try {
      return sgn * eigenvalue(sym, b, p.x, p.xi);
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  Point start = opts.hint ? *opts.hint : (sym.hint ? *sym.hint : Point{});
  std::array<Point, 3> v{start, Point{start.x + 0.1, start.xi}, Point{start.x, start.xi + 0.1}};
  std::array<double, 3> fv{f(v[0]), f(v[1]), f(v[2])};
  for (int it = 0; it < 5000; ++it) {
    std::array<int, 3> ord{0, 1, 2};
    std::sort(ord.begin(), ord.end(), [&](int a, int c) { return fv[a] < fv[c]; });
    const Point best = v[ord[0]];
    const Point mid = v[ord[1]];
    const Point worst = v[ord[2]];
    const double size = std::max(std::hypot(mid.x - best.x, mid.xi - best.xi),
                                 std::hypot(worst.x - best.x, worst.xi - best.xi));
    if (size < 1e-15 * (1.0 + std::hypot(best.x, best.xi))) break;
    const Point cen{0.5 * (best.x + mid.x), 0.5 * (best.xi + mid.xi)};
    auto along = [&](double t) {
      return Point{cen.x + t * (worst.x - cen.x), cen.xi + t * (worst.xi - cen.xi)};
    };
    const Point r = along(-1.0);
    const double fr = f(r);
    if (fr < fv[ord[0]]) {
      const Point e = along(-2.0);
      const double fe = f(e);
      if (fe < fr) {
        v[ord[2]] = e;
        fv[ord[2]] = fe;
      } else {
        v[ord[2]] = r;
        fv[ord[2]] = fr;
      }
    } else if (fr < fv[ord[1]]) {
      v[ord[2]] = r;
      fv[ord[2]] = fr;
    } else {
      const Point cpt = fr < fv[ord[2]] ? along(-0.5) : along(0.5);
      const double fc = f(cpt);
      if (fc < std::min(fr, fv[ord[2]])) {
        v[ord[2]] = cpt;
        fv[ord[2]] = fc;
      } else {
        for (int k : {ord[1], ord[2]}) {
          v[static_cast<std::size_t>(k)] = {0.5 * (v[static_cast<std::size_t>(k)].x + best.x),
                                            0.5 * (v[static_cast<std::size_t>(k)].xi + best.xi)};
          fv[static_cast<std::size_t>(k)] = f(v[static_cast<std::size_t>(k)]);
        }
      }
    }
  }
  const auto k = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  return {v[k], sgn * fv[k]};
}

ActionFunction build_action(const PauliSymbol& sym, Branch b, std::array<double, 2> window,
                            double h, int order, const GridOptions& opts) {
  if (!(window[0] < window[1]))
    throw Error(ErrorKind::ConfigError, "energy window must satisfy a < b");
  if (order < 0 || order > 1) throw Error(ErrorKind::ConfigError, "order must be 0 or 1");
  ActionFunction af;
  af.branch = b;
  af.window = window;
  af.order = order;
  af.h = h;

  double lo = window[0];
  double hi = window[1];
  std::optional<ActionNode> anchor;
  if (opts.include_extremum) {
    Region region = Region::Well;
    evaluate_node(sym, b, 0.5 * (lo + hi), opts, &region);
    const Extremum ex = find_extremum(sym, b, region, opts.trace);
    const double span = hi - lo;
    ActionNode a;
    a.anchor = true;
    a.E = ex.value;
    if (region == Region::Well && lo <= ex.value + 1e-12 * span && ex.value < hi) {
      lo = ex.value + 1e-3 * (hi - ex.value);
      anchor = a;
    } else if (region == Region::Barrier && hi >= ex.value - 1e-12 * span && ex.value > lo) {
      hi = ex.value - 1e-3 * (ex.value - lo);
      anchor = a;
    }
  }

  Region region = Region::Well;
  std::vector<ActionNode> nodes;
  const std::size_t n0 = std::max<std::size_t>(opts.initial_points, 3);
  for (std::size_t i = 0; i < n0; ++i) {
    const double E = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n0 - 1);
    Region r = Region::Well;
    nodes.push_back(evaluate_node(sym, b, E, opts, &r));
    if (i == 0) region = r;
    if (r != region) {
      throw Error(ErrorKind::Inconsistent, "curves change between well and barrier inside the window");
    }
  }
  af.region = region;
  if (anchor) nodes.push_back(*anchor);
  auto by_E = [](const ActionNode& a, const ActionNode& c) { return a.E < c.E; };
  std::sort(nodes.begin(), nodes.end(), by_E);

  // Midpoint probes; an interval is split until its probe agrees.
  std::vector<std::pair<double, double>> open;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
    if (!nodes[i].anchor && !nodes[i + 1].anchor) open.emplace_back(nodes[i].E, nodes[i + 1].E);
  af.max_probe_error = 0.0;
  while (!open.empty()) {
    af.nodes = nodes;
    fill_S1_slopes(af.nodes);
    std::vector<std::pair<double, double>> next;
    std::vector<ActionNode> added;
    double worst = 0.0;
    for (const auto& [a, c] : open) {
      const double mid = 0.5 * (a + c);
      const ActionNode probe = evaluate_node(sym, b, mid, opts, nullptr);
      const double exact = sign_of(region) * (probe.S0 + (order >= 1 ? h * probe.S1 : 0.0));
      const double err = std::abs(af.S_eff(mid, h) - exact);
      const double allowed = opts.tol * std::max(1.0, std::abs(exact));
      if (err > allowed) {
        added.push_back(probe);
        next.emplace_back(a, mid);
        next.emplace_back(mid, c);
        worst = std::max(worst, err / std::max(1.0, std::abs(exact)));
      }
    }
    if (added.empty()) break;
    if (nodes.size() + added.size() > opts.max_points) {
      af.max_probe_error = worst;
      break;
    }
    nodes.insert(nodes.end(), added.begin(), added.end());
    std::sort(nodes.begin(), nodes.end(), by_E);
    open = std::move(next);
  }
  // One 2 pi branch of S1 for the whole grid, chosen so that the lowest
  // traced node lies in (-pi, pi]; this fixes the labels k.
  for (const auto& n : nodes) {
    if (n.anchor) continue;
    const double shift = reduce_angle(n.S1) - n.S1;
    for (auto& m : nodes) m.S1 += shift;
    break;
  }
  fill_S1_slopes(nodes);
  af.nodes = std::move(nodes);

  for (const auto& n : af.nodes) {
    if (!n.anchor && !(n.T > 0.0)) {
      throw Error(ErrorKind::NonMonotone,
                  "non-positive period at E=" + format_number(n.E) + ": S0 is not monotone");
    }
  }
  double dir = 0.0;
  for (std::size_t i = 0; i + 1 < af.nodes.size(); ++i) {
    const double d = af.S_eff(af.nodes[i + 1].E, h) - af.S_eff(af.nodes[i].E, h);
    if (d == 0.0 || (dir != 0.0 && (d > 0.0) != (dir > 0.0))) {
      throw Error(ErrorKind::NonMonotone, "S_eff is not strictly monotone near E=" +
                                              format_number(af.nodes[i].E));
    }
    dir = d;
  }
  return af;
}

SpectrumTable predict_spectrum(const ActionFunction& action, double h) {
  if (!(h > 0.0)) throw Error(ErrorKind::ConfigError, "h must be positive");
  SpectrumTable table;
  table.h = h;
  table.branch = action.branch;
  table.window = action.window;
  const auto& nodes = action.nodes;
  std::vector<double> S(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) S[i] = action.S_eff(nodes[i].E, h);
  for (std::size_t i = 0; i + 1 < S.size(); ++i) {
    if ((S[i + 1] - S[i]) * (S.back() - S.front()) <= 0.0)
      throw Error(ErrorKind::NonMonotone, "S_eff is not monotone on the grid");
  }
  const double step = 2.0 * M_PI * h;
  const double smin = std::min(S.front(), S.back());
  const double smax = std::max(S.front(), S.back());
  const long kmin = static_cast<long>(std::ceil(smin / step));
  const long kmax = static_cast<long>(std::floor(smax / step));
  const bool increasing = S.back() > S.front();
  for (long k = kmin; k <= kmax; ++k) {
    const double target = step * static_cast<double>(k);
    std::size_t i = 0;
    while (i + 2 < S.size() && (increasing ? S[i + 1] < target : S[i + 1] > target)) ++i;
    double a = nodes[i].E;
    double c = nodes[i + 1].E;
    auto g = [&](double E) { return action.S_eff(E, h) - target; };
    double ga = g(a);
    if (ga == 0.0) c = a;
    for (int it = 0; it < 200 && c - a > 0.0; ++it) {
      const double m = 0.5 * (a + c);
      if (m <= a || m >= c) break;
      const double gm = g(m);
      if (gm == 0.0) {
        a = c = m;
        break;
      }
      if ((gm > 0.0) == (ga > 0.0)) {
        a = m;
        ga = gm;
      } else {
        c = m;
      }
    }
    double E = std::abs(g(a)) <= std::abs(g(c)) ? a : c;
    for (int it = 0; it < 3; ++it) {
      const double slope = action.S_eff_slope(E, h);
      if (slope == 0.0) break;
      const double cand = E - g(E) / slope;
      if (std::abs(g(cand)) < std::abs(g(E))) E = cand;
      else break;
    }
    SpectrumRow row;
    row.k = k;
    row.E = E;
    row.order = action.order;
    row.residual = std::abs(g(E));
    table.rows.push_back(row);
  }
  std::sort(table.rows.begin(), table.rows.end(),
            [](const SpectrumRow& a, const SpectrumRow& c) { return a.E < c.E; });
  return table;
}

std::string spectrum_csv(const SpectrumTable& table) {
  std::string out = csv_row({"k", "E_pred", "order", "residual"});
  for (const auto& r : table.rows)
    out += csv_row({std::to_string(r.k), csv_number(r.E), std::to_string(r.order),
                    csv_number(r.residual)});
  return out;
}

}  // namespace bsq
