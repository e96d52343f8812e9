// Acceptance suite: one PASS/FAIL line per criterion.
//
//   bsq_acceptance [--known-failures 2,4] [--only 1,3]
//
// The exit status is nonzero when a criterion outside --known-failures fails
// or when a known failure unexpectedly passes.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bsq/bs.hpp"
#include "bsq/compare.hpp"
#include "bsq/error.hpp"
#include "bsq/oracle.hpp"
#include "bsq/phases.hpp"
#include "bsq/presets.hpp"
#include "../support/oracles.hpp"

using namespace bsq;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<double> positive_sorted(std::vector<double> v) {
  std::erase_if(v, [](double e) { return !(e > 0.0); });
  std::sort(v.begin(), v.end());
  return v;
}

// 1. Simple Dirac levels sqrt(2 k h).
Outcome simple_dirac_exactness() {
  constexpr double kBsTol = 1e-5;
  constexpr double kOracleTol = 1e-7;
  constexpr double kConverged = 1e-9;
  const auto sym = make_preset("simple_dirac");
  const auto action = build_action(sym, Branch::Plus, {0.05, 1.5}, 0.01, 1);
  struct Case {
    double h;
    QuantPlan plan;
    std::array<double, 2> window;
  };
  const Case cases[] = {{0.1, QuantPlan::line(8, 256, 0.1), {-0.01, 2.1}},
                        {0.01, QuantPlan::line(2, 256, 0.01), {-0.001, 0.5}}};
  Outcome o{true, ""};
  for (const auto& c : cases) {
    const auto rows = predict_spectrum(action, c.h).rows;
    double bs_err = 0.0;
    for (long k = 1; k <= 10; ++k) {
      auto it = std::find_if(rows.begin(), rows.end(), [&](const auto& r) { return r.k == k; });
      bs_err = it == rows.end() ? INFINITY : std::max(bs_err, std::abs(it->E - std::sqrt(2.0 * k * c.h)));
    }
    const EigenOptions opts{c.window, DecayPolicy::Reject};
    // The zero mode sits at |E| ~ 1e-15 with either sign.
    auto excited = [](std::vector<double> v) {
      std::erase_if(v, [](double e) { return e < 1e-8; });
      return v;
    };
    const auto ev = excited(eigenvalues(quantize(sym, c.plan), opts).values);
    QuantPlan fine = c.plan;
    fine.N *= 2;
    const auto ev2 = excited(eigenvalues(quantize(sym, fine), opts).values);
    double or_err = ev.size() >= 10 ? 0.0 : INFINITY;
    double refine = 0.0;
    for (std::size_t k = 1; k <= 10 && k <= ev.size(); ++k) {
      or_err = std::max(or_err, std::abs(ev[k - 1] - std::sqrt(2.0 * k * c.h)));
      if (k <= ev2.size()) refine = std::max(refine, std::abs(ev[k - 1] - ev2[k - 1]));
    }
    o.pass = o.pass && bs_err < kBsTol && or_err < kOracleTol && refine < kConverged;
    o.detail += fmt("h=%g bs=%.1e oracle=%.1e refine=%.1e; ", c.h, bs_err, or_err, refine);
  }
  return o;
}

// 2. Jackiw-Rebbi, 35 smallest |E| at h = 0.1 and 0.01.
Outcome jackiw_rebbi_pairing() {
  constexpr std::size_t kCount = 35;
  constexpr double kC = 1.0;
  constexpr double kMinRatio = 50.0;
  const auto sym = make_preset("jackiw_rebbi");
  GridOptions grid;
  grid.include_extremum = true;
  const auto plus = build_action(sym, Branch::Plus, {0.0, 0.998}, 0.01, 1, grid);
  const auto minus = build_action(sym, Branch::Minus, {-0.998, 0.0}, 0.01, 1, grid);
  double err[2] = {0, 0};
  std::size_t matched[2] = {0, 0};
  std::size_t available[2] = {0, 0};
  const std::pair<double, QuantPlan> cases[] = {{0.1, QuantPlan::line(16, 256, 0.1)},
                                                {0.01, QuantPlan::line(3, 512, 0.01)}};
  for (int i = 0; i < 2; ++i) {
    const double h = cases[i].first;
    auto preds = predict_spectrum(plus, h).rows;
    const auto m = predict_spectrum(minus, h).rows;
    preds.insert(preds.end(), m.begin(), m.end());
    const auto ev = eigenvalues(quantize(sym, cases[i].second), {std::nullopt, DecayPolicy::Filter});
    const auto values = smallest_abs(ev.values, kCount);
    const auto table = compare(values, preds, preds, h);
    available[i] = values.size();
    matched[i] = table.matched_count();
    err[i] = table.max_error(1);
  }
  const double ratio = err[0] / err[1];
  Outcome o;
  o.pass = matched[0] == kCount && matched[1] == kCount && err[0] < kC * 0.01 &&
           err[1] < kC * 1e-4 && ratio >= kMinRatio;
  o.detail = fmt("h=0.1: %zu decaying, %zu/35 matched, err=%.2e; h=0.01: %zu/35 matched, "
                 "err=%.2e; ratio=%.2f (need >= 50)",
                 available[0], matched[0], err[0], matched[1], err[1], ratio);
  return o;
}

// 3. Curve integrals against the one-dimensional reductions.
Outcome rw_phase_quadrature() {
  constexpr double kTol = 1e-4;
  const auto sym = make_preset("rw_example");
  double worst = 0.0;
  std::string detail;
  for (double E : {0.5, 1.0, 1.5}) {
    const auto curve = trace(sym, Branch::Plus, E);
    const double rw = rw_phase(sym, Branch::Plus, curve).value;
    const double b = berry_phase(sym, Branch::Plus, curve).value;
    const double drw = std::abs(rw - oracle::rw_example_theta_rw(E));
    const double db = std::abs(b - oracle::rw_example_theta_b(E));
    worst = std::max({worst, drw, db});
    detail += fmt("E=%g dRW=%.1e dB=%.1e; ", E, drw, db);
  }
  return {worst < kTol, detail};
}

// 4. Order-1 improvement for the non-planar example.
Outcome rw_example_improvement() {
  constexpr double kOrder1Tol = 5e-4;
  const double h = 0.01;
  const auto sym = make_preset("rw_example");
  const auto ev = positive_sorted(
      eigenvalues(quantize(sym, QuantPlan::line(3, 512, h)), {std::array{0.0, 0.72}, DecayPolicy::Reject})
          .values);
  const std::vector<double> ranked(ev.begin(), ev.begin() + std::min<std::size_t>(14, ev.size()));

  auto errors = [&](double weight) {
    GridOptions grid;
    grid.phases.rw_norm_weight = weight;
    auto a = build_action(sym, Branch::Plus, {0.02, 0.75}, h, 1, grid);
    const auto p1 = predict_spectrum(a, h).rows;
    a.order = 0;
    const auto p0 = predict_spectrum(a, h).rows;
    const auto table = compare(ranked, p0, p1, h);
    double e0 = 0.0, e1 = 0.0;
    for (std::size_t r = 4; r < table.rows.size() && r < 14; ++r) {
      const auto& row = table.rows[r];
      e0 = std::max(e0, row.matched ? row.delta0 : INFINITY);
      e1 = std::max(e1, row.matched ? row.delta1 : INFINITY);
    }
    return std::pair{e0, e1};
  };
  const auto [e0, e1] = errors(3.0);
  const auto [d0, d1] = errors(2.0);
  Outcome o;
  o.pass = ranked.size() == 14 && e1 < e0 && e1 < kOrder1Tol;
  o.detail = fmt("ranks 5..14: order0=%.2e order1=%.2e (need < %.0e); "
                 "with |P| weight 2 in theta_RW: order1=%.2e",
                 e0, e1, kOrder1Tol, d1);
  (void)d0;
  return o;
}

// 5. Winding numbers and vanishing theta_RW on planar presets.
Outcome windings() {
  constexpr double kResidual = 0.05;
  constexpr double kRw = 1e-6;
  struct Case {
    const char* preset;
    Branch b;
    double E;
    int expect;
  };
  const Case cases[] = {{"jackiw_rebbi", Branch::Minus, -0.5, -1},
                        {"timmel_mele_low", Branch::Minus, 0.0, -1},
                        {"timmel_mele_tb", Branch::Minus, 0.0, 0}};
  Outcome o{true, ""};
  for (const auto& c : cases) {
    const auto sym = make_preset(c.preset);
    const auto curve = trace(sym, c.b, c.E);
    const auto w = winding(sym, curve);
    const double rw = rw_phase(sym, c.b, curve).value;
    o.pass = o.pass && w.value == c.expect && w.residual < kResidual && std::abs(rw) < kRw;
    o.detail += fmt("%s wind=%d res=%.1e rw=%.1e; ", c.preset, w.value, w.residual, rw);
  }
  return o;
}

// 6. Timmel-Mele offsets: h^2 trend of the errors between h = 0.02 and 0.01.
Outcome tm_offsets() {
  constexpr double kMinRatio = 3.0;
  Outcome o{true, ""};
  {
    const auto sym = make_preset("timmel_mele_low");
    const std::array<double, 2> win{-0.1, 0.1};
    const auto a = build_action(sym, Branch::Minus, win, 0.01, 1);
    double err[2];
    std::size_t n[2];
    int i = 0;
    for (double h : {0.02, 0.01}) {
      auto a1 = a;
      auto a0 = a;
      a0.order = 0;
      const auto ev =
          eigenvalues(quantize(sym, QuantPlan::torus(256, h)), {win, DecayPolicy::Filter}).values;
      const auto t = compare(ev, predict_spectrum(a0, h).rows, predict_spectrum(a1, h).rows, h);
      err[i] = t.max_error(1);
      n[i++] = t.matched_count();
    }
    const double ratio = err[0] / err[1];
    o.pass = n[0] > 0 && n[1] > 0 && ratio >= kMinRatio;
    o.detail += fmt("low: err(0.02)=%.2e [%zu] err(0.01)=%.2e [%zu] ratio=%.2f; ", err[0], n[0],
                    err[1], n[1], ratio);
  }
  {
    // Each level of the tight-binding curve is a cluster of copies, one per
    // period in xi, so the error is taken from each predicted level to the
    // nearest eigenvalue without a decay filter.
    const auto sym = make_preset("timmel_mele_tb");
    const std::array<double, 2> win{-0.4, 0.4};
    const auto a = build_action(sym, Branch::Minus, win, 0.01, 1);
    double err[2];
    std::size_t n[2];
    int i = 0;
    for (double h : {0.02, 0.01}) {
      const auto ev =
          eigenvalues(quantize(sym, QuantPlan::torus(256, h)), {std::array{-0.5, 0.5}, DecayPolicy::Off})
              .values;
      const auto rows = predict_spectrum(a, h).rows;
      double e = rows.empty() ? INFINITY : 0.0;
      for (const auto& r : rows) {
        double best = INFINITY;
        for (double v : ev) best = std::min(best, std::abs(v - r.E));
        e = std::max(e, best);
      }
      err[i] = e;
      n[i++] = rows.size();
    }
    const double ratio = err[0] / err[1];
    o.pass = o.pass && ratio >= kMinRatio;
    o.detail += fmt("tb: err(0.02)=%.2e [%zu] err(0.01)=%.2e [%zu] ratio=%.2f", err[0], n[0],
                    err[1], n[1], ratio);
  }
  return o;
}

// 7. Randomized gauge changes exp(i eta) of the eigenvector.
Outcome gauge_suite() {
  constexpr int kTrials = 20;
  constexpr double kBerryTol = 1e-4;
  constexpr double kRwTol = 1e-6;
  const auto sym = make_preset("rw_example");
  const auto curve = trace(sym, Branch::Plus, 1.0);
  const double theta_b = berry_phase(sym, Branch::Plus, curve).value;
  const double theta_rw = rw_phase(sym, Branch::Plus, curve).value;
  std::mt19937 rng(20240611);
  std::uniform_real_distribution<double> amp(-2.0, 2.0), freq(0.5, 2.0), shift(0.0, 2 * std::numbers::pi);
  std::uniform_int_distribution<int> turns(-2, 2);
  double worst_b = 0.0;
  double worst_rw = 0.0;
  for (int t = 0; t < kTrials; ++t) {
    const double a = amp(rng), f1 = freq(rng), c1 = shift(rng), f2 = freq(rng), c2 = shift(rng);
    const int m = turns(rng);
    const oracle::Gauge eta = [=](double x, double xi) {
      return a * std::sin(f1 * x + c1) * std::cos(f2 * xi + c2) + m * std::atan2(xi, x);
    };
    const auto raw = oracle::raw_phases(sym, Branch::Plus, curve, eta);
    worst_b = std::max(worst_b, oracle::dist_2pi(raw.theta_B - theta_b));
    worst_rw = std::max(worst_rw, std::abs(raw.theta_RW - theta_rw));
  }
  return {worst_b < kBerryTol && worst_rw < kRwTol,
          fmt("%d trials: theta_B off 2piZ by %.1e, theta_RW shift %.1e", kTrials, worst_b, worst_rw)};
}

// 8. Structural invariants on every preset.
Outcome structural() {
  constexpr double kArea = 1e-5;
  constexpr double kPeriod = 1e-3;
  constexpr double kHerm = 1e-12;
  constexpr double kEigvec = 1e-9;
  constexpr double kNegation = 1e-8;
  struct Case {
    const char* preset;
    Branch b;
    double E;
    Point center;
    std::array<double, 2> window;
    double h;
    std::optional<QuantPlan> plan;
    std::array<double, 4> box;  // x0, x1, xi0, xi1 for random points
  };
  const Case cases[] = {
      {"simple_dirac", Branch::Plus, 1.0, {0, 0}, {0.3, 1.2}, 0.1, QuantPlan::line(8, 256, 0.1), {-2, 2, -2, 2}},
      {"jackiw_rebbi", Branch::Plus, 0.5, {0, 0}, {0.3, 0.9}, 0.05, QuantPlan::line(8, 256, 0.1), {-2, 2, -2, 2}},
      {"jackiw_rebbi", Branch::Minus, -0.5, {0, 0}, {-0.9, -0.3}, 0.05, std::nullopt, {-2, 2, -2, 2}},
      {"rw_example", Branch::Plus, 1.0, {0, 0}, {0.3, 1.2}, 0.05, QuantPlan::line(6, 256, 0.05), {-2, 2, -2, 2}},
      {"timmel_mele_low", Branch::Minus, 0.0, {0.5, 0}, {-0.1, 0.1}, 0.02, QuantPlan::torus(256, 0.05), {0, 1, -2, 2}},
      {"timmel_mele_tb", Branch::Minus, 0.0, {0.5, 0.5}, {-0.3, 0.3}, 0.02, QuantPlan::torus(256, 0.05), {0, 1, 0, 1}},
      {"radial_dirac", Branch::Plus, 2.0, {1, 0}, {1.6, 2.5}, 0.1, QuantPlan::line(8, 256, 0.1), {0.1, 3, -2, 2}},
  };
  double w_area = 0, w_period = 0, w_herm = 0, w_vec = 0, w_neg = 0;
  std::string skipped;
  std::mt19937 rng(7);
  for (const auto& c : cases) {
    const auto sym = make_preset(c.preset);
    const auto curve = trace(sym, c.b, c.E);
    const double S0 = action_S0(curve).value;
    const double area = oracle::polar_area(sym, c.b, c.E, c.center);
    const double sign = curve.region == Region::Well ? 1.0 : -1.0;
    w_area = std::max(w_area, std::abs(S0 - sign * area) / area);

    const double dE = 1e-4;
    const double dS0 = (action_S0(trace(sym, c.b, c.E + dE)).value -
                        action_S0(trace(sym, c.b, c.E - dE)).value) / (2 * dE);
    w_period = std::max(w_period, std::abs(dS0 - curve.period_T) / std::abs(curve.period_T));

    if (c.plan) {
      try {
        w_herm = std::max(w_herm, quantize(sym, *c.plan).hermiticity_residual());
      } catch (const Error& e) {
        skipped += fmt("%s matrix: %s; ", c.preset, std::string(e.name()).c_str());
      }
    }

    std::uniform_real_distribution<double> ux(c.box[0], c.box[1]), uxi(c.box[2], c.box[3]);
    for (int n = 0; n < 1000;) {
      const double x = ux(rng), xi = uxi(rng);
      const auto j = jet(sym, x, xi);
      const double nP = j.norm_P();
      if (nP < 1e-6 || j.p[1] * j.p[1] + j.p[2] * j.p[2] < 1e-12 * nP * nP) continue;
      ++n;
      const auto H = pauli_matrix(j.p[0], j.p[1], j.p[2], j.p[3]);
      for (Branch b : {Branch::Plus, Branch::Minus}) {
        const auto u = eigenvector(sym, b, x, xi);
        w_vec = std::max(w_vec, (H * u - eigenvalue(sym, b, x, xi) * u).norm());
      }
    }

    // Both grids interpolate S_eff well below the comparison tolerance.
    GridOptions fine;
    fine.tol = 1e-10;
    const auto a = predict_spectrum(build_action(sym, c.b, c.window, c.h, 1, fine), c.h).rows;
    const Branch nb = c.b == Branch::Plus ? Branch::Minus : Branch::Plus;
    const auto n = predict_spectrum(
        build_action(negated(sym), nb, {-c.window[1], -c.window[0]}, c.h, 1, fine), c.h).rows;
    if (a.size() != n.size() || a.empty()) {
      w_neg = INFINITY;
    } else {
      for (std::size_t i = 0; i < a.size(); ++i)
        w_neg = std::max(w_neg, std::abs(a[i].E + n[a.size() - 1 - i].E));
    }
  }
  Outcome o;
  o.pass = w_area < kArea && w_period < kPeriod && w_herm < kHerm && w_vec < kEigvec && w_neg < kNegation;
  o.detail = fmt("area=%.1e dS0/dE=%.1e herm=%.1e eigvec=%.1e negation=%.1e", w_area, w_period, w_herm,
                 w_vec, w_neg);
  if (!skipped.empty()) o.detail += "; not quantizable: " + skipped;
  return o;
}

// 9. Flat bands of the low-energy model over kx.
Outcome flat_bands() {
  constexpr double kFlat = 1e-5;
  constexpr double kFactor = 10.0;
  constexpr std::array<double, 2> kNearZero{-0.3, 0.3};
  std::vector<double> kx;
  for (int j = 0; j < 8; ++j) kx.push_back(2 * std::numbers::pi * j / 8);
  const auto sym = make_preset("timmel_mele_low");

  // Bands generated by the curve: the columns nearest the BS levels.
  const double h = 0.05;
  const auto table = tm_bands(TmVariant::Low, h, QuantPlan::torus(256, h), kx, 8);
  const auto var = table.variation();
  const auto levels = predict_spectrum(build_action(sym, Branch::Minus, kNearZero, h, 1), h).rows;
  double flat = levels.empty() ? INFINITY : 0.0;
  for (const auto& r : levels) {
    const auto& row0 = table.rows.front();
    std::size_t best = 0;
    for (std::size_t i = 1; i < row0.size(); ++i)
      if (std::abs(row0[i] - r.E) < std::abs(row0[best] - r.E)) best = i;
    flat = std::max(flat, var[best]);
  }

  const double H = 0.5;
  const auto coarse = tm_bands(TmVariant::Low, H, QuantPlan::torus(256, H), kx, 8);
  const auto cvar = coarse.variation();
  std::size_t nearest = 0;
  for (std::size_t i = 1; i < coarse.rows.front().size(); ++i)
    if (std::abs(coarse.rows.front()[i]) < std::abs(coarse.rows.front()[nearest])) nearest = i;
  const double steep = cvar[nearest];

  Outcome o;
  o.pass = flat < kFlat && steep >= kFactor * std::max(flat, kFlat);
  o.detail = fmt("h=0.05: %zu curve bands, variation %.2e; h=0.5: variation %.2e", levels.size(), flat,
                 steep);
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double max_seconds;
  std::function<Outcome()> run;
};

std::set<int> parse_ids(const std::string& text) {
  std::set<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.insert(std::stoi(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> known;
  std::set<int> only;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--known-failures") known = parse_ids(argv[i + 1]);
    else if (flag == "--only") only = parse_ids(argv[i + 1]);
  }

  const std::vector<Criterion> criteria{
      {1, "simple Dirac exactness", 10, simple_dirac_exactness},
      {2, "Jackiw-Rebbi pairing and h^2 ratio", 60, jackiw_rebbi_pairing},
      {3, "non-planar phase quadrature", 5, rw_phase_quadrature},
      {4, "non-planar order-1 improvement", 60, rw_example_improvement},
      {5, "winding quantization", 10, windings},
      {6, "Timmel-Mele quantization offsets", 120, tm_offsets},
      {7, "gauge invariance", 60, gauge_suite},
      {8, "structural invariants", 120, structural},
      {9, "flat bands", 60, flat_bands},
  };

  int status = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    oracle::Stopwatch clock;
    Outcome o;
    try {
      o = c.run();
    } catch (const Error& e) {
      o = {false, fmt("%s: %s", std::string(e.name()).c_str(), e.what())};
    }
    const double secs = clock.seconds();
    const bool pass = o.pass && secs < c.max_seconds;
    std::printf("CRITERION %d %s %s | %s | %.1fs (limit %.0fs)\n", c.id, pass ? "PASS" : "FAIL", c.name,
                o.detail.c_str(), secs, c.max_seconds);
    std::fflush(stdout);
    if (pass == static_cast<bool>(known.count(c.id))) status = 1;
  }
  return status;
}
