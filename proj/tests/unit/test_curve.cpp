#include <doctest.h>

#include <cmath>
#include <numbers>

#include "../support/oracles.hpp"
#include "bsq/curve.hpp"
#include "bsq/error.hpp"
#include "bsq/presets.hpp"

using namespace bsq;

constexpr double pi = std::numbers::pi;

TEST_CASE("curve: seeds") {
  const auto dirac = make_preset("simple_dirac");
  auto p = find_seed(dirac, Branch::Plus, 1.0);
  CHECK(p.x == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(p.xi) < 1e-12);
  p = find_seed(make_preset("rw_example"), Branch::Plus, std::sqrt(2.0));
  CHECK(p.x == doctest::Approx(1.0).epsilon(1e-10));
  try {
    find_seed(make_preset("jackiw_rebbi"), Branch::Plus, 2.0);
    FAIL("open level set");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SeedNotFound);
  }
}

TEST_CASE("curve: Dirac circle") {
  const auto dirac = make_preset("simple_dirac");
  const auto c = trace(dirac, Branch::Plus, 1.0);
  CHECK(c.period_T == doctest::Approx(2 * pi).epsilon(1e-6));
  CHECK(c.region == Region::Well);
  CHECK(polygon_area(c) < 0.0);
  for (const auto& s : c.samples) CHECK(std::abs(std::hypot(s.x, s.xi) - 1.0) < 1e-10);
  CHECK(c.samples.front().t == 0.0);
  CHECK(c.samples.back().t == doctest::Approx(c.period_T));

  CHECK(integrate_dt(c, [](double, double) { return 1.0; }).value == doctest::Approx(c.period_T));
  const double b = integrate_dt(c, [&](double x, double xi) {
                     return f1_terms(dirac, Branch::Plus, x, xi).mu1_dprime;
                   }).value;
  CHECK(std::abs(b - pi) < 1e-4);
  CHECK(std::abs(integrate_dt(c, [](double x, double xi) { return x * x * x * (1 + xi * xi); }).value) < 1e-12);
}

TEST_CASE("curve: action") {
  const auto dirac = make_preset("simple_dirac");
  for (double E : {0.05, 0.5, 1.3}) {
    const auto c = trace(dirac, Branch::Plus, E);
    CHECK(action_S0(c).value == doctest::Approx(pi * E * E).epsilon(1e-9));
  }
  const auto rw = make_preset("rw_example");
  const auto c = trace(rw, Branch::Plus, 1.0);
  CHECK(action_S0(c).value == doctest::Approx(oracle::polar_area(rw, Branch::Plus, 1.0, {})).epsilon(1e-5));
  const double d = 1e-4;
  const double dS = (action_S0(trace(rw, Branch::Plus, 1 + d)).value -
                     action_S0(trace(rw, Branch::Plus, 1 - d)).value) / (2 * d);
  CHECK(dS == doctest::Approx(c.period_T).epsilon(1e-3));
}

TEST_CASE("curve: Jackiw-Rebbi turning points") {
  const auto c = trace(make_preset("jackiw_rebbi"), Branch::Plus, 0.5);
  double lo = 0;
  double hi = 0;
  for (const auto& s : c.samples) {
    lo = std::min(lo, s.x);
    hi = std::max(hi, s.x);
  }
  CHECK(hi == doctest::Approx(std::atanh(0.5)).epsilon(1e-4));
  CHECK(lo == doctest::Approx(-std::atanh(0.5)).epsilon(1e-4));
}

TEST_CASE("curve: barriers") {
  const auto tm = make_preset("timmel_mele_tb");
  const auto c = trace(tm, Branch::Minus, 0.0);
  CHECK(c.region == Region::Barrier);
  CHECK(polygon_area(c) > 0.0);
  const auto n = trace(negated(make_preset("simple_dirac")), Branch::Minus, -1.0);
  CHECK(n.region == Region::Barrier);
  CHECK(classify(negated(make_preset("simple_dirac")), n) == Region::Barrier);
}

TEST_CASE("curve: refinement") {
  const auto rw = make_preset("rw_example");
  const auto a = trace(rw, Branch::Plus, 1.0);
  TraceOptions o;
  o.ds = a.ds / 2;
  const auto b = trace(rw, Branch::Plus, 1.0, o);
  const auto Sa = action_S0(a);
  CHECK(std::abs(action_S0(b).value - Sa.value) <= std::max(4 * Sa.error, 1e-12));
  CHECK(std::abs(b.period_T - a.period_T) < 1e-9);
}

TEST_CASE("curve: csv") {
  const auto c = trace(make_preset("simple_dirac"), Branch::Plus, 1.0);
  const auto csv = curve_csv(c);
  CHECK(csv.find("\nt,x,xi\n") != std::string::npos);
  CHECK(csv == curve_csv(trace(make_preset("simple_dirac"), Branch::Plus, 1.0)));
}
