#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bsq/bs.hpp"
#include "bsq/error.hpp"
#include "bsq/presets.hpp"

using namespace bsq;

constexpr double pi = std::numbers::pi;

TEST_CASE("bs: Dirac levels") {
  const auto dirac = make_preset("simple_dirac");
  auto a = build_action(dirac, Branch::Plus, {0.1, 1.0}, 0.01, 0);
  for (double E : {0.1, 0.37, 0.8, 1.0}) CHECK(a.S0(E) == doctest::Approx(pi * E * E).epsilon(1e-6));
  const auto t0 = predict_spectrum(a, 0.01);
  a.order = 1;
  const auto t1 = predict_spectrum(a, 0.01);
  REQUIRE(t0.rows.size() == t1.rows.size());
  for (std::size_t i = 0; i < t0.rows.size(); ++i) {
    const auto& r = t0.rows[i];
    CHECK(r.E == doctest::Approx(std::sqrt(2 * r.k * 0.01)).epsilon(1e-9));
    CHECK(std::abs(t1.rows[i].E - r.E) < 1e-6);
    CHECK(std::abs(a.S_eff(t1.rows[i].E, 0.01) - 2 * pi * t1.rows[i].k * 0.01) <
          1e-10 * std::max(1.0, 2 * pi * std::abs(t1.rows[i].k) * 0.01));
  }
  CHECK(t0.rows.front().k == 1);
  CHECK(t0.rows.back().k >= 49);
}

// For the Dirac well the ratio is 1 - 1/(4k) + O(k^-2), inside 2% from k = 13.
TEST_CASE("bs: level spacing follows the period") {
  const auto dirac = make_preset("simple_dirac");
  const auto a = build_action(dirac, Branch::Plus, {0.1, 1.5}, 0.01, 1);
  const auto rows = predict_spectrum(a, 0.01).rows;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    if (rows[i].k < 13) continue;
    const double ratio = (rows[i + 1].E - rows[i].E) * a.T(rows[i].E) / (2 * pi * 0.01);
    CHECK(std::abs(ratio - 1.0) < 0.02);
  }
}

TEST_CASE("bs: barrier rule mirrors the well rule") {
  for (const char* name : {"simple_dirac", "rw_example"}) {
    const auto sym = make_preset(name);
    const auto well = build_action(sym, Branch::Plus, {0.2, 1.0}, 0.02, 1);
    const auto bar = build_action(negated(sym), Branch::Minus, {-1.0, -0.2}, 0.02, 1);
    CHECK(bar.region == Region::Barrier);
    const auto w = predict_spectrum(well, 0.02).rows;
    const auto b = predict_spectrum(bar, 0.02).rows;
    REQUIRE(w.size() == b.size());
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::abs(b[b.size() - 1 - i].E + w[i].E) < 1e-8);
  }
}

TEST_CASE("bs: non-planar S1 varies with the energy") {
  const auto rw = make_preset("rw_example");
  const auto a = build_action(rw, Branch::Plus, {0.5, 2.0}, 0.01, 1);
  CHECK(std::abs(a.S1(0.6) - a.S1(1.9)) > 0.1);
  double prev = a.S1(0.5);
  for (double E = 0.55; E <= 2.0; E += 0.05) {
    CHECK(std::abs(a.S1(E) - prev) < 0.1);
    prev = a.S1(E);
  }
}

TEST_CASE("bs: tight-binding barrier levels sit at odd multiples") {
  const auto tb = make_preset("timmel_mele_tb");
  const double h = 0.05;
  const auto a = build_action(tb, Branch::Minus, {-0.4, 0.4}, h, 1);
  CHECK(a.region == Region::Barrier);
  const auto rows = predict_spectrum(a, h).rows;
  CHECK_FALSE(rows.empty());
  for (const auto& r : rows) {
    const double m = std::abs(a.S0(r.E)) / (pi * h);
    CHECK(std::abs(m - std::round(m)) < 1e-6);
    CHECK(static_cast<long>(std::round(m)) % 2 == 1);
  }
}

TEST_CASE("bs: errors") {
  try {
    build_action(make_preset("jackiw_rebbi"), Branch::Plus, {1.5, 2.0}, 0.1, 1);
    FAIL("no closed curve");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SeedNotFound);
  }
}

TEST_CASE("bs: csv") {
  const auto a = build_action(make_preset("simple_dirac"), Branch::Plus, {0.1, 0.5}, 0.1, 1);
  const auto csv = spectrum_csv(predict_spectrum(a, 0.1));
  CHECK(csv.rfind("k,E_pred,order,residual\n", 0) == 0);
}
