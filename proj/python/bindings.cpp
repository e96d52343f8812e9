#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bsq/bs.hpp"
#include "bsq/compare.hpp"
#include "bsq/curve.hpp"
#include "bsq/error.hpp"
#include "bsq/oracle.hpp"
#include "bsq/phases.hpp"
#include "bsq/presets.hpp"

namespace py = pybind11;

namespace {

bsq::PauliSymbol symbol_from(const std::string& preset, const std::map<std::string, std::string>& params) {
  return bsq::make_preset(preset, params);
}

py::dict curve_dict(const bsq::LevelCurve& c) {
  std::vector<double> x, xi, t;
  for (const auto& s : c.samples) {
    x.push_back(s.x);
    xi.push_back(s.xi);
    t.push_back(s.t);
  }
  py::dict d;
  d["x"] = x;
  d["xi"] = xi;
  d["t"] = t;
  d["period_T"] = c.period_T;
  d["E"] = c.energy_E;
  d["region"] = std::string(bsq::region_name(c.region));
  return d;
}

py::dict report_dict(const bsq::PhaseReport& r) {
  py::dict d;
  d["E"] = r.E;
  d["region"] = std::string(bsq::region_name(r.region));
  d["period_T"] = r.period_T;
  d["S0"] = r.S0;
  d["theta_B"] = r.theta_B;
  d["theta_RW"] = r.theta_RW;
  d["I_H1"] = r.I_H1;
  d["S1"] = r.S1;
  d["S1_raw"] = r.S1_raw;
  d["winding"] = r.winding;
  d["winding_residual"] = r.winding_residual;
  return d;
}

bsq::QuantPlan plan_from(const std::string& basis, double L, std::size_t N, double h, double kx) {
  if (basis == "line") return bsq::QuantPlan::line(L, N, h);
  if (basis == "torus") return bsq::QuantPlan::torus(N, h, kx);
  throw bsq::Error(bsq::ErrorKind::ConfigError, "basis must be line or torus: " + basis);
}

bsq::DecayPolicy decay_from(const std::string& s) {
  if (s == "off") return bsq::DecayPolicy::Off;
  if (s == "reject") return bsq::DecayPolicy::Reject;
  if (s == "filter") return bsq::DecayPolicy::Filter;
  throw bsq::Error(bsq::ErrorKind::ConfigError, "decay must be off, reject or filter: " + s);
}

}  // namespace

PYBIND11_MODULE(_bsq, m) {
  m.doc() = "Bohr-Sommerfeld levels and matrix spectra of 2x2 semiclassical symbols";

  static py::exception<bsq::Error> error(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const bsq::Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error)(std::string(e.name()) + ": " + e.what());
      exc.attr("kind") = std::string(e.name());
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  m.def("presets", [] {
    std::vector<std::string> names;
    for (const auto& p : bsq::preset_catalog()) names.push_back(p.name);
    return names;
  });

  m.def("eval_expr", [](const std::string& text, double x, double xi) {
    return bsq::Expr::parse(text).eval(x, xi);
  }, py::arg("text"), py::arg("x"), py::arg("xi"));

  m.def("eigenvalue", [](const std::string& preset, const std::string& branch, double x, double xi,
                         const std::map<std::string, std::string>& params) {
    return bsq::eigenvalue(symbol_from(preset, params), bsq::parse_branch(branch), x, xi);
  }, py::arg("preset"), py::arg("branch"), py::arg("x"), py::arg("xi"),
     py::arg("params") = std::map<std::string, std::string>{});

  m.def("trace", [](const std::string& preset, const std::string& branch, double E,
                    const std::map<std::string, std::string>& params) {
    return curve_dict(bsq::trace(symbol_from(preset, params), bsq::parse_branch(branch), E));
  }, py::arg("preset"), py::arg("branch"), py::arg("E"),
     py::arg("params") = std::map<std::string, std::string>{});

  m.def("phases", [](const std::string& preset, const std::string& branch, double E,
                     const std::map<std::string, std::string>& params, double rw_norm_weight) {
    const auto sym = symbol_from(preset, params);
    const auto b = bsq::parse_branch(branch);
    bsq::PhaseOptions opts;
    opts.rw_norm_weight = rw_norm_weight;
    return report_dict(bsq::assemble(sym, b, bsq::trace(sym, b, E), opts));
  }, py::arg("preset"), py::arg("branch"), py::arg("E"),
     py::arg("params") = std::map<std::string, std::string>{}, py::arg("rw_norm_weight") = 3.0);

  m.def("bs_spectrum", [](const std::string& preset, const std::string& branch,
                          std::array<double, 2> window, double h, int order,
                          const std::map<std::string, std::string>& params, bool include_extremum) {
    bsq::GridOptions opts;
    opts.include_extremum = include_extremum;
    const auto action = bsq::build_action(symbol_from(preset, params), bsq::parse_branch(branch),
                                          window, h, order, opts);
    std::vector<std::pair<long, double>> out;
    for (const auto& r : bsq::predict_spectrum(action, h).rows) out.emplace_back(r.k, r.E);
    return out;
  }, py::arg("preset"), py::arg("branch"), py::arg("window"), py::arg("h"), py::arg("order") = 1,
     py::arg("params") = std::map<std::string, std::string>{}, py::arg("include_extremum") = false);

  m.def("oracle_spectrum", [](const std::string& preset, double h, const std::string& basis, double L,
                              std::size_t N, double kx, std::optional<std::array<double, 2>> window,
                              const std::string& decay, const std::map<std::string, std::string>& params) {
    const auto M = bsq::quantize(symbol_from(preset, params), plan_from(basis, L, N, h, kx));
    bsq::EigenOptions opts;
    opts.window = window;
    opts.decay = decay_from(decay);
    return bsq::eigenvalues(M, opts).values;
  }, py::arg("preset"), py::arg("h"), py::arg("basis") = "line", py::arg("L") = 8.0,
     py::arg("N") = 256, py::arg("kx") = 0.0, py::arg("window") = py::none(),
     py::arg("decay") = "off", py::arg("params") = std::map<std::string, std::string>{});

  m.def("hermiticity_residual", [](const std::string& preset, double h, const std::string& basis,
                                   double L, std::size_t N,
                                   const std::map<std::string, std::string>& params) {
    return bsq::quantize(symbol_from(preset, params), plan_from(basis, L, N, h, 0.0))
        .hermiticity_residual();
  }, py::arg("preset"), py::arg("h"), py::arg("basis") = "line", py::arg("L") = 8.0,
     py::arg("N") = 256, py::arg("params") = std::map<std::string, std::string>{});

  m.def("tm_bands", [](const std::string& variant, double h, std::size_t N,
                       const std::vector<double>& kx, std::size_t count) {
    bsq::TmVariant v;
    if (variant == "low") v = bsq::TmVariant::Low;
    else if (variant == "tight_binding") v = bsq::TmVariant::TightBinding;
    else throw bsq::Error(bsq::ErrorKind::ConfigError, "variant must be low or tight_binding");
    return bsq::tm_bands(v, h, bsq::QuantPlan::torus(N, h), kx, count).rows;
  }, py::arg("variant"), py::arg("h"), py::arg("N") = 256, py::arg("kx") = std::vector<double>{0.0},
     py::arg("count") = 6);

  m.def("compare_csv", [](const std::vector<double>& oracle,
                          const std::vector<std::pair<long, double>>& order0,
                          const std::vector<std::pair<long, double>>& order1, double h) {
    auto rows = [](const std::vector<std::pair<long, double>>& v, int order) {
      std::vector<bsq::SpectrumRow> out;
      for (const auto& [k, E] : v) out.push_back({k, E, order, 0.0});
      return out;
    };
    return bsq::compare_csv(bsq::compare(oracle, rows(order0, 0), rows(order1, 1), h));
  }, py::arg("oracle"), py::arg("order0"), py::arg("order1"), py::arg("h"));
}
