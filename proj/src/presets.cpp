#include "bsq/presets.hpp"

#include "bsq/error.hpp"

namespace bsq {

namespace {

PauliSymbol build(std::string name, const std::array<std::string, 4>& p,
                  const std::array<std::string, 4>& r, Domain domain, Point hint) {
  PauliSymbol s;
  for (std::size_t i = 0; i < 4; ++i) {
    s.p[i] = Expr::parse(p[i]);
    s.r[i] = Expr::parse(r[i]);
  }
  s.domain = domain;
  s.name = std::move(name);
  s.hint = hint;
  s.validate();
  return s;
}

std::string wrap(const std::string& text) { return "(" + text + ")"; }

}  // namespace

const std::vector<PresetInfo>& preset_catalog() {
  static const std::vector<PresetInfo> catalog{
      {"simple_dirac", "p1 = xi, p2 = x on the line; levels of lambda+ are circles", {}},
      {"jackiw_rebbi",
       "p1 = xi, p2 = m0*tanh(x) on the line; discrete spectrum inside (-m0, m0)",
       {{"m0", "1", "mass at infinity"}}},
      {"rw_example", "p1 = x, p2 = xi, p3 = x^2 on the line; non-planar P", {}},
      {"timmel_mele_low",
       "p0 = 1 - cos(2 pi x), p1 = -sqrt(3) sin(2 pi x), p2 = -xi, r2 = -kx; periodic in x",
       {{"kx", "0", "quasimomentum"}}},
      {"timmel_mele_tb",
       "p0 = 1 - cos(2 pi x), p1 = -sqrt(3) sin(2 pi x), p2 = -(2 cos(2 pi xi) + 1); "
       "periodic in x and xi",
       {}},
      {"radial_dirac",
       "p0 = phi_el, p1 = kappa/x + phi_am, p2 = xi, p3 = phi_sc on the half line x > 0",
       {{"kappa", "1", "angular quantum number"},
        {"phi_el", "0", "electric potential, expression in x"},
        {"phi_am", "0", "anomalous magnetic potential, expression in x"},
        {"phi_sc", "x", "scalar potential including the mass, expression in x"},
        {"r0", "1", "x-coordinate of the tracer hint"}}},
  };
  return catalog;
}

PauliSymbol make_preset(std::string_view name, const std::map<std::string, std::string>& params) {
  const PresetInfo* info = nullptr;
  for (const auto& entry : preset_catalog())
    if (entry.name == name) info = &entry;
  if (!info) throw Error(ErrorKind::ConfigError, "unknown preset '" + std::string(name) + "'");

  std::map<std::string, std::string> v;
  for (const auto& p : info->params) v[p.name] = p.default_value;
  for (const auto& [key, value] : params) {
    if (!v.count(key))
      throw Error(ErrorKind::ConfigError,
                  "preset '" + info->name + "' has no parameter '" + key + "'");
    v[key] = value;
  }

  const std::string tm_p0 = "1 - cos(2*pi*x)";
  const std::string tm_p1 = "-sqrt(3)*sin(2*pi*x)";
  if (name == "simple_dirac")
    return build(info->name, {"0", "xi", "x", "0"}, {"0", "0", "0", "0"}, Domain::line(), {0, 0});
  if (name == "jackiw_rebbi")
    return build(info->name, {"0", "xi", wrap(v["m0"]) + "*tanh(x)", "0"}, {"0", "0", "0", "0"},
                 Domain::line(), {0, 0});
  if (name == "rw_example")
    return build(info->name, {"0", "x", "xi", "x^2"}, {"0", "0", "0", "0"}, Domain::line(),
                 {0, 0});
  if (name == "timmel_mele_low")
    return build(info->name, {tm_p0, tm_p1, "-xi", "0"}, {"0", "0", "-" + wrap(v["kx"]), "0"},
                 Domain::torus_x(1.0), {0.5, 0});
  if (name == "timmel_mele_tb")
    return build(info->name, {tm_p0, tm_p1, "-(2*cos(2*pi*xi) + 1)", "0"}, {"0", "0", "0", "0"},
                 Domain::torus_x_xi(1.0, 1.0), {0.5, 0.5});
  const double r0 = Expr::parse(v["r0"]).eval(0.0, 0.0);
  return build(info->name,
               {v["phi_el"], wrap(v["kappa"]) + "/x + " + wrap(v["phi_am"]), "xi", v["phi_sc"]},
               {"0", "0", "0", "0"}, Domain::line(), {r0, 0});
}

}  // namespace bsq
