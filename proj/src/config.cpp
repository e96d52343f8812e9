#include "bsq/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "bsq/error.hpp"
#include "bsq/presets.hpp"

namespace bsq {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::ConfigError, where + ": " + what);
}

void allow_keys(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; }))
      fail(where, "unknown key '" + key + "'");
  }
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  return v.get<double>();
}

std::size_t count(const json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<long long>() < 0) fail(where, "expected a non-negative integer");
  return v.get<std::size_t>();
}

std::string text(const json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return format_number(v.get<double>());
  fail(where, "expected a string or a number");
}

std::array<double, 2> pair(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2) fail(where, "expected [a, b]");
  return {number(v[0], where), number(v[1], where)};
}

std::array<double, 2> window(const json& v, const std::string& where) {
  const auto w = pair(v, where);
  if (!(w[0] < w[1])) fail(where, "window must satisfy a < b");
  return w;
}

std::vector<double> numbers(const json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) fail(where, "expected a number or a list of numbers");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(number(e, where));
  return out;
}

SymbolConfig parse_symbol(const json& j) {
  allow_keys(j, {"preset", "params", "p", "r", "domain", "hint"}, "symbol");
  SymbolConfig s;
  if (j.contains("preset")) {
    if (!j["preset"].is_string()) fail("symbol.preset", "expected a string");
    s.preset = j["preset"].get<std::string>();
    if (j.contains("p") || j.contains("r") || j.contains("domain"))
      fail("symbol", "'preset' excludes 'p', 'r' and 'domain'");
  }
  if (j.contains("params")) {
    if (!s.preset) fail("symbol.params", "parameters need a preset");
    if (!j["params"].is_object()) fail("symbol.params", "expected an object");
    for (const auto& [k, v] : j["params"].items()) s.params[k] = text(v, "symbol.params." + k);
  }
  for (const char* key : {"p", "r"}) {
    if (!j.contains(key)) continue;
    const json& a = j[key];
    if (!a.is_array() || a.size() != 4) fail(std::string("symbol.") + key, "expected four fields");
    auto& dst = key[0] == 'p' ? s.p : s.r;
    for (std::size_t i = 0; i < 4; ++i) dst[i] = text(a[i], std::string("symbol.") + key);
  }
  if (!s.preset && !j.contains("p")) fail("symbol", "needs 'preset' or 'p'");
  if (j.contains("domain")) {
    const json& d = j["domain"];
    allow_keys(d, {"kind", "period_x", "period_xi"}, "symbol.domain");
    const std::string kind = d.contains("kind") ? text(d["kind"], "symbol.domain.kind") : "line";
    const double px = d.contains("period_x") ? number(d["period_x"], "symbol.domain.period_x") : 1.0;
    const double pxi =
        d.contains("period_xi") ? number(d["period_xi"], "symbol.domain.period_xi") : 1.0;
    if (kind == "line") {
      s.domain = Domain::line();
    } else if (kind == "torus_x") {
      s.domain = Domain::torus_x(px);
    } else if (kind == "torus_x_xi") {
      s.domain = Domain::torus_x_xi(px, pxi);
    } else {
      fail("symbol.domain.kind", "expected line, torus_x or torus_x_xi");
    }
    if (s.domain.periodic_x() && !(px > 0.0)) fail("symbol.domain.period_x", "must be > 0");
    if (s.domain.periodic_xi() && !(pxi > 0.0)) fail("symbol.domain.period_xi", "must be > 0");
  }
  if (j.contains("hint")) {
    const auto h = pair(j["hint"], "symbol.hint");
    s.hint = Point{h[0], h[1]};
  }
  return s;
}

TraceOptions parse_trace(const json& j) {
  allow_keys(j, {"ds", "tol_level", "tol_close", "max_steps", "search_radius", "hint"}, "trace");
  TraceOptions t;
  if (j.contains("ds")) t.ds = number(j["ds"], "trace.ds");
  if (j.contains("tol_level")) t.tol_level = number(j["tol_level"], "trace.tol_level");
  if (j.contains("tol_close")) t.tol_close = number(j["tol_close"], "trace.tol_close");
  if (j.contains("max_steps")) t.max_steps = count(j["max_steps"], "trace.max_steps");
  if (j.contains("search_radius"))
    t.search_radius = number(j["search_radius"], "trace.search_radius");
  if (j.contains("hint")) {
    const auto h = pair(j["hint"], "trace.hint");
    t.hint = Point{h[0], h[1]};
  }
  if (t.ds < 0.0 || t.tol_level < 0.0 || t.tol_close < 0.0 || !(t.search_radius > 0.0))
    fail("trace", "steps and tolerances must be positive");
  return t;
}

PhaseOptions parse_phases(const json& j) {
  allow_keys(j, {"plane", "force_generic", "rw_norm_weight"}, "phases");
  PhaseOptions o;
  if (j.contains("plane")) {
    const json& p = j["plane"];
    if (p.is_string()) {
      if (p.get<std::string>() != "auto") fail("phases.plane", "expected \"auto\" or an object");
    } else {
      allow_keys(p, {"vanishing_index", "normal"}, "phases.plane");
      if (p.contains("vanishing_index")) {
        const std::size_t i = count(p["vanishing_index"], "phases.plane.vanishing_index");
        if (i < 1 || i > 3) fail("phases.plane.vanishing_index", "expected 1, 2 or 3");
        o.plane = PlaneSpec::vanishing(static_cast<int>(i));
      } else if (p.contains("normal")) {
        const json& n = p["normal"];
        if (!n.is_array() || n.size() != 3) fail("phases.plane.normal", "expected three numbers");
        o.plane = PlaneSpec::with_normal({number(n[0], "phases.plane.normal"),
                                          number(n[1], "phases.plane.normal"),
                                          number(n[2], "phases.plane.normal")});
      }
    }
  }
  if (j.contains("force_generic")) {
    if (!j["force_generic"].is_boolean()) fail("phases.force_generic", "expected a boolean");
    o.force_generic = j["force_generic"].get<bool>();
  }
  if (j.contains("rw_norm_weight"))
    o.rw_norm_weight = number(j["rw_norm_weight"], "phases.rw_norm_weight");
  return o;
}

void parse_grid(const json& j, GridOptions& g) {
  allow_keys(j, {"initial_points", "max_points", "tol", "include_extremum"}, "grid");
  if (j.contains("initial_points")) g.initial_points = count(j["initial_points"], "grid.initial_points");
  if (j.contains("max_points")) g.max_points = count(j["max_points"], "grid.max_points");
  if (j.contains("tol")) g.tol = number(j["tol"], "grid.tol");
  if (j.contains("include_extremum")) {
    if (!j["include_extremum"].is_boolean()) fail("grid.include_extremum", "expected a boolean");
    g.include_extremum = j["include_extremum"].get<bool>();
  }
  if (g.initial_points < 3) fail("grid.initial_points", "must be at least 3");
  if (!(g.tol > 0.0)) fail("grid.tol", "must be > 0");
}

QuantPlan parse_plan(const json& j) {
  allow_keys(j, {"basis", "L", "N", "kx"}, "plan");
  QuantPlan p;
  const std::string basis = j.contains("basis") ? text(j["basis"], "plan.basis") : "line";
  if (basis == "line") {
    p.basis = QuantPlan::Basis::FourierLine;
  } else if (basis == "torus") {
    p.basis = QuantPlan::Basis::FourierTorus;
  } else {
    fail("plan.basis", "expected line or torus");
  }
  if (j.contains("L")) p.L = number(j["L"], "plan.L");
  if (j.contains("N")) p.N = count(j["N"], "plan.N");
  if (j.contains("kx")) p.kx = number(j["kx"], "plan.kx");
  p.validate();
  return p;
}

OracleConfig parse_oracle(const json& j) {
  allow_keys(j, {"window", "count", "decay", "select"}, "oracle");
  OracleConfig o;
  if (j.contains("window")) o.window = window(j["window"], "oracle.window");
  if (j.contains("count")) o.count = count(j["count"], "oracle.count");
  if (j.contains("decay")) {
    const std::string d = text(j["decay"], "oracle.decay");
    if (d == "off") {
      o.decay = DecayPolicy::Off;
    } else if (d == "reject") {
      o.decay = DecayPolicy::Reject;
    } else if (d == "filter") {
      o.decay = DecayPolicy::Filter;
    } else {
      fail("oracle.decay", "expected off, reject or filter");
    }
  }
  if (j.contains("select")) {
    const std::string s = text(j["select"], "oracle.select");
    if (s == "all") {
      o.select = OracleConfig::Select::All;
    } else if (s == "positive") {
      o.select = OracleConfig::Select::Positive;
    } else if (s == "negative") {
      o.select = OracleConfig::Select::Negative;
    } else {
      fail("oracle.select", "expected all, positive or negative");
    }
  }
  return o;
}

BandsConfig parse_bands(const json& j) {
  allow_keys(j, {"variant", "kx", "count"}, "bands");
  BandsConfig b;
  if (j.contains("variant")) {
    const std::string v = text(j["variant"], "bands.variant");
    if (v == "low") {
      b.variant = TmVariant::Low;
    } else if (v == "tight_binding") {
      b.variant = TmVariant::TightBinding;
    } else {
      fail("bands.variant", "expected low or tight_binding");
    }
  }
  if (j.contains("kx")) b.kx = numbers(j["kx"], "bands.kx");
  if (j.contains("count")) b.count = count(j["count"], "bands.count");
  if (b.count == 0) fail("bands.count", "must be positive");
  return b;
}

}  // namespace

Config parse_config(const json& doc) {
  try {
    allow_keys(doc,
               {"symbol", "branch", "window", "energies", "points", "h", "order", "trace", "grid",
                "phases", "plan", "oracle", "bands", "out"},
               "config");
    Config c;
    if (!doc.contains("symbol")) fail("config", "missing 'symbol'");
    c.symbol = parse_symbol(doc["symbol"]);
    build_symbol(c.symbol);
    if (doc.contains("branch")) {
      const json& b = doc["branch"];
      c.branches.clear();
      if (b.is_string()) {
        c.branches.push_back(parse_branch(b.get<std::string>()));
      } else if (b.is_array() && !b.empty()) {
        for (const auto& e : b) c.branches.push_back(parse_branch(text(e, "branch")));
      } else {
        fail("branch", "expected \"plus\", \"minus\" or a list of them");
      }
    }
    if (doc.contains("window")) {
      const json& w = doc["window"];
      if (w.is_object()) {
        allow_keys(w, {"plus", "minus"}, "window");
        for (const auto& [k, v] : w.items())
          c.branch_window[parse_branch(k)] = window(v, "window." + k);
      } else {
        c.window = window(w, "window");
      }
    }
    if (doc.contains("energies")) c.energies = numbers(doc["energies"], "energies");
    if (doc.contains("points")) c.points = count(doc["points"], "points");
    if (c.points < 1) fail("points", "must be positive");
    if (doc.contains("h")) c.h = numbers(doc["h"], "h");
    if (c.h.empty()) fail("h", "needs at least one value");
    for (double h : c.h)
      if (!(h > 0.0)) fail("h", "values must be > 0");
    if (doc.contains("order")) {
      const std::size_t o = count(doc["order"], "order");
      if (o > 1) fail("order", "expected 0 or 1");
      c.order = static_cast<int>(o);
    }
    if (doc.contains("trace")) c.grid.trace = parse_trace(doc["trace"]);
    if (doc.contains("grid")) parse_grid(doc["grid"], c.grid);
    if (doc.contains("phases")) c.grid.phases = parse_phases(doc["phases"]);
    if (doc.contains("plan")) c.plan = parse_plan(doc["plan"]);
    if (doc.contains("oracle")) c.oracle = parse_oracle(doc["oracle"]);
    if (doc.contains("bands")) c.bands = parse_bands(doc["bands"]);
    if (doc.contains("out")) c.out_dir = text(doc["out"], "out");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigError, e.what());
  }
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot read " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigError, path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

PauliSymbol build_symbol(const SymbolConfig& cfg) {
  PauliSymbol s;
  if (cfg.preset) {
    s = make_preset(*cfg.preset, cfg.params);
  } else {
    try {
      for (std::size_t i = 0; i < 4; ++i) {
        s.p[i] = Expr::parse(cfg.p[i]);
        s.r[i] = Expr::parse(cfg.r[i]);
      }
    } catch (const Error& e) {
      throw Error(ErrorKind::ConfigError, std::string("symbol: ") + e.what());
    }
    s.domain = cfg.domain;
    s.name = "inline";
    s.validate();
  }
  if (cfg.hint) s.hint = cfg.hint;
  return s;
}

std::array<double, 2> window_for(const Config& cfg, Branch b) {
  if (const auto it = cfg.branch_window.find(b); it != cfg.branch_window.end()) return it->second;
  if (cfg.window) return *cfg.window;
  throw Error(ErrorKind::ConfigError,
              "no energy window for branch " + std::string(branch_name(b)));
}

std::vector<double> energy_grid(const Config& cfg, Branch br) {
  if (!cfg.energies.empty()) return cfg.energies;
  const auto [a, b] = window_for(cfg, br);
  if (cfg.points == 1) return {0.5 * (a + b)};
  std::vector<double> out(cfg.points);
  for (std::size_t i = 0; i < cfg.points; ++i)
    out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(cfg.points - 1);
  return out;
}

std::array<double, 2> parse_window(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw Error(ErrorKind::ConfigError, "window must be a:b");
  try {
    std::size_t used = 0;
    const double a = std::stod(s.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument(s);
    const std::string rest = s.substr(colon + 1);
    const double b = std::stod(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(s);
    if (!(a < b)) throw Error(ErrorKind::ConfigError, "window must satisfy a < b");
    return {a, b};
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::ConfigError, "window must be a:b, got '" + s + "'");
  }
}

std::vector<double> parse_h_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size() || !(v > 0.0)) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::ConfigError, "h must be a comma-separated list of positive numbers");
    }
  }
  if (out.empty()) throw Error(ErrorKind::ConfigError, "h list is empty");
  return out;
}

}  // namespace bsq
