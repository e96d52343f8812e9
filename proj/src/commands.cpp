#include "bsq/commands.hpp"

#include <algorithm>
#include <iostream>

#include <CLI11.hpp>

#include "bsq/csv.hpp"
#include "bsq/error.hpp"
#include "bsq/presets.hpp"

namespace bsq {

namespace {

using nlohmann::json;

std::string h_tag(double h) { return "h" + format_number(h); }

json phase_json(const PhaseReport& r) {
  json j;
  j["E"] = r.E;
  j["branch"] = branch_name(r.branch);
  j["region"] = region_name(r.region);
  j["period_T"] = r.period_T;
  j["S0"] = r.S0;
  j["theta_B"] = r.theta_B;
  j["theta_RW"] = r.theta_RW;
  j["I_H1"] = r.I_H1;
  j["S1"] = r.S1;
  j["S1_raw"] = r.S1_raw;
  j["winding"] = r.winding ? json(*r.winding) : json(nullptr);
  j["winding_residual"] = r.winding_residual;
  j["plane_normal"] =
      r.plane_normal ? json::array({(*r.plane_normal)[0], (*r.plane_normal)[1], (*r.plane_normal)[2]})
                     : json(nullptr);
  j["quantized"] = r.quantized_branch_used;
  j["errors"] = {{"S0", r.errors.S0},
                 {"theta_B", r.errors.theta_B},
                 {"theta_RW", r.errors.theta_RW},
                 {"I_H1", r.errors.I_H1},
                 {"S1", r.errors.S1}};
  return j;
}

/// Smallest interval holding every configured energy window.
std::optional<std::array<double, 2>> energy_hull(const Config& cfg) {
  std::optional<std::array<double, 2>> hull = cfg.window;
  for (const auto& [b, w] : cfg.branch_window) {
    if (!hull) hull = w;
    (*hull)[0] = std::min((*hull)[0], w[0]);
    (*hull)[1] = std::max((*hull)[1], w[1]);
  }
  return hull;
}

double smallest_h(const Config& cfg) { return *std::min_element(cfg.h.begin(), cfg.h.end()); }

ActionFunction branch_action(const Config& cfg, const PauliSymbol& sym, Branch b, double h) {
  return build_action(sym, b, window_for(cfg, b), h, 1, cfg.grid);
}

ActionFunction at_order(ActionFunction a, int order) {
  a.order = order;
  return a;
}

CompareTable compare_with(const Config& cfg, const PauliSymbol& sym,
                          const std::vector<ActionFunction>& actions, double h) {
  std::vector<SpectrumRow> p0;
  std::vector<SpectrumRow> p1;
  for (const auto& a : actions) {
    const auto r1 = predict_spectrum(at_order(a, 1), h).rows;
    const auto r0 = predict_spectrum(at_order(a, 0), h).rows;
    p1.insert(p1.end(), r1.begin(), r1.end());
    p0.insert(p0.end(), r0.begin(), r0.end());
  }
  return compare(oracle_values(cfg, sym, h), p0, p1, h);
}

}  // namespace

std::vector<Output> cmd_trace(const Config& cfg) {
  const PauliSymbol sym = build_symbol(cfg.symbol);
  std::vector<Output> out;
  for (Branch b : cfg.branches) {
    const auto energies = energy_grid(cfg, b);
    for (std::size_t i = 0; i < energies.size(); ++i) {
      const LevelCurve c = trace(sym, b, energies[i], cfg.grid.trace);
      out.push_back({"trace_" + std::string(branch_name(b)) + "_" + std::to_string(i) + ".csv",
                     curve_csv(c)});
    }
  }
  return out;
}

std::vector<Output> cmd_phases(const Config& cfg) {
  const PauliSymbol sym = build_symbol(cfg.symbol);
  std::vector<Output> out;
  for (Branch b : cfg.branches) {
    std::string csv = phase_csv_header();
    json rows = json::array();
    for (double E : energy_grid(cfg, b)) {
      const LevelCurve c = trace(sym, b, E, cfg.grid.trace);
      const PhaseReport r = assemble(sym, b, c, cfg.grid.phases);
      csv += phase_csv_row(r);
      rows.push_back(phase_json(r));
    }
    const std::string base = "phases_" + std::string(branch_name(b));
    out.push_back({base + ".csv", csv});
    out.push_back({base + ".json", rows.dump(2) + "\n"});
  }
  return out;
}

std::vector<Output> cmd_bs_spectrum(const Config& cfg) {
  const PauliSymbol sym = build_symbol(cfg.symbol);
  std::vector<Output> out;
  for (Branch b : cfg.branches) {
    const ActionFunction a = at_order(branch_action(cfg, sym, b, smallest_h(cfg)), cfg.order);
    for (double h : cfg.h)
      out.push_back({"bs_spectrum_" + std::string(branch_name(b)) + "_" + h_tag(h) + ".csv",
                     spectrum_csv(predict_spectrum(a, h))});
  }
  return out;
}

std::vector<double> oracle_values(const Config& cfg, const PauliSymbol& sym, double h) {
  QuantPlan plan = cfg.plan;
  plan.h = h;
  const HermitianMatrix M = quantize(sym, plan);
  EigenOptions opts;
  opts.window = cfg.oracle.window ? cfg.oracle.window : energy_hull(cfg);
  opts.decay = cfg.oracle.decay.value_or(default_decay(sym, plan, opts.window.has_value()));
  std::vector<double> values = eigenvalues(M, opts).values;
  using Select = OracleConfig::Select;
  if (cfg.oracle.select != Select::All) {
    const bool positive = cfg.oracle.select == Select::Positive;
    std::erase_if(values, [&](double v) { return positive ? !(v > 0.0) : !(v < 0.0); });
  }
  if (cfg.oracle.count) values = smallest_abs(std::move(values), *cfg.oracle.count);
  return values;
}

std::vector<Output> cmd_oracle_spectrum(const Config& cfg) {
  const PauliSymbol sym = build_symbol(cfg.symbol);
  std::vector<Output> out;
  for (double h : cfg.h)
    out.push_back({"oracle_" + h_tag(h) + ".csv", eigenvalue_csv(oracle_values(cfg, sym, h))});
  return out;
}

CompareTable compare_for(const Config& cfg, const PauliSymbol& sym, double h) {
  std::vector<ActionFunction> actions;
  for (Branch b : cfg.branches) actions.push_back(branch_action(cfg, sym, b, h));
  return compare_with(cfg, sym, actions, h);
}

std::vector<Output> cmd_compare(const Config& cfg) {
  const PauliSymbol sym = build_symbol(cfg.symbol);
  // The action grid does not depend on h beyond its refinement target, so one
  // grid built for the smallest h serves the whole list.
  std::vector<ActionFunction> actions;
  for (Branch b : cfg.branches) actions.push_back(branch_action(cfg, sym, b, smallest_h(cfg)));
  std::vector<Output> out;
  for (double h : cfg.h)
    out.push_back({"compare_" + h_tag(h) + ".csv", compare_csv(compare_with(cfg, sym, actions, h))});
  return out;
}

std::vector<Output> cmd_bands(const Config& cfg) {
  std::vector<Output> out;
  for (double h : cfg.h)
    out.push_back({"bands_" + h_tag(h) + ".csv",
                   band_csv(tm_bands(cfg.bands.variant, h, cfg.plan, cfg.bands.kx, cfg.bands.count))});
  return out;
}

std::string cmd_presets() {
  std::string out;
  for (const auto& p : preset_catalog()) {
    out += p.name + "\n  " + p.doc + "\n";
    for (const auto& param : p.params)
      out += "  " + param.name + " = " + param.default_value + "  " + param.doc + "\n";
  }
  return out;
}

void write_outputs(const std::filesystem::path& dir, const std::vector<Output>& outputs) {
  for (const auto& o : outputs) write_file_atomic(dir / o.name, o.content);
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Bohr-Sommerfeld rules for 2x2 semiclassical systems"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string preset;
  std::string h_list;
  int order = -1;
  std::string branch;
  std::string window;

  auto add_common = [&](CLI::App* cmd) {
    cmd->set_help_flag("--help", "print this help and exit");
    cmd->add_option("--config", config_path, "JSON configuration file");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--preset", preset, "preset symbol, replaces the configured symbol");
    cmd->add_option("--h", h_list, "comma-separated list of h");
    cmd->add_option("--order", order, "Bohr-Sommerfeld order")->check(CLI::Range(0, 1));
    cmd->add_option("--branch", branch, "eigenvalue branch")->check(CLI::IsMember({"plus", "minus"}));
    cmd->add_option("--window", window, "energy window a:b");
  };

  const std::vector<std::pair<std::string, std::string>> names{
      {"trace", "sample level curves"},
      {"phases", "phase report per energy"},
      {"bs-spectrum", "Bohr-Sommerfeld levels"},
      {"oracle-spectrum", "eigenvalues of the quantized matrix"},
      {"compare", "paired Bohr-Sommerfeld and matrix eigenvalues"},
      {"bands", "Timmel-Mele bands over kx"},
  };
  std::vector<CLI::App*> cmds;
  for (const auto& [name, doc] : names) {
    cmds.push_back(app.add_subcommand(name, doc));
    add_common(cmds.back());
  }
  CLI::App* presets = app.add_subcommand("presets", "list presets and their parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (presets->parsed()) {
      std::cout << cmd_presets();
      return 0;
    }
    Config cfg;
    if (!config_path.empty()) {
      cfg = load_config(config_path);
    } else if (preset.empty()) {
      throw Error(ErrorKind::ConfigError, "needs --config or --preset");
    }
    if (!preset.empty()) {
      cfg.symbol = SymbolConfig{};
      cfg.symbol.preset = preset;
    }
    if (!h_list.empty()) cfg.h = parse_h_list(h_list);
    if (order >= 0) cfg.order = order;
    if (!branch.empty()) cfg.branches = {parse_branch(branch)};
    if (!window.empty()) {
      cfg.window = parse_window(window);
      cfg.branch_window.clear();
    }
    if (!out_dir.empty()) cfg.out_dir = out_dir;

    std::vector<Output> outputs;
    if (cmds[0]->parsed()) outputs = cmd_trace(cfg);
    if (cmds[1]->parsed()) outputs = cmd_phases(cfg);
    if (cmds[2]->parsed()) outputs = cmd_bs_spectrum(cfg);
    if (cmds[3]->parsed()) outputs = cmd_oracle_spectrum(cfg);
    if (cmds[4]->parsed()) outputs = cmd_compare(cfg);
    if (cmds[5]->parsed()) outputs = cmd_bands(cfg);
    write_outputs(cfg.out_dir, outputs);
    for (const auto& o : outputs) std::cout << (cfg.out_dir / o.name).string() << "\n";
    return 0;
  } catch (const Error& e) {
    std::cerr << e.name() << ": " << e.what() << "\n";
    return e.kind() == ErrorKind::ConfigError ? 2 : 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "ConfigError: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace bsq
