#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bsq/bs.hpp"
#include "bsq/oracle.hpp"

namespace bsq {

/// Either a preset with parameters or inline expressions.
struct SymbolConfig {
  std::optional<std::string> preset;
  std::map<std::string, std::string> params;
  std::array<std::string, 4> p{"0", "0", "0", "0"};
  std::array<std::string, 4> r{"0", "0", "0", "0"};
  Domain domain;
  std::optional<Point> hint;
};

struct OracleConfig {
  enum class Select { All, Positive, Negative };
  /// Defaults to the hull of the energy windows.
  std::optional<std::array<double, 2>> window;
  /// Keep this many eigenvalues of smallest absolute value.
  std::optional<std::size_t> count;
  /// Unset: default_decay for the symbol and plan.
  std::optional<DecayPolicy> decay;
  Select select = Select::All;
};

struct BandsConfig {
  TmVariant variant = TmVariant::Low;
  std::vector<double> kx{0.0};
  std::size_t count = 6;
};

struct Config {
  SymbolConfig symbol;
  std::vector<Branch> branches{Branch::Plus};
  std::optional<std::array<double, 2>> window;
  /// Per-branch windows take precedence over `window`.
  std::map<Branch, std::array<double, 2>> branch_window;
  /// Energies for trace and phases; when empty, `points` values spread over
  /// the window.
  std::vector<double> energies;
  std::size_t points = 9;
  std::vector<double> h{0.1};
  int order = 1;
  GridOptions grid;
  QuantPlan plan;
  OracleConfig oracle;
  BandsConfig bands;
  std::filesystem::path out_dir = ".";
};

/// Throws ConfigError on unknown keys, wrong types or invalid values.
Config parse_config(const nlohmann::json& doc);
Config load_config(const std::filesystem::path& path);

PauliSymbol build_symbol(const SymbolConfig& cfg);

/// Throws ConfigError when the branch has no window.
std::array<double, 2> window_for(const Config& cfg, Branch b);

/// Energies for trace and phases of one branch.
std::vector<double> energy_grid(const Config& cfg, Branch b);

/// "a:b" with a < b.
std::array<double, 2> parse_window(const std::string& text);
/// Comma-separated list of positive numbers.
std::vector<double> parse_h_list(const std::string& text);

}  // namespace bsq
