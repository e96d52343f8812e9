#pragma once

#include <string>
#include <vector>

#include "bsq/compare.hpp"
#include "bsq/config.hpp"

namespace bsq {

/// A file produced by a command, relative to the output directory.
struct Output {
  std::string name;
  std::string content;
};

std::vector<Output> cmd_trace(const Config& cfg);
/// CSV and JSON per branch, one row per energy.
std::vector<Output> cmd_phases(const Config& cfg);
std::vector<Output> cmd_bs_spectrum(const Config& cfg);
std::vector<Output> cmd_oracle_spectrum(const Config& cfg);
std::vector<Output> cmd_compare(const Config& cfg);
std::vector<Output> cmd_bands(const Config& cfg);
std::string cmd_presets();

/// Oracle eigenvalues for one h after the decay policy, selection and count.
std::vector<double> oracle_values(const Config& cfg, const PauliSymbol& sym, double h);

/// Merged order-0 and order-1 comparison for one h.
CompareTable compare_for(const Config& cfg, const PauliSymbol& sym, double h);

/// Writes every output atomically below `dir`.
void write_outputs(const std::filesystem::path& dir, const std::vector<Output>& outputs);

/// Command-line entry point; returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace bsq
