#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bsq/bs.hpp"

namespace bsq {

struct Pairing {
  /// Index into the deduplicated predictions for each oracle value.
  std::vector<std::optional<std::size_t>> match;
  std::vector<SpectrumRow> predictions;  ///< sorted, duplicates merged
};

/// Nearest-neighbor pairing of oracle eigenvalues with predicted levels. An
/// oracle value is paired when it lies within half the local spacing of the
/// predictions around its nearest level. A level claimed by several values
/// keeps the nearest one together with values within `cluster_tol` of it;
/// the others stay unmatched unless they are within twice the winning
/// distance, which throws MatchFailure.
Pairing pair_levels(const std::vector<double>& oracle, std::vector<SpectrumRow> predictions,
                    double cluster_tol = 1e-6);

struct CompareRow {
  std::optional<long> k;
  double E_bs0 = 0.0;  ///< NaN when unmatched
  double E_bs1 = 0.0;
  double E_oracle = 0.0;
  double delta0 = 0.0;
  double delta1 = 0.0;
  bool matched = false;  ///< paired at order 1
};

struct CompareTable {
  double h = 0.0;
  std::vector<CompareRow> rows;  ///< one per oracle value, ascending

  /// max |delta| over matched rows of the given order.
  double max_error(int order) const;
  std::size_t matched_count() const;
};

/// Predictions of both orders may merge several branches.
CompareTable compare(const std::vector<double>& oracle, const std::vector<SpectrumRow>& order0,
                     const std::vector<SpectrumRow>& order1, double h);

std::string compare_csv(const CompareTable& table);

}  // namespace bsq
