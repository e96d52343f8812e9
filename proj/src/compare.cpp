#include "bsq/compare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bsq/csv.hpp"
#include "bsq/error.hpp"

namespace bsq {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

Pairing pair_levels(const std::vector<double>& oracle, std::vector<SpectrumRow> predictions,
                    double cluster_tol) {
  std::sort(predictions.begin(), predictions.end(),
            [](const SpectrumRow& a, const SpectrumRow& b) { return a.E < b.E; });
  Pairing out;
  for (const auto& p : predictions) {
    if (!out.predictions.empty() &&
        std::abs(p.E - out.predictions.back().E) <= 1e-9 * std::max(1.0, std::abs(p.E)))
      continue;
    out.predictions.push_back(p);
  }
  const auto& pred = out.predictions;
  out.match.assign(oracle.size(), std::nullopt);
  if (pred.empty()) return out;

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<std::size_t>> claims(pred.size());
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    const double v = oracle[i];
    const auto it = std::lower_bound(pred.begin(), pred.end(), v,
                                     [](const SpectrumRow& r, double e) { return r.E < e; });
    std::size_t j = static_cast<std::size_t>(it - pred.begin());
    if (j == pred.size() || (j > 0 && v - pred[j - 1].E < pred[j].E - v)) --j;
    const double left = j > 0 ? pred[j].E - pred[j - 1].E : inf;
    const double right = j + 1 < pred.size() ? pred[j + 1].E - pred[j].E : inf;
    const double spacing = std::min(left, right);
    if (std::abs(v - pred[j].E) < 0.5 * spacing) claims[j].push_back(i);
  }

  for (std::size_t j = 0; j < pred.size(); ++j) {
    auto& c = claims[j];
    if (c.empty()) continue;
    auto dist = [&](std::size_t i) { return std::abs(oracle[i] - pred[j].E); };
    std::sort(c.begin(), c.end(), [&](std::size_t a, std::size_t b) { return dist(a) < dist(b); });
    const double best = oracle[c.front()];
    const double tol = cluster_tol * std::max(1.0, std::abs(best));
    for (std::size_t i : c) {
      if (std::abs(oracle[i] - best) <= tol) {
        out.match[i] = j;
      } else if (dist(i) < 2.0 * dist(c.front())) {
        throw Error(ErrorKind::MatchFailure,
                    "eigenvalues " + csv_number(best) + " and " + csv_number(oracle[i]) +
                        " are equally close to the level " + csv_number(pred[j].E));
      }
    }
  }
  return out;
}

double CompareTable::max_error(int order) const {
  double e = 0.0;
  for (const auto& r : rows) {
    const double d = order == 0 ? r.delta0 : r.delta1;
    if (!std::isnan(d)) e = std::max(e, d);
  }
  return e;
}

std::size_t CompareTable::matched_count() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const CompareRow& r) { return r.matched; }));
}

CompareTable compare(const std::vector<double>& oracle, const std::vector<SpectrumRow>& order0,
                     const std::vector<SpectrumRow>& order1, double h) {
  std::vector<double> values = oracle;
  std::sort(values.begin(), values.end());
  const Pairing p0 = pair_levels(values, order0);
  const Pairing p1 = pair_levels(values, order1);

  CompareTable table;
  table.h = h;
  for (std::size_t i = 0; i < values.size(); ++i) {
    CompareRow row;
    row.E_oracle = values[i];
    row.E_bs0 = p0.match[i] ? p0.predictions[*p0.match[i]].E : kNaN;
    row.E_bs1 = p1.match[i] ? p1.predictions[*p1.match[i]].E : kNaN;
    row.delta0 = std::abs(row.E_bs0 - row.E_oracle);
    row.delta1 = std::abs(row.E_bs1 - row.E_oracle);
    row.matched = p1.match[i].has_value();
    if (p1.match[i])
      row.k = p1.predictions[*p1.match[i]].k;
    else if (p0.match[i])
      row.k = p0.predictions[*p0.match[i]].k;
    table.rows.push_back(row);
  }
  return table;
}

std::string compare_csv(const CompareTable& table) {
  std::string out = csv_row(
      {"k", "E_bs_order0", "E_bs_order1", "E_oracle", "abs_delta0", "abs_delta1", "matched"});
  for (const auto& r : table.rows)
    out += csv_row({r.k ? std::to_string(*r.k) : "", csv_number(r.E_bs0), csv_number(r.E_bs1),
                    csv_number(r.E_oracle), csv_number(r.delta0), csv_number(r.delta1),
                    r.matched ? "1" : "0"});
  return out;
}

}  // namespace bsq
