#pragma once

// Descriptive statistics over labelled pairs: agreement contingency tables,
// Pearson residuals and binned notional-rate profiles.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "notional/agreement.hpp"
#include "notional/dataset.hpp"
#include "notional/errors.hpp"
#include "notional/genre.hpp"
#include "notional/syntax.hpp"
#include "notional/text.hpp"

namespace notional {

struct ContingencyRow {
  std::string category;
  std::size_t notional = 0;
  std::size_t strict = 0;

  std::size_t total() const { return notional + strict; }
  double pct_notional() const {
    return total() ? 100.0 * static_cast<double>(notional) / static_cast<double>(total()) : 0.0;
  }
};

struct ContingencyTable {
  std::string variable;
  std::vector<ContingencyRow> rows;
  std::vector<ContingencyRow> subtotals;

  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& r : rows) n += r.total();
    return n;
  }

  const ContingencyRow* find(std::string_view category) const {
    for (const auto& r : rows)
      if (r.category == category) return &r;
    return nullptr;
  }

  /// Descending % notional, ties by category.
  void sort_by_rate() {
    std::stable_sort(rows.begin(), rows.end(), [](const ContingencyRow& a, const ContingencyRow& b) {
      if (a.pct_notional() != b.pct_notional()) return a.pct_notional() > b.pct_notional();
      return a.category < b.category;
    });
  }

  ContingencyTable filtered(std::size_t min_count) const {
    ContingencyTable t = *this;
    std::erase_if(t.rows, [&](const ContingencyRow& r) { return r.total() < min_count; });
    return t;
  }

  text::Table table() const {
    text::Table t;
    t.header = {variable, "notional", "strict", "pct_notional"};
    auto add = [&](const ContingencyRow& r) {
      t.rows.push_back({r.category, std::to_string(r.notional), std::to_string(r.strict), text::fixed(r.pct_notional(), 2)});
    };
    for (const auto& r : rows) add(r);
    for (const auto& r : subtotals) add(r);
    return t;
  }
};

/// Written and spoken subtotals; rows must be genre names.
inline void add_genre_subtotals(ContingencyTable& t) {
  ContingencyRow written{"total_written"}, spoken{"total_spoken"};
  for (const auto& r : t.rows) {
    auto g = parse_genre(r.category);
    if (!g) throw SchemaError("genre", "unknown genre '" + r.category + "'");
    auto& sub = is_spoken(*g) ? spoken : written;
    sub.notional += r.notional;
    sub.strict += r.strict;
  }
  t.subtotals = {written, spoken};
}

/// Counts agreement by one categorical column of a features table. Rows
/// are in category order, except genre, which follows the genre
/// enumeration and carries written/spoken subtotals.
inline ContingencyTable contingency(const FeatureTable& ft, std::string_view by) {
  auto col = ft.feature_index(by);
  if (!col) throw SchemaError(std::string(by), "unknown feature");
  if (ft.labels.size() != ft.size()) throw SchemaError("label", "features table has no labels");
  std::map<std::string, ContingencyRow> counts;
  for (std::size_t i = 0; i < ft.size(); ++i) {
    auto& r = counts[ft.values[i][*col]];
    r.category = ft.values[i][*col];
    ++(ft.labels[i] == Agreement::notional ? r.notional : r.strict);
  }
  ContingencyTable t;
  t.variable = std::string(by);
  if (by == "genre") {
    for (Genre g : kAllGenres) {
      auto it = counts.find(std::string(to_string(g)));
      if (it != counts.end()) t.rows.push_back(it->second);
    }
    if (t.rows.size() != counts.size()) throw SchemaError("genre", "unknown genre value");
    add_genre_subtotals(t);
  } else {
    for (auto& [k, r] : counts) t.rows.push_back(r);
  }
  return t;
}

struct ResidualCell {
  std::size_t observed = 0;
  double expected = 0.0;
  double residual = 0.0;
};

struct ResidualRow {
  std::string category;
  std::array<ResidualCell, 2> cells;  // (notional, strict)
};

struct ResidualTable {
  std::string variable;
  std::vector<ResidualRow> rows;

  double chi_square() const {
    double x = 0.0;
    for (const auto& r : rows)
      for (const auto& c : r.cells) x += c.residual * c.residual;
    return x;
  }

  text::Table table() const {
    text::Table t;
    t.header = {variable,          "observed_notional", "observed_strict", "expected_notional",
                "expected_strict", "resid_notional",    "resid_strict"};
    for (const auto& r : rows)
      t.rows.push_back({r.category, std::to_string(r.cells[0].observed), std::to_string(r.cells[1].observed),
                        text::fixed(r.cells[0].expected, 4), text::fixed(r.cells[1].expected, 4),
                        text::fixed(r.cells[0].residual, 4), text::fixed(r.cells[1].residual, 4)});
    return t;
  }
};

/// Pearson residuals (O - E) / sqrt(E) with E = row total * column total / N.
inline ResidualTable residuals(const ContingencyTable& t) {
  std::size_t col_notional = 0, col_strict = 0;
  for (const auto& r : t.rows) {
    if (r.total() == 0) throw Error("category '" + r.category + "' has no observations");
    col_notional += r.notional;
    col_strict += r.strict;
  }
  if (col_notional == 0) throw Error("no notional observations in '" + t.variable + "'");
  if (col_strict == 0) throw Error("no strict observations in '" + t.variable + "'");
  const double n = static_cast<double>(col_notional + col_strict);
  ResidualTable out;
  out.variable = t.variable;
  for (const auto& r : t.rows) {
    ResidualRow row{r.category, {}};
    const std::array<std::size_t, 2> obs{r.notional, r.strict};
    const std::array<std::size_t, 2> cols{col_notional, col_strict};
    for (int c = 0; c < 2; ++c) {
      auto& cell = row.cells[c];
      cell.observed = obs[c];
      cell.expected = static_cast<double>(r.total()) * static_cast<double>(cols[c]) / n;
      cell.residual = (static_cast<double>(obs[c]) - cell.expected) / std::sqrt(cell.expected);
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

struct Bin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n = 0;
  std::size_t notional = 0;

  double fraction() const { return n ? static_cast<double>(notional) / static_cast<double>(n) : 0.0; }
};

struct BinProfile {
  std::string variable;
  std::vector<Bin> bins;
  std::size_t total = 0;

  /// Share of all pairs in each bin, for spine plots.
  std::vector<double> spine_widths() const {
    std::vector<double> w;
    for (const auto& b : bins) w.push_back(total ? static_cast<double>(b.n) / static_cast<double>(total) : 0.0);
    return w;
  }

  text::Table table() const {
    text::Table t;
    t.header = {"bin", "lo", "hi", "n", "notional", "fraction", "spine_width"};
    auto w = spine_widths();
    for (std::size_t i = 0; i < bins.size(); ++i)
      t.rows.push_back({std::to_string(i + 1), text::fixed(bins[i].lo, 4), text::fixed(bins[i].hi, 4),
                        std::to_string(bins[i].n), std::to_string(bins[i].notional), text::fixed(bins[i].fraction(), 4),
                        text::fixed(w[i], 4)});
    return t;
  }
};

/// Equal-width bins over [min, max]; the maximum falls in the last bin. A
/// single distinct value gives one bin [v, v].
inline BinProfile bin_profile(const std::vector<double>& values, const std::vector<Agreement>& labels,
                              std::size_t n_bins, std::string variable = "value") {
  if (n_bins < 2) throw Error("bin_profile needs at least 2 bins");
  if (values.size() != labels.size()) throw Error("values and labels differ in length");
  BinProfile p;
  p.variable = std::move(variable);
  p.total = values.size();
  if (values.empty()) return p;
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  const double lo = *mn, hi = *mx;
  if (lo == hi) {
    Bin b{lo, hi, values.size(), 0};
    for (auto l : labels) b.notional += l == Agreement::notional;
    p.bins.push_back(b);
    return p;
  }
  const double width = (hi - lo) / static_cast<double>(n_bins);
  for (std::size_t i = 0; i < n_bins; ++i)
    p.bins.push_back({lo + width * static_cast<double>(i), i + 1 == n_bins ? hi : lo + width * static_cast<double>(i + 1), 0, 0});
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto b = static_cast<std::size_t>((values[i] - lo) / width);
    b = std::min(b, n_bins - 1);
    ++p.bins[b].n;
    if (labels[i] == Agreement::notional) ++p.bins[b].notional;
  }
  return p;
}

/// Numeric column of a features table, optionally transformed.
inline std::vector<double> numeric_column(const FeatureTable& ft, std::string_view name, bool natural_log = false) {
  auto col = ft.feature_index(name);
  if (!col) throw SchemaError(std::string(name), "unknown feature");
  std::vector<double> out;
  for (const auto& row : ft.values) {
    auto v = text::parse_double(row[*col]);
    if (!v) throw SchemaError(std::string(name), "not a number: '" + row[*col] + "'");
    if (natural_log) {
      if (*v <= 0) throw SchemaError(std::string(name), "log of non-positive value " + row[*col]);
      *v = std::log(*v);
    }
    out.push_back(*v);
  }
  return out;
}

/// Coarse anaphor and antecedent functions as two residual tables. The
/// antecedent column holds fine labels and is coarsened here.
inline std::pair<ResidualTable, ResidualTable> function_residuals(const FeatureTable& ft) {
  auto n_func = contingency(ft, "n_func");
  n_func.variable = "anaphor_func";
  FeatureTable coarse = ft;
  auto col = coarse.feature_index("t_func");
  if (!col) throw SchemaError("t_func", "unknown feature");
  for (auto& row : coarse.values) {
    auto fine = parse_fine_function(row[*col]);
    if (!fine) throw SchemaError("t_func", "unknown function '" + row[*col] + "'");
    row[*col] = std::string(to_string(coarsen(*fine)));
  }
  auto t_func = contingency(coarse, "t_func");
  t_func.variable = "antecedent_func";
  return {residuals(n_func), residuals(t_func)};
}

}  // namespace notional
