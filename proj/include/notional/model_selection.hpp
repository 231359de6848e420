#pragma once

// Stratified train/test splitting, stratified k-fold cross validation and
// grid search over forest parameters.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "notional/dataset.hpp"
#include "notional/errors.hpp"
#include "notional/extra_trees.hpp"
#include "notional/random.hpp"
#include "notional/text.hpp"

namespace notional {

struct SplitIndices {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

/// Test rows per stratum. The total is round(fraction * N); each stratum
/// gets the floor of its quota and the leftover rows go to the largest
/// fractional remainders (larger stratum first, then key order), so every
/// stratum is within one row of its exact share.
inline std::map<std::string, std::size_t> apportion(const std::map<std::string, std::size_t>& sizes,
                                                    double fraction) {
  std::size_t n = 0;
  for (const auto& [k, s] : sizes) n += s;
  const auto total = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  std::map<std::string, std::size_t> quota;
  struct Rem {
    double rem;
    std::size_t size;
    std::string key;
  };
  std::vector<Rem> rems;
  std::size_t assigned = 0;
  for (const auto& [k, s] : sizes) {
    const double exact = fraction * static_cast<double>(s);
    const auto fl = static_cast<std::size_t>(std::floor(exact));
    quota[k] = fl;
    assigned += fl;
    rems.push_back({exact - static_cast<double>(fl), s, k});
  }
  std::stable_sort(rems.begin(), rems.end(), [](const Rem& a, const Rem& b) {
    if (a.rem != b.rem) return a.rem > b.rem;
    return a.size > b.size;
  });
  for (std::size_t i = 0; assigned < total && i < rems.size(); ++i, ++assigned) ++quota[rems[i].key];
  return quota;
}

/// Strata are visited in key order; each stratum's rows are shuffled and
/// the first quota rows go to test.
inline SplitIndices stratified_split(const std::vector<std::string>& keys, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction >= 0.0 && test_fraction <= 1.0)) throw Error("test fraction must be in [0, 1]");
  std::map<std::string, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < keys.size(); ++i) strata[keys[i]].push_back(i);
  std::map<std::string, std::size_t> sizes;
  for (const auto& [k, rows] : strata) sizes[k] = rows.size();
  const auto quota = apportion(sizes, test_fraction);

  Rng rng(seed);
  std::vector<char> in_test(keys.size(), 0);
  for (auto& [k, rows] : strata) {
    for (std::size_t i = rows.size(); i > 1; --i) std::swap(rows[i - 1], rows[rng.below(i)]);
    for (std::size_t i = 0; i < quota.at(k); ++i) in_test[rows[i]] = 1;
  }
  SplitIndices out;
  for (std::size_t i = 0; i < keys.size(); ++i) (in_test[i] ? out.test : out.train).push_back(i);
  return out;
}

/// Fold number per row. Each class is shuffled and dealt round-robin, so
/// every fold holds every class when each class has at least `k` rows.
inline std::vector<std::size_t> stratified_folds(const std::vector<Agreement>& labels, std::size_t k, Rng& rng) {
  if (k < 2) throw StratificationError("need at least 2 folds");
  std::vector<std::size_t> fold(labels.size(), 0);
  for (Agreement cls : {Agreement::strict, Agreement::notional}) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == cls) rows.push_back(i);
    if (rows.size() < k)
      throw StratificationError("class " + std::string(to_string(cls)) + " has " + std::to_string(rows.size()) +
                                " rows, fewer than " + std::to_string(k) + " folds");
    for (std::size_t i = rows.size(); i > 1; --i) std::swap(rows[i - 1], rows[rng.below(i)]);
    for (std::size_t i = 0; i < rows.size(); ++i) fold[rows[i]] = i % k;
  }
  return fold;
}

struct Grid {
  std::vector<std::size_t> n_trees{100, 200, 300, 500};
  std::vector<std::optional<std::size_t>> max_depth{std::nullopt, 10, 20};
  std::vector<MaxFeatures> max_features{{MaxFeatures::Rule::sqrt, 0}, {MaxFeatures::Rule::log2, 0},
                                        {MaxFeatures::Rule::all, 0}};

  /// Cells in n_trees-major order.
  std::vector<ForestParams> cells() const {
    std::vector<ForestParams> out;
    for (auto t : n_trees)
      for (auto d : max_depth)
        for (auto f : max_features) {
          ForestParams p;
          p.n_trees = t;
          p.max_depth = d;
          p.max_features = f;
          out.push_back(p);
        }
    return out;
  }

  /// {"n_trees": [...], "max_depth": [null, 10], "max_features": ["sqrt", 5]};
  /// missing keys keep their defaults.
  static Grid parse(std::string_view json_text) {
    Grid g;
    try {
      auto j = nlohmann::json::parse(json_text);
      if (j.contains("n_trees")) g.n_trees = j["n_trees"].get<std::vector<std::size_t>>();
      if (j.contains("max_depth")) {
        g.max_depth.clear();
        for (const auto& d : j["max_depth"])
          g.max_depth.push_back(d.is_null() ? std::nullopt : std::optional<std::size_t>(d.get<std::size_t>()));
      }
      if (j.contains("max_features")) {
        g.max_features.clear();
        for (const auto& f : j["max_features"]) {
          auto mf = MaxFeatures::parse(f.is_string() ? f.get<std::string>() : f.dump());
          if (!mf) throw Error("bad max_features value " + f.dump());
          g.max_features.push_back(*mf);
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(std::string("malformed grid file: ") + e.what());
    }
    if (g.cells().empty()) throw Error("grid has no cells");
    for (auto t : g.n_trees)
      if (t == 0) throw Error("grid n_trees must be positive");
    return g;
  }
};

struct CvRow {
  ForestParams params;
  std::vector<double> fold_accuracy;
  double mean_accuracy = 0.0;
};

struct GridResult {
  ForestParams best;
  std::vector<CvRow> table;  // in grid order
  Forest model;              // best cell refit on all training rows
};

namespace ms_detail {

inline std::size_t depth_rank(const std::optional<std::size_t>& d) {
  return d ? *d : std::numeric_limits<std::size_t>::max();
}

}  // namespace ms_detail

/// Every cell is scored by mean held-out accuracy over the same folds and
/// fitted with the same seed. Ties go to fewer trees, then shallower depth
/// (unlimited counts as deepest), then grid order.
inline GridResult grid_search(const Dataset& train, const Grid& grid, std::size_t folds, std::uint64_t seed,
                              unsigned threads = 0) {
  Rng fold_rng = Rng::derive(seed, std::numeric_limits<std::uint64_t>::max());
  const auto fold = stratified_folds(train.y, folds, fold_rng);

  std::vector<Dataset> fit_sets, held_sets;
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> in, out;
    for (std::size_t i = 0; i < train.size(); ++i) (fold[i] == f ? out : in).push_back(i);
    fit_sets.push_back(train.subset(in));
    held_sets.push_back(train.subset(out));
  }

  GridResult result;
  std::optional<std::size_t> best;
  for (const auto& params : grid.cells()) {
    CvRow row{params, {}, 0.0};
    for (std::size_t f = 0; f < folds; ++f) {
      Forest forest = fit(fit_sets[f], params, seed, threads);
      const Dataset& held = held_sets[f];
      std::size_t correct = 0;
      for (std::size_t i = 0; i < held.size(); ++i)
        if (forest.predict(held.row(i)).label == held.y[i]) ++correct;
      row.fold_accuracy.push_back(static_cast<double>(correct) / static_cast<double>(held.size()));
    }
    for (double a : row.fold_accuracy) row.mean_accuracy += a;
    row.mean_accuracy /= static_cast<double>(folds);
    result.table.push_back(row);

    const std::size_t idx = result.table.size() - 1;
    if (!best) {
      best = idx;
      continue;
    }
    const auto& b = result.table[*best];
    if (row.mean_accuracy > b.mean_accuracy ||
        (row.mean_accuracy == b.mean_accuracy &&
         std::pair(params.n_trees, ms_detail::depth_rank(params.max_depth)) <
             std::pair(b.params.n_trees, ms_detail::depth_rank(b.params.max_depth))))
      best = idx;
  }
  result.best = result.table[*best].params;
  result.model = fit(train, result.best, seed, threads);
  return result;
}

inline std::string depth_string(const std::optional<std::size_t>& d) { return d ? std::to_string(*d) : "none"; }

inline text::Table cv_table(const GridResult& r) {
  text::Table t;
  t.header = {"n_trees", "max_depth", "max_features"};
  const std::size_t folds = r.table.empty() ? 0 : r.table.front().fold_accuracy.size();
  for (std::size_t f = 0; f < folds; ++f) t.header.push_back("fold" + std::to_string(f + 1));
  t.header.push_back("mean_accuracy");
  t.header.push_back("selected");
  for (const auto& row : r.table) {
    std::vector<std::string> cells{std::to_string(row.params.n_trees), depth_string(row.params.max_depth),
                                   row.params.max_features.str()};
    for (double a : row.fold_accuracy) cells.push_back(text::fixed(a, 6));
    cells.push_back(text::fixed(row.mean_accuracy, 6));
    cells.push_back(row.params == r.best ? "yes" : "no");
    t.rows.push_back(std::move(cells));
  }
  return t;
}

}  // namespace notional
