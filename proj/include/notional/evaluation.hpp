#pragma once

#include <array>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "notional/agreement.hpp"
#include "notional/dataset.hpp"
#include "notional/errors.hpp"
#include "notional/extra_trees.hpp"
#include "notional/text.hpp"

namespace notional {

struct ClassScores {
  double precision = 0.0;  // 0 when the class is never predicted
  double recall = 0.0;     // 0 when the class never occurs
};

struct EvalReport {
  // confusion[actual][predicted], classes ordered (strict, notional)
  std::array<std::array<std::size_t, 2>, 2> confusion{};
  double accuracy = 0.0;
  double majority_baseline = 0.0;  // largest actual class share in the evaluated set
  std::array<ClassScores, 2> per_class{};
  std::optional<double> corpus_baseline;  // majority share over the whole extracted corpus

  std::size_t total() const { return confusion[0][0] + confusion[0][1] + confusion[1][0] + confusion[1][1]; }

  static EvalReport from_confusion(std::array<std::array<std::size_t, 2>, 2> confusion) {
    EvalReport r;
    r.confusion = confusion;
    const double n = static_cast<double>(r.total());
    if (n == 0) throw Error("cannot evaluate an empty test set");
    r.accuracy = static_cast<double>(confusion[0][0] + confusion[1][1]) / n;
    const std::size_t row0 = confusion[0][0] + confusion[0][1];
    const std::size_t row1 = confusion[1][0] + confusion[1][1];
    r.majority_baseline = static_cast<double>(std::max(row0, row1)) / n;
    for (int c = 0; c < 2; ++c) {
      const std::size_t actual = confusion[c][0] + confusion[c][1];
      const std::size_t predicted = confusion[0][c] + confusion[1][c];
      r.per_class[c].precision = predicted ? static_cast<double>(confusion[c][c]) / static_cast<double>(predicted) : 0.0;
      r.per_class[c].recall = actual ? static_cast<double>(confusion[c][c]) / static_cast<double>(actual) : 0.0;
    }
    return r;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["n"] = total();
    j["accuracy"] = accuracy;
    j["confusion"] = {{"classes", {"strict", "notional"}},
                      {"rows", "actual"},
                      {"matrix", {{confusion[0][0], confusion[0][1]}, {confusion[1][0], confusion[1][1]}}}};
    j["majority_baseline_test"] = majority_baseline;
    j["majority_baseline_corpus"] = corpus_baseline ? nlohmann::ordered_json(*corpus_baseline) : nlohmann::ordered_json(nullptr);
    for (int c = 0; c < 2; ++c)
      j["per_class"][std::string(to_string(static_cast<Agreement>(c)))] = {{"precision", per_class[c].precision},
                                                                          {"recall", per_class[c].recall}};
    return j;
  }

  std::string render() const {
    std::string s;
    s += "accuracy        " + text::fixed(accuracy, 4) + "  (" + std::to_string(confusion[0][0] + confusion[1][1]) +
         "/" + std::to_string(total()) + ")\n";
    s += "baseline (test) " + text::fixed(majority_baseline, 4) + "\n";
    if (corpus_baseline) s += "baseline (corp) " + text::fixed(*corpus_baseline, 4) + "\n";
    s += "\n                 pred strict  pred notional\n";
    s += "actual strict    " + pad(confusion[0][0]) + "  " + pad(confusion[0][1]) + "\n";
    s += "actual notional  " + pad(confusion[1][0]) + "  " + pad(confusion[1][1]) + "\n\n";
    for (int c = 0; c < 2; ++c)
      s += std::string(to_string(static_cast<Agreement>(c))) + (c == 0 ? "   " : " ") + " precision " +
           text::fixed(per_class[c].precision, 4) + "  recall " + text::fixed(per_class[c].recall, 4) + "\n";
    return s;
  }

 private:
  static std::string pad(std::size_t v) {
    auto s = std::to_string(v);
    return std::string(s.size() < 11 ? 11 - s.size() : 0, ' ') + s;
  }
};

inline EvalReport evaluate(const Forest& forest, const Dataset& test) {
  if (test.size() == 0) throw Error("cannot evaluate an empty test set");
  std::array<std::array<std::size_t, 2>, 2> confusion{};
  for (std::size_t i = 0; i < test.size(); ++i)
    ++confusion[static_cast<int>(test.y[i])][static_cast<int>(forest.predict(test.row(i)).label)];
  return EvalReport::from_confusion(confusion);
}

/// Majority class share over a full label population.
inline double majority_share(std::size_t notional, std::size_t strict) {
  const std::size_t n = notional + strict;
  if (n == 0) throw Error("empty label population");
  return static_cast<double>(std::max(notional, strict)) / static_cast<double>(n);
}

}  // namespace notional
