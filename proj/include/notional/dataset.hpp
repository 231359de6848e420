#pragma once

// Feature tables and their numeric encoding. Numeric features pass through;
// categorical features become one-hot groups over the categories seen when
// the encoding was fitted. Unseen categories encode as an all-zero group.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "notional/agreement.hpp"
#include "notional/errors.hpp"
#include "notional/text.hpp"

namespace notional {

enum class FeatureKind { numeric, categorical };

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::numeric;
  std::vector<std::string> categories;  // sorted, categorical only

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

/// Raw string-valued feature rows, as read from a features file.
struct FeatureTable {
  std::vector<std::string> feature_names;
  std::vector<std::string> ids;
  std::vector<std::vector<std::string>> values;
  std::vector<Agreement> labels;  // empty when the file has no label column

  std::size_t size() const { return values.size(); }

  std::optional<std::size_t> feature_index(std::string_view name) const {
    for (std::size_t i = 0; i < feature_names.size(); ++i)
      if (feature_names[i] == name) return i;
    return std::nullopt;
  }

  /// Every column except `pair_id` and `label` is a feature.
  static FeatureTable from_table(const text::Table& t, bool require_label = true) {
    FeatureTable ft;
    const auto id_col = t.column("pair_id");
    const auto label_col = t.column("label");
    if (require_label && !label_col) throw SchemaError("label", "missing column");
    std::vector<std::size_t> cols;
    for (std::size_t c = 0; c < t.header.size(); ++c) {
      if (c == id_col || c == label_col) continue;
      ft.feature_names.push_back(t.header[c]);
      cols.push_back(c);
    }
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const auto& row = t.rows[r];
      ft.ids.push_back(id_col ? row[*id_col] : std::to_string(r));
      std::vector<std::string> v;
      for (auto c : cols) v.push_back(row[c]);
      ft.values.push_back(std::move(v));
      if (label_col) {
        auto a = parse_agreement(row[*label_col]);
        if (!a) throw SchemaError("label", "expected strict or notional, got '" + row[*label_col] + "'");
        ft.labels.push_back(*a);
      }
    }
    return ft;
  }

  FeatureTable subset(std::span<const std::size_t> rows) const {
    FeatureTable out;
    out.feature_names = feature_names;
    for (auto r : rows) {
      out.ids.push_back(ids[r]);
      out.values.push_back(values[r]);
      if (!labels.empty()) out.labels.push_back(labels[r]);
    }
    return out;
  }
};

class Encoding {
 public:
  static constexpr int kVersion = 1;

  Encoding() = default;
  explicit Encoding(std::vector<FeatureSpec> features) : features_(std::move(features)) {}

  /// Categories are collected from `table` and sorted. `is_numeric` decides
  /// the kind per column name; numeric cells must parse as numbers.
  static Encoding fit(const FeatureTable& table, const std::function<bool(std::string_view)>& is_numeric) {
    std::vector<FeatureSpec> specs;
    for (std::size_t f = 0; f < table.feature_names.size(); ++f) {
      FeatureSpec spec{table.feature_names[f], is_numeric(table.feature_names[f]) ? FeatureKind::numeric
                                                                                  : FeatureKind::categorical, {}};
      if (spec.kind == FeatureKind::categorical) {
        std::set<std::string> cats;
        for (const auto& row : table.values) cats.insert(row[f]);
        spec.categories.assign(cats.begin(), cats.end());
      }
      specs.push_back(std::move(spec));
    }
    return Encoding(std::move(specs));
  }

  const std::vector<FeatureSpec>& features() const { return features_; }

  std::size_t width() const {
    std::size_t w = 0;
    for (const auto& f : features_) w += f.kind == FeatureKind::numeric ? 1 : f.categories.size();
    return w;
  }

  /// Column names of the encoded matrix: `name` or `name=category`.
  std::vector<std::string> encoded_names() const {
    std::vector<std::string> out;
    for (const auto& f : features_) {
      if (f.kind == FeatureKind::numeric) out.push_back(f.name);
      else
        for (const auto& c : f.categories) out.push_back(f.name + "=" + c);
    }
    return out;
  }

  /// Index of the named feature owning each encoded column.
  std::vector<std::size_t> groups() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < features_.size(); ++i) {
      std::size_t n = features_[i].kind == FeatureKind::numeric ? 1 : features_[i].categories.size();
      out.insert(out.end(), n, i);
    }
    return out;
  }

  /// `values` are in feature order; `out` has width() entries.
  void encode_row(std::span<const std::string> values, std::span<double> out) const {
    if (values.size() != features_.size())
      throw EncodingError("row has " + std::to_string(values.size()) + " features, encoding expects " +
                          std::to_string(features_.size()));
    std::fill(out.begin(), out.end(), 0.0);
    std::size_t col = 0;
    for (std::size_t f = 0; f < features_.size(); ++f) {
      const auto& spec = features_[f];
      if (spec.kind == FeatureKind::numeric) {
        auto v = text::parse_double(values[f]);
        if (!v) throw SchemaError(spec.name, "not a number: '" + values[f] + "'");
        out[col++] = *v;
      } else {
        auto it = std::lower_bound(spec.categories.begin(), spec.categories.end(), values[f]);
        if (it != spec.categories.end() && *it == values[f]) out[col + (it - spec.categories.begin())] = 1.0;
        col += spec.categories.size();
      }
    }
  }

  /// Throws EncodingError unless `names` are exactly this encoding's features.
  void check_compatible(const std::vector<std::string>& names) const {
    std::vector<std::string> mine;
    for (const auto& f : features_) mine.push_back(f.name);
    if (mine != names)
      throw EncodingError("encoding v" + std::to_string(kVersion) + " expects features [" + text::join(mine, ",") +
                          "], got [" + text::join(names, ",") + "]");
  }

  friend bool operator==(const Encoding&, const Encoding&) = default;

 private:
  std::vector<FeatureSpec> features_;
};

/// Dense row-major matrix with labels.
struct Dataset {
  Encoding encoding;
  std::size_t width = 0;
  std::vector<double> x;
  std::vector<Agreement> y;

  std::size_t size() const { return y.size(); }
  std::span<const double> row(std::size_t i) const { return {x.data() + i * width, width}; }

  static Dataset encode(const FeatureTable& table, const Encoding& enc) {
    enc.check_compatible(table.feature_names);
    Dataset d;
    d.encoding = enc;
    d.width = enc.width();
    d.x.assign(table.size() * d.width, 0.0);
    for (std::size_t r = 0; r < table.size(); ++r)
      enc.encode_row(table.values[r], std::span<double>(d.x.data() + r * d.width, d.width));
    d.y = table.labels;
    return d;
  }

  /// Purely numeric dataset; used for synthetic data.
  static Dataset from_matrix(std::vector<std::vector<double>> rows, std::vector<Agreement> labels) {
    Dataset d;
    d.width = rows.empty() ? 0 : rows.front().size();
    std::vector<FeatureSpec> specs;
    for (std::size_t f = 0; f < d.width; ++f) specs.push_back({"x" + std::to_string(f), FeatureKind::numeric, {}});
    d.encoding = Encoding(std::move(specs));
    for (const auto& r : rows) d.x.insert(d.x.end(), r.begin(), r.end());
    d.y = std::move(labels);
    return d;
  }

  Dataset subset(std::span<const std::size_t> rows) const {
    Dataset d;
    d.encoding = encoding;
    d.width = width;
    for (auto r : rows) {
      auto src = row(r);
      d.x.insert(d.x.end(), src.begin(), src.end());
      d.y.push_back(y[r]);
    }
    return d;
  }
};

}  // namespace notional
