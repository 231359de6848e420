#pragma once

// Extremely randomized trees for the two-class agreement problem.
//
// Every tree sees all rows. At a node, K distinct candidates are drawn from
// the features that are non-constant on the node's rows (all of them when
// fewer than K remain), each candidate gets one uniform threshold strictly
// inside its (min, max), and the candidate with the largest Gini impurity
// decrease wins, the first drawn on ties. Rows with value <= threshold go
// left. Nodes are expanded depth-first, left before right, from a random
// stream derived from (seed, tree index).

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "notional/agreement.hpp"
#include "notional/dataset.hpp"
#include "notional/errors.hpp"
#include "notional/random.hpp"

namespace notional {

/// 1 - p0^2 - p1^2; zero for an empty node.
inline double gini(std::size_t n0, std::size_t n1) {
  const double n = static_cast<double>(n0 + n1);
  if (n == 0) return 0.0;
  const double p0 = static_cast<double>(n0) / n;
  const double p1 = static_cast<double>(n1) / n;
  return 1.0 - p0 * p0 - p1 * p1;
}

struct MaxFeatures {
  enum class Rule { sqrt, log2, all, fixed };
  Rule rule = Rule::sqrt;
  std::size_t value = 0;  // for Rule::fixed

  /// Candidates per node for an encoded width; sqrt and log2 round up.
  std::size_t resolve(std::size_t width) const {
    if (width == 0) return 0;
    std::size_t k = width;
    switch (rule) {
      case Rule::sqrt: k = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(width)))); break;
      case Rule::log2: k = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(width)))); break;
      case Rule::all: k = width; break;
      case Rule::fixed: k = value; break;
    }
    return std::clamp<std::size_t>(k, 1, width);
  }

  std::string str() const {
    switch (rule) {
      case Rule::sqrt: return "sqrt";
      case Rule::log2: return "log2";
      case Rule::all: return "all";
      case Rule::fixed: return std::to_string(value);
    }
    return "?";
  }

  static std::optional<MaxFeatures> parse(std::string_view s) {
    if (s == "sqrt") return MaxFeatures{Rule::sqrt, 0};
    if (s == "log2") return MaxFeatures{Rule::log2, 0};
    if (s == "all") return MaxFeatures{Rule::all, 0};
    auto v = text::parse_int(s);
    if (v && *v > 0) return MaxFeatures{Rule::fixed, static_cast<std::size_t>(*v)};
    return std::nullopt;
  }

  friend bool operator==(const MaxFeatures&, const MaxFeatures&) = default;
};

struct ForestParams {
  std::size_t n_trees = 300;
  std::optional<std::size_t> max_depth;  // nullopt = grow until pure
  MaxFeatures max_features;
  std::size_t min_samples_split = 2;

  friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

struct TreeNode {
  int feature = -1;  // -1 for leaves
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::array<std::uint32_t, 2> counts{0, 0};  // (strict, notional) rows reaching the node

  bool is_leaf() const { return feature < 0; }
  std::size_t total() const { return std::size_t{counts[0]} + counts[1]; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// nodes[0] is the root.
struct Tree {
  std::vector<TreeNode> nodes;

  const TreeNode& leaf_for(std::span<const double> x) const {
    const TreeNode* n = &nodes[0];
    while (!n->is_leaf()) n = &nodes[x[n->feature] <= n->threshold ? n->left : n->right];
    return *n;
  }
  std::size_t split_count() const {
    return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return !n.is_leaf(); }));
  }
  friend bool operator==(const Tree&, const Tree&) = default;
};

struct Prediction {
  Agreement label = Agreement::strict;
  double probability = 0.0;  // of notional
};

namespace et_detail {

struct Candidate {
  std::size_t feature;
  double lo;
  double hi;
};

inline Tree grow_tree(const Dataset& data, const ForestParams& params, std::size_t k, Rng rng) {
  Tree tree;
  const std::size_t width = data.width;
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  struct Pending {
    int node;
    std::size_t lo, hi;  // range in `order`
    std::size_t depth;
  };
  tree.nodes.emplace_back();
  std::vector<Pending> stack{{0, 0, order.size(), 0}};
  std::vector<double> mins(width), maxs(width);
  std::vector<Candidate> nonconst;

  while (!stack.empty()) {
    Pending cur = stack.back();
    stack.pop_back();
    const std::span<std::size_t> rows(order.data() + cur.lo, cur.hi - cur.lo);

    std::array<std::uint32_t, 2> counts{0, 0};
    for (auto r : rows) ++counts[static_cast<int>(data.y[r])];
    tree.nodes[cur.node].counts = counts;
    const std::size_t n = rows.size();

    if (counts[0] == 0 || counts[1] == 0 || n < params.min_samples_split ||
        (params.max_depth && cur.depth >= *params.max_depth))
      continue;

    std::fill(mins.begin(), mins.end(), INFINITY);
    std::fill(maxs.begin(), maxs.end(), -INFINITY);
    for (auto r : rows) {
      auto x = data.row(r);
      for (std::size_t f = 0; f < width; ++f) {
        mins[f] = std::min(mins[f], x[f]);
        maxs[f] = std::max(maxs[f], x[f]);
      }
    }
    nonconst.clear();
    for (std::size_t f = 0; f < width; ++f)
      if (mins[f] < maxs[f]) nonconst.push_back({f, mins[f], maxs[f]});
    if (nonconst.empty()) continue;

    std::size_t n_candidates = nonconst.size();
    if (nonconst.size() > k) {
      for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.below(nonconst.size() - i));
        std::swap(nonconst[i], nonconst[j]);
      }
      n_candidates = k;
    }

    const double parent = gini(counts[0], counts[1]);
    double best_score = -INFINITY;
    std::size_t best_feature = 0;
    double best_threshold = 0.0;
    for (std::size_t c = 0; c < n_candidates; ++c) {
      const auto& cand = nonconst[c];
      double t = cand.lo + rng.uniform01_open() * (cand.hi - cand.lo);
      if (!(t < cand.hi)) t = cand.lo;
      std::array<std::size_t, 2> left{0, 0};
      for (auto r : rows)
        if (data.row(r)[cand.feature] <= t) ++left[static_cast<int>(data.y[r])];
      const std::size_t nl = left[0] + left[1];
      const std::size_t nr = n - nl;
      const double score = parent - (static_cast<double>(nl) * gini(left[0], left[1]) +
                                     static_cast<double>(nr) * gini(counts[0] - left[0], counts[1] - left[1])) /
                                        static_cast<double>(n);
      if (score > best_score) {
        best_score = score;
        best_feature = cand.feature;
        best_threshold = t;
      }
    }

    auto mid = std::stable_partition(rows.begin(), rows.end(), [&](std::size_t r) {
      return data.row(r)[best_feature] <= best_threshold;
    });
    const std::size_t split = cur.lo + static_cast<std::size_t>(mid - rows.begin());

    const int left_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    const int right_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    auto& node = tree.nodes[cur.node];
    node.feature = static_cast<int>(best_feature);
    node.threshold = best_threshold;
    node.left = left_id;
    node.right = right_id;
    stack.push_back({right_id, split, cur.hi, cur.depth + 1});
    stack.push_back({left_id, cur.lo, split, cur.depth + 1});
  }
  return tree;
}

}  // namespace et_detail

class Forest {
 public:
  Forest() = default;
  Forest(ForestParams params, std::uint64_t seed, Encoding encoding, std::vector<Tree> trees)
      : params_(params), seed_(seed), encoding_(std::move(encoding)), trees_(std::move(trees)) {}

  const ForestParams& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }
  const Encoding& encoding() const { return encoding_; }
  const std::vector<Tree>& trees() const { return trees_; }

  /// Mean over trees of the leaf's notional frequency; notional iff > 0.5.
  Prediction predict(std::span<const double> x) const {
    if (x.size() != encoding_.width())
      throw EncodingError("vector width " + std::to_string(x.size()) + " does not match encoding width " +
                          std::to_string(encoding_.width()));
    double sum = 0.0;
    for (const auto& t : trees_) {
      const auto& leaf = t.leaf_for(x);
      sum += static_cast<double>(leaf.counts[1]) / static_cast<double>(leaf.total());
    }
    const double p = trees_.empty() ? 0.0 : sum / static_cast<double>(trees_.size());
    return {p > 0.5 ? Agreement::notional : Agreement::strict, p};
  }

  nlohmann::ordered_json to_json() const;
  static Forest from_json(const nlohmann::ordered_json& j);

  friend bool operator==(const Forest&, const Forest&) = default;

 private:
  ForestParams params_;
  std::uint64_t seed_ = 0;
  Encoding encoding_;
  std::vector<Tree> trees_;
};

/// Trees are grown independently, `threads` at a time (0 = hardware
/// concurrency); the result does not depend on the thread count.
inline Forest fit(const Dataset& data, const ForestParams& params, std::uint64_t seed, unsigned threads = 0) {
  if (data.size() == 0) throw Error("cannot fit a forest on an empty dataset");
  if (params.n_trees == 0) throw Error("n_trees must be positive");
  const std::size_t k = params.max_features.resolve(data.width);
  std::vector<Tree> trees(params.n_trees);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, params.n_trees));

  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t i = next++; i < params.n_trees; i = next++)
      trees[i] = et_detail::grow_tree(data, params, k, Rng::derive(seed, i));
  };
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  return Forest(params, seed, data.encoding, std::move(trees));
}

// ---- importances ---------------------------------------------------------

struct FeatureImportance {
  std::string name;
  double mean = 0.0;
  double std = 0.0;
};

struct ImportanceReport {
  std::vector<FeatureImportance> encoded;  // per encoded column
  std::vector<FeatureImportance> grouped;  // per named feature, one-hot members summed
  std::size_t informative_trees = 0;       // trees with a positive total impurity decrease
  bool degenerate() const { return informative_trees == 0; }
};

/// Weighted impurity decrease per encoded feature for one tree, normalized
/// to sum to 1. All zeros when the tree never decreases impurity.
inline std::vector<double> tree_importances(const Tree& tree, std::size_t width) {
  std::vector<double> imp(width, 0.0);
  const double root_n = static_cast<double>(tree.nodes[0].total());
  for (const auto& node : tree.nodes) {
    if (node.is_leaf()) continue;
    const auto& l = tree.nodes[node.left];
    const auto& r = tree.nodes[node.right];
    const double decrease = static_cast<double>(node.total()) * gini(node.counts[0], node.counts[1]) -
                            static_cast<double>(l.total()) * gini(l.counts[0], l.counts[1]) -
                            static_cast<double>(r.total()) * gini(r.counts[0], r.counts[1]);
    imp[node.feature] += decrease / root_n;
  }
  double total = 0.0;
  for (double v : imp) total += v;
  if (total > 0)
    for (double& v : imp) v /= total;
  return imp;
}

/// Mean and population standard deviation across the informative trees.
inline ImportanceReport importances(const Forest& forest) {
  const auto& enc = forest.encoding();
  const std::size_t width = enc.width();
  const auto names = enc.encoded_names();
  const auto groups = enc.groups();
  const std::size_t n_groups = enc.features().size();

  std::vector<std::vector<double>> per_tree;
  std::vector<std::vector<double>> per_tree_grouped;
  for (const auto& t : forest.trees()) {
    auto imp = tree_importances(t, width);
    double total = 0.0;
    for (double v : imp) total += v;
    if (total <= 0) continue;
    std::vector<double> g(n_groups, 0.0);
    for (std::size_t f = 0; f < width; ++f) g[groups[f]] += imp[f];
    per_tree.push_back(std::move(imp));
    per_tree_grouped.push_back(std::move(g));
  }

  auto summarize = [](const std::vector<std::vector<double>>& rows, std::size_t n, std::size_t col) {
    if (rows.empty()) return std::pair{0.0, 0.0};
    double mean = 0.0;
    for (const auto& r : rows) mean += r[col];
    mean /= static_cast<double>(rows.size());
    double var = 0.0;
    for (const auto& r : rows) var += (r[col] - mean) * (r[col] - mean);
    (void)n;
    return std::pair{mean, std::sqrt(var / static_cast<double>(rows.size()))};
  };

  ImportanceReport report;
  report.informative_trees = per_tree.size();
  for (std::size_t f = 0; f < width; ++f) {
    auto [m, s] = summarize(per_tree, width, f);
    report.encoded.push_back({names[f], m, s});
  }
  for (std::size_t g = 0; g < n_groups; ++g) {
    auto [m, s] = summarize(per_tree_grouped, n_groups, g);
    report.grouped.push_back({enc.features()[g].name, m, s});
  }
  return report;
}

// ---- serialization -------------------------------------------------------

inline nlohmann::ordered_json Forest::to_json() const {
  using nlohmann::ordered_json;
  ordered_json j;
  j["format"] = "notional-extra-trees";
  j["version"] = 1;
  j["seed"] = seed_;
  ordered_json p;
  p["n_trees"] = params_.n_trees;
  p["max_depth"] = params_.max_depth ? ordered_json(*params_.max_depth) : ordered_json(nullptr);
  p["max_features"] = params_.max_features.str();
  p["min_samples_split"] = params_.min_samples_split;
  j["params"] = p;
  ordered_json enc;
  enc["version"] = Encoding::kVersion;
  ordered_json feats = ordered_json::array();
  for (const auto& f : encoding_.features()) {
    ordered_json fj;
    fj["name"] = f.name;
    fj["kind"] = f.kind == FeatureKind::numeric ? "numeric" : "categorical";
    if (f.kind == FeatureKind::categorical) fj["categories"] = f.categories;
    feats.push_back(std::move(fj));
  }
  enc["features"] = std::move(feats);
  j["encoding"] = std::move(enc);
  ordered_json trees = ordered_json::array();
  for (const auto& t : trees_) {
    // [feature, threshold, left, right, n_strict, n_notional]
    ordered_json nodes = ordered_json::array();
    for (const auto& n : t.nodes)
      nodes.push_back(ordered_json::array({n.feature, n.threshold, n.left, n.right, n.counts[0], n.counts[1]}));
    trees.push_back(std::move(nodes));
  }
  j["trees"] = std::move(trees);
  return j;
}

inline Forest Forest::from_json(const nlohmann::ordered_json& j) {
  try {
    if (j.at("format") != "notional-extra-trees") throw EncodingError("not a forest model file");
    if (j.at("encoding").at("version").get<int>() != Encoding::kVersion)
      throw EncodingError("model encoding version " + j.at("encoding").at("version").dump() + " is not supported");
    ForestParams params;
    const auto& p = j.at("params");
    params.n_trees = p.at("n_trees").get<std::size_t>();
    if (!p.at("max_depth").is_null()) params.max_depth = p.at("max_depth").get<std::size_t>();
    auto mf = MaxFeatures::parse(p.at("max_features").get<std::string>());
    if (!mf) throw EncodingError("bad max_features in model file");
    params.max_features = *mf;
    params.min_samples_split = p.at("min_samples_split").get<std::size_t>();

    std::vector<FeatureSpec> specs;
    for (const auto& fj : j.at("encoding").at("features")) {
      FeatureSpec f;
      f.name = fj.at("name").get<std::string>();
      f.kind = fj.at("kind") == "numeric" ? FeatureKind::numeric : FeatureKind::categorical;
      if (f.kind == FeatureKind::categorical) f.categories = fj.at("categories").get<std::vector<std::string>>();
      specs.push_back(std::move(f));
    }
    std::vector<Tree> trees;
    for (const auto& tj : j.at("trees")) {
      Tree t;
      for (const auto& nj : tj) {
        TreeNode n;
        n.feature = nj.at(0).get<int>();
        n.threshold = nj.at(1).get<double>();
        n.left = nj.at(2).get<int>();
        n.right = nj.at(3).get<int>();
        n.counts = {nj.at(4).get<std::uint32_t>(), nj.at(5).get<std::uint32_t>()};
        t.nodes.push_back(n);
      }
      trees.push_back(std::move(t));
    }
    return Forest(params, j.at("seed").get<std::uint64_t>(), Encoding(std::move(specs)), std::move(trees));
  } catch (const nlohmann::json::exception& e) {
    throw EncodingError(std::string("malformed model file: ") + e.what());
  }
}

}  // namespace notional
