#pragma once

// Recursive partitioner for 0/1 feature matrices. It consumes random draws
// exactly as the forest does (K candidates by partial Fisher-Yates, one
// uniform per candidate) but splits on x == 0 versus x == 1 without using
// the drawn value, so it serves as an oracle for tree structure.

#include <cstdint>
#include <string>
#include <vector>

#include "notional/extra_trees.hpp"
#include "notional/random.hpp"

namespace oracle {

struct Split {
  int feature = -1;  // -1 for leaves
  std::size_t n0 = 0, n1 = 0;
  int left = -1, right = -1;
};

class BinaryPartitioner {
 public:
  BinaryPartitioner(const std::vector<std::vector<int>>& x, const std::vector<int>& y, std::size_t k)
      : x_(x), y_(y), k_(k) {}

  std::vector<Split> grow(notional::Rng rng) {
    nodes_.clear();
    std::vector<std::size_t> rows(x_.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    build(rows, rng);
    return nodes_;
  }

 private:
  static double gini(double a, double b) {
    double n = a + b;
    if (n == 0) return 0;
    return 1 - (a / n) * (a / n) - (b / n) * (b / n);
  }

  int build(const std::vector<std::size_t>& rows, notional::Rng& rng) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    std::size_t n1 = 0;
    for (auto r : rows) n1 += y_[r];
    const std::size_t n0 = rows.size() - n1;
    nodes_[id].n0 = n0;
    nodes_[id].n1 = n1;
    if (n0 == 0 || n1 == 0 || rows.size() < 2) return id;

    std::vector<std::size_t> usable;
    for (std::size_t f = 0; f < x_[0].size(); ++f) {
      bool zero = false, one = false;
      for (auto r : rows) (x_[r][f] ? one : zero) = true;
      if (zero && one) usable.push_back(f);
    }
    if (usable.empty()) return id;
    std::size_t m = usable.size();
    if (m > k_) {
      for (std::size_t i = 0; i < k_; ++i) std::swap(usable[i], usable[i + rng.below(usable.size() - i)]);
      m = k_;
    }
    const double parent = gini(static_cast<double>(n0), static_cast<double>(n1));
    double best = -1e300;
    std::size_t best_f = 0;
    for (std::size_t c = 0; c < m; ++c) {
      (void)rng.uniform01_open();
      double l0 = 0, l1 = 0;
      for (auto r : rows)
        if (!x_[r][usable[c]]) (y_[r] ? l1 : l0) += 1;
      const double nl = l0 + l1, nr = static_cast<double>(rows.size()) - nl;
      const double score = parent - (nl * gini(l0, l1) + nr * gini(static_cast<double>(n0) - l0,
                                                                      static_cast<double>(n1) - l1)) /
                                        static_cast<double>(rows.size());
      if (score > best) {
        best = score;
        best_f = usable[c];
      }
    }
    std::vector<std::size_t> l, r;
    for (auto row : rows) (x_[row][best_f] ? r : l).push_back(row);
    nodes_[id].feature = static_cast<int>(best_f);
    const int left = build(l, rng);
    const int right = build(r, rng);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  const std::vector<std::vector<int>>& x_;
  const std::vector<int>& y_;
  std::size_t k_;
  std::vector<Split> nodes_;
};

/// Walks both trees from the root; empty string when they agree on every
/// node's feature and class counts, otherwise a description of the first
/// difference.
inline std::string compare(const notional::Tree& tree, const std::vector<Split>& ref, int t = 0, int r = 0) {
  const auto& a = tree.nodes[static_cast<std::size_t>(t)];
  const auto& b = ref[static_cast<std::size_t>(r)];
  const std::string at = "tree node " + std::to_string(t) + " / oracle node " + std::to_string(r);
  if (a.counts[0] != b.n0 || a.counts[1] != b.n1) return at + ": class counts differ";
  if (a.feature != b.feature) return at + ": split feature " + std::to_string(a.feature) + " vs " + std::to_string(b.feature);
  if (a.is_leaf()) return {};
  if (auto d = compare(tree, ref, a.left, b.left); !d.empty()) return d;
  return compare(tree, ref, a.right, b.right);
}

}  // namespace oracle
