#pragma once

// Reference Extra Trees used as an accuracy oracle. Written independently
// of the library: recursive growth, std distributions for all draws, and
// feature visiting in the style of common toolkits (visit features in a
// random order, skip constant ones, stop after K usable candidates).

#include <algorithm>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

namespace ref {

struct Node {
  int feature = -1;
  double threshold = 0.0;
  double p_positive = 0.0;
  std::unique_ptr<Node> left, right;
};

class ExtraTrees {
 public:
  ExtraTrees(int n_trees, int k, std::uint64_t seed) : n_trees_(n_trees), k_(k), rng_(seed) {}

  void fit(const std::vector<std::vector<double>>& x, const std::vector<int>& y) {
    x_ = &x;
    y_ = &y;
    trees_.clear();
    std::vector<int> rows(x.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<int>(i);
    for (int t = 0; t < n_trees_; ++t) trees_.push_back(grow(rows));
  }

  double proba(const std::vector<double>& row) const {
    double s = 0;
    for (const auto& t : trees_) {
      const Node* n = t.get();
      while (n->feature >= 0) n = row[n->feature] <= n->threshold ? n->left.get() : n->right.get();
      s += n->p_positive;
    }
    return s / static_cast<double>(trees_.size());
  }

  int predict(const std::vector<double>& row) const { return proba(row) > 0.5 ? 1 : 0; }

 private:
  static double impurity(double pos, double n) {
    if (n == 0) return 0;
    double p = pos / n;
    return 2 * p * (1 - p);
  }

  std::unique_ptr<Node> grow(const std::vector<int>& rows) {
    auto node = std::make_unique<Node>();
    double pos = 0;
    for (int r : rows) pos += (*y_)[r];
    const double n = static_cast<double>(rows.size());
    node->p_positive = pos / n;
    if (pos == 0 || pos == n || rows.size() < 2) return node;

    const int width = static_cast<int>((*x_)[0].size());
    std::vector<int> order(width);
    for (int f = 0; f < width; ++f) order[f] = f;
    std::shuffle(order.begin(), order.end(), rng_);

    double best = 1e300;
    int best_f = -1;
    double best_t = 0;
    int visited = 0;
    for (int f : order) {
      if (visited == k_) break;
      double lo = 1e300, hi = -1e300;
      for (int r : rows) {
        lo = std::min(lo, (*x_)[r][f]);
        hi = std::max(hi, (*x_)[r][f]);
      }
      if (!(lo < hi)) continue;
      ++visited;
      std::uniform_real_distribution<double> u(lo, hi);
      double t = u(rng_);
      if (t >= hi) t = lo;
      double lp = 0, ln = 0;
      for (int r : rows)
        if ((*x_)[r][f] <= t) {
          ln += 1;
          lp += (*y_)[r];
        }
      const double score = ln * impurity(lp, ln) + (n - ln) * impurity(pos - lp, n - ln);
      if (score < best) {
        best = score;
        best_f = f;
        best_t = t;
      }
    }
    if (best_f < 0) return node;

    std::vector<int> l, r;
    for (int row : rows) ((*x_)[row][best_f] <= best_t ? l : r).push_back(row);
    node->feature = best_f;
    node->threshold = best_t;
    node->left = grow(l);
    node->right = grow(r);
    return node;
  }

  int n_trees_;
  int k_;
  std::mt19937_64 rng_;
  const std::vector<std::vector<double>>* x_ = nullptr;
  const std::vector<int>* y_ = nullptr;
  std::vector<std::unique_ptr<Node>> trees_;
};

}  // namespace ref
