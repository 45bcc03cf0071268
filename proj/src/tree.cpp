#include "ragq/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ragq/errors.hpp"
#include "ragq/rng.hpp"

namespace ragq {

double RegressionTree::predict_row(std::span<const double> x) const {
  std::size_t i = 0;
  while (nodes_[i].feature >= 0) {
    const auto& n = nodes_[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes_[i].value;
}

std::size_t RegressionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.feature < 0; }));
}

int RegressionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<int> d(nodes_.size(), 0);
  int best = 0;
  // Children are always appended after their parent.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.feature >= 0) {
      d[static_cast<std::size_t>(n.left)] = d[i] + 1;
      d[static_cast<std::size_t>(n.right)] = d[i] + 1;
    }
    best = std::max(best, d[i]);
  }
  return best;
}

void RegressionTree::write(BinaryWriter& out) const {
  out.u64(nodes_.size());
  for (const auto& n : nodes_) {
    out.u64(static_cast<std::uint64_t>(n.feature));
    out.f64(n.threshold);
    out.u64(static_cast<std::uint64_t>(n.left));
    out.u64(static_cast<std::uint64_t>(n.right));
    out.f64(n.value);
  }
}

RegressionTree RegressionTree::read(BinaryReader& in) {
  RegressionTree t;
  const auto count = in.u64();
  for (std::uint64_t i = 0; i < count; ++i) {
    Node n;
    n.feature = static_cast<std::int64_t>(in.u64());
    n.threshold = in.f64();
    n.left = static_cast<std::int64_t>(in.u64());
    n.right = static_cast<std::int64_t>(in.u64());
    n.value = in.f64();
    t.nodes_.push_back(n);
  }
  const auto size = static_cast<std::int64_t>(t.nodes_.size());
  for (const auto& n : t.nodes_) {
    if (n.feature >= 0 && (n.left <= 0 || n.right <= 0 || n.left >= size || n.right >= size))
      throw ParseError("model file: corrupt tree structure", 0, 0);
  }
  if (t.nodes_.empty()) throw ParseError("model file: empty tree", 0, 0);
  return t;
}

SortedColumns::SortedColumns(const Matrix& x) : order_(x.cols()) {
  for (std::size_t c = 0; c < x.cols(); ++c) {
    auto& o = order_[c];
    o.resize(x.rows());
    std::iota(o.begin(), o.end(), std::uint32_t{0});
    std::stable_sort(o.begin(), o.end(), [&](std::uint32_t a, std::uint32_t b) { return x(a, c) < x(b, c); });
  }
}

namespace {

double split_point(double lo, double hi) {
  const double mid = lo + 0.5 * (hi - lo);
  return mid < hi ? mid : lo;
}

struct Candidate {
  double gain = -std::numeric_limits<double>::infinity();
  double threshold = 0.0;
  bool valid = false;
};

class ExactBuilder {
 public:
  ExactBuilder(const Matrix& x, std::span<const double> g, std::span<const double> h,
               const TreeParams& p, Exec exec)
      : x_(x), g_(g), h_(h), p_(p), exec_(exec), goes_left_(x.rows(), 0) {}

  void grow(RegressionTree& tree, std::size_t node, std::vector<std::vector<std::uint32_t>> lists,
            int depth) {
    const auto& rows = lists[0];
    const std::size_t n = rows.size();
    double G = 0.0, H = 0.0, energy = 0.0;
    for (auto r : rows) {
      G += g_[r];
      H += h_[r];
      if (h_[r] > 0.0) energy += g_[r] * g_[r] / h_[r];
    }
    const double denom = H + p_.lambda;
    tree.node(node).value = denom > 0.0 ? -G / denom : 0.0;

    const auto min_leaf = static_cast<std::size_t>(std::max(1, p_.min_leaf_samples));
    if (depth >= p_.max_depth || n < 2 * min_leaf || denom <= 0.0) return;
    const double parent = G * G / denom;
    // Gains closer than this are ties, so round-off from row order cannot pick the winner.
    const double tie = 1e-10 * energy;

    const std::size_t d = lists.size();
    std::vector<Candidate> best(d);
    parallel_for(exec_, d, [&](std::size_t f) {
      const auto& list = lists[f];
      Candidate c;
      double gl = 0.0, hl = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const auto r = list[i];
        gl += g_[r];
        hl += h_[r];
        if (i + 1 < min_leaf) continue;
        if (n - i - 1 < min_leaf) break;
        const double v = x_(r, f);
        const double vn = x_(list[i + 1], f);
        if (!(v < vn)) continue;
        const double dl = hl + p_.lambda;
        const double dr = (H - hl) + p_.lambda;
        if (dl <= 0.0 || dr <= 0.0) continue;
        const double gr = G - gl;
        const double gain = 0.5 * (gl * gl / dl + gr * gr / dr - parent) - p_.gamma;
        if (gain > c.gain + tie) {
          c.gain = gain;
          c.threshold = split_point(v, vn);
          c.valid = true;
        }
      }
      best[f] = c;
    });

    std::size_t chosen = d;
    for (std::size_t f = 0; f < d; ++f)
      if (best[f].valid && (chosen == d || best[f].gain > best[chosen].gain + tie)) chosen = f;
    // Gains below round-off of the node's total score are not real splits.
    if (chosen == d || !(best[chosen].gain > 1e-12 * energy)) return;

    const double thr = best[chosen].threshold;
    for (auto r : rows) goes_left_[r] = x_(r, chosen) <= thr ? 1 : 0;
    std::vector<std::vector<std::uint32_t>> left(d), right(d);
    for (std::size_t f = 0; f < d; ++f) {
      for (auto r : lists[f]) (goes_left_[r] ? left[f] : right[f]).push_back(r);
    }
    lists.clear();
    lists.shrink_to_fit();

    const auto li = tree.add({});
    const auto ri = tree.add({});
    auto& nd = tree.node(node);
    nd.feature = static_cast<std::int64_t>(chosen);
    nd.threshold = thr;
    nd.left = static_cast<std::int64_t>(li);
    nd.right = static_cast<std::int64_t>(ri);
    grow(tree, li, std::move(left), depth + 1);
    grow(tree, ri, std::move(right), depth + 1);
  }

 private:
  const Matrix& x_;
  std::span<const double> g_;
  std::span<const double> h_;
  TreeParams p_;
  Exec exec_;
  std::vector<char> goes_left_;
};

}  // namespace

RegressionTree build_exact_tree(const Matrix& x, const SortedColumns& sorted,
                                std::span<const double> grad, std::span<const double> hess,
                                const TreeParams& params, Exec exec) {
  if (grad.size() != x.rows() || hess.size() != x.rows())
    throw ArgumentError("tree: gradient/hessian length does not match rows");
  if (sorted.cols() != x.cols()) throw ArgumentError("tree: sorted columns do not match matrix");
  if (x.rows() == 0 || x.cols() == 0) throw ArgumentError("tree: empty training matrix");
  RegressionTree tree;
  tree.add({});
  std::vector<std::vector<std::uint32_t>> lists(x.cols());
  for (std::size_t c = 0; c < x.cols(); ++c) lists[c] = sorted.column(c);
  ExactBuilder(x, grad, hess, params, exec).grow(tree, 0, std::move(lists), 0);
  return tree;
}

namespace {

class RandomBuilder {
 public:
  RandomBuilder(const Matrix& x, std::span<const double> y, int max_depth, int min_split,
                std::uint64_t seed)
      : x_(x), y_(y), max_depth_(max_depth), min_split_(min_split), rng_(seed) {}

  void grow(RegressionTree& tree, std::size_t node, std::vector<std::uint32_t> rows, int depth) {
    const std::size_t n = rows.size();
    double sum = 0.0;
    for (auto r : rows) sum += y_[r];
    tree.node(node).value = sum / static_cast<double>(n);

    if (depth >= max_depth_ || n < static_cast<std::size_t>(std::max(2, min_split_))) return;
    bool pure = true;
    for (auto r : rows)
      if (y_[r] != y_[rows[0]]) {
        pure = false;
        break;
      }
    if (pure) return;

    const double parent = sum * sum / static_cast<double>(n);
    std::size_t chosen = x_.cols();
    double chosen_thr = 0.0;
    double chosen_gain = -std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < x_.cols(); ++f) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (auto r : rows) {
        lo = std::min(lo, x_(r, f));
        hi = std::max(hi, x_(r, f));
      }
      if (!(lo < hi)) continue;
      double thr = rng_.uniform(lo, hi);
      if (thr >= hi) thr = lo;
      double sl = 0.0;
      std::size_t nl = 0;
      for (auto r : rows)
        if (x_(r, f) <= thr) {
          sl += y_[r];
          ++nl;
        }
      const std::size_t nr = n - nl;
      const double sr = sum - sl;
      const double gain = sl * sl / static_cast<double>(nl) + sr * sr / static_cast<double>(nr) - parent;
      if (gain > chosen_gain) {
        chosen_gain = gain;
        chosen = f;
        chosen_thr = thr;
      }
    }
    if (chosen == x_.cols()) return;

    std::vector<std::uint32_t> left, right;
    for (auto r : rows) (x_(r, chosen) <= chosen_thr ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    const auto li = tree.add({});
    const auto ri = tree.add({});
    auto& nd = tree.node(node);
    nd.feature = static_cast<std::int64_t>(chosen);
    nd.threshold = chosen_thr;
    nd.left = static_cast<std::int64_t>(li);
    nd.right = static_cast<std::int64_t>(ri);
    grow(tree, li, std::move(left), depth + 1);
    grow(tree, ri, std::move(right), depth + 1);
  }

 private:
  const Matrix& x_;
  std::span<const double> y_;
  int max_depth_;
  int min_split_;
  Rng rng_;
};

}  // namespace

RegressionTree build_random_tree(const Matrix& x, std::span<const double> y, int max_depth,
                                 int min_samples_split, std::uint64_t seed) {
  if (y.size() != x.rows() || x.rows() == 0) throw ArgumentError("tree: target length does not match rows");
  RegressionTree tree;
  tree.add({});
  std::vector<std::uint32_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), std::uint32_t{0});
  RandomBuilder(x, y, max_depth, min_samples_split, seed).grow(tree, 0, std::move(rows), 0);
  return tree;
}

}  // namespace ragq
