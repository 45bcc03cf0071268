#include "ragq/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ragq/errors.hpp"
#include "ragq/rng.hpp"

namespace ragq {

std::string to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::decision_tree: return "decision_tree";
    case BaselineKind::adaboost_r2: return "adaboost_r2";
    case BaselineKind::gbdt: return "gbdt";
    case BaselineKind::extra_trees: return "extra_trees";
    case BaselineKind::knn: return "knn";
  }
  return "unknown";
}

std::string display_name(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::decision_tree: return "DecisionTrees";
    case BaselineKind::adaboost_r2: return "AdaBoost";
    case BaselineKind::gbdt: return "GBDT";
    case BaselineKind::extra_trees: return "ExtraTrees";
    case BaselineKind::knn: return "KNN";
  }
  return "unknown";
}

BaselineConfig BaselineConfig::defaults(BaselineKind kind, std::uint64_t seed) {
  BaselineConfig c;
  c.kind = kind;
  c.seed = seed;
  switch (kind) {
    case BaselineKind::decision_tree:
      c.max_depth = 6;
      c.min_samples_leaf = 2;
      break;
    case BaselineKind::adaboost_r2:
      c.max_depth = 3;
      c.n_estimators = 50;
      break;
    case BaselineKind::gbdt:
      c.max_depth = 3;
      c.n_estimators = 200;
      c.learning_rate = 0.1;
      break;
    case BaselineKind::extra_trees:
      c.max_depth = 10;
      c.n_estimators = 100;
      break;
    case BaselineKind::knn:
      c.k = 5;
      break;
  }
  return c;
}

void BaselineConfig::validate() const {
  switch (kind) {
    case BaselineKind::decision_tree:
      if (max_depth < 0) throw ArgumentError("decision_tree: max_depth must be >= 0");
      if (min_samples_leaf < 1) throw ArgumentError("decision_tree: min_samples_leaf must be >= 1");
      break;
    case BaselineKind::adaboost_r2:
      if (max_depth < 0) throw ArgumentError("adaboost_r2: max_depth must be >= 0");
      if (n_estimators < 1) throw ArgumentError("adaboost_r2: n_estimators must be >= 1");
      break;
    case BaselineKind::gbdt:
      if (max_depth < 0) throw ArgumentError("gbdt: max_depth must be >= 0");
      if (n_estimators < 0) throw ArgumentError("gbdt: n_estimators must be >= 0");
      if (!(learning_rate > 0.0)) throw ArgumentError("gbdt: learning_rate must be > 0");
      break;
    case BaselineKind::extra_trees:
      if (max_depth < 0) throw ArgumentError("extra_trees: max_depth must be >= 0");
      if (n_estimators < 1) throw ArgumentError("extra_trees: n_estimators must be >= 1");
      break;
    case BaselineKind::knn:
      if (k < 1) throw ArgumentError("knn: k must be >= 1");
      break;
  }
}

// ---------------------------------------------------------------------------

DecisionTreeRegressor::DecisionTreeRegressor(int max_depth, int min_samples_leaf, Exec exec)
    : max_depth_(max_depth), min_samples_leaf_(min_samples_leaf), exec_(exec) {
  if (max_depth_ < 0 || min_samples_leaf_ < 1) throw ArgumentError("decision_tree: invalid settings");
}

void DecisionTreeRegressor::do_fit(const Matrix& x, std::span<const double> y) {
  std::vector<double> grad(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) grad[i] = -y[i];
  const std::vector<double> hess(y.size(), 1.0);
  tree_ = build_exact_tree(x, SortedColumns(x), grad, hess,
                           TreeParams{max_depth_, 0.0, 0.0, min_samples_leaf_}, exec_);
}

std::vector<double> DecisionTreeRegressor::do_predict(const Matrix& x) const {
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = tree_.predict_row(x.row(i));
  return out;
}

void DecisionTreeRegressor::write_body(BinaryWriter& out) const {
  out.u64(static_cast<std::uint64_t>(max_depth_));
  out.u64(static_cast<std::uint64_t>(min_samples_leaf_));
  tree_.write(out);
}

void DecisionTreeRegressor::read_body(BinaryReader& in) {
  max_depth_ = static_cast<int>(in.u64());
  min_samples_leaf_ = static_cast<int>(in.u64());
  tree_ = RegressionTree::read(in);
}

// ---------------------------------------------------------------------------

AdaBoostR2Regressor::AdaBoostR2Regressor(int n_estimators, int max_depth, Exec exec)
    : n_estimators_(n_estimators), max_depth_(max_depth), exec_(exec) {
  if (n_estimators_ < 1 || max_depth_ < 0) throw ArgumentError("adaboost_r2: invalid settings");
}

void AdaBoostR2Regressor::do_fit(const Matrix& x, std::span<const double> y) {
  const std::size_t n = x.rows();
  trees_.clear();
  weights_.clear();
  const SortedColumns sorted(x);
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<double> grad(n);
  std::vector<double> err(n);

  for (int round = 0; round < n_estimators_; ++round) {
    for (std::size_t i = 0; i < n; ++i) grad[i] = -w[i] * y[i];
    auto tree = build_exact_tree(x, sorted, grad, w, TreeParams{max_depth_, 0.0, 0.0, 1}, exec_);

    double max_err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      err[i] = std::abs(tree.predict_row(x.row(i)) - y[i]);
      max_err = std::max(max_err, err[i]);
    }
    if (max_err == 0.0) {
      // Perfect fit: keep it with unit weight and stop.
      trees_.push_back(std::move(tree));
      weights_.push_back(1.0);
      break;
    }
    double avg_loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      err[i] /= max_err;
      avg_loss += w[i] * err[i];
    }
    if (avg_loss >= 0.5) {
      if (trees_.empty()) {
        trees_.push_back(std::move(tree));
        weights_.push_back(1.0);
      }
      break;
    }
    const double beta = avg_loss / (1.0 - avg_loss);
    trees_.push_back(std::move(tree));
    weights_.push_back(std::log(1.0 / beta));

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] *= std::pow(beta, 1.0 - err[i]);
      total += w[i];
    }
    if (!(total > 0.0)) break;
    for (auto& v : w) v /= total;
  }
}

std::vector<double> AdaBoostR2Regressor::do_predict(const Matrix& x) const {
  std::vector<double> out(x.rows());
  const std::size_t m = trees_.size();
  double total_w = 0.0;
  for (double v : weights_) total_w += v;
  parallel_for(exec_, x.rows(), [&](std::size_t i) {
    std::vector<std::pair<double, double>> pw(m);
    for (std::size_t t = 0; t < m; ++t) pw[t] = {trees_[t].predict_row(x.row(i)), weights_[t]};
    std::stable_sort(pw.begin(), pw.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    double cum = 0.0;
    double pick = pw.back().first;
    for (const auto& [pred, wt] : pw) {
      cum += wt;
      if (cum >= 0.5 * total_w) {
        pick = pred;
        break;
      }
    }
    out[i] = pick;
  });
  return out;
}

void AdaBoostR2Regressor::write_body(BinaryWriter& out) const {
  out.u64(static_cast<std::uint64_t>(n_estimators_));
  out.u64(static_cast<std::uint64_t>(max_depth_));
  out.f64s(weights_);
  out.u64(trees_.size());
  for (const auto& t : trees_) t.write(out);
}

void AdaBoostR2Regressor::read_body(BinaryReader& in) {
  n_estimators_ = static_cast<int>(in.u64());
  max_depth_ = static_cast<int>(in.u64());
  weights_ = in.f64s();
  const auto count = in.u64();
  trees_.clear();
  for (std::uint64_t i = 0; i < count; ++i) trees_.push_back(RegressionTree::read(in));
  if (trees_.size() != weights_.size() || trees_.empty())
    throw ParseError("model file: adaboost member count mismatch", 0, 0);
}

// ---------------------------------------------------------------------------

ExtraTreesRegressor::ExtraTreesRegressor(int n_trees, int max_depth, std::uint64_t seed, Exec exec)
    : n_trees_(n_trees), max_depth_(max_depth), seed_(seed), exec_(exec) {
  if (n_trees_ < 1 || max_depth_ < 0) throw ArgumentError("extra_trees: invalid settings");
}

void ExtraTreesRegressor::do_fit(const Matrix& x, std::span<const double> y) {
  trees_.assign(static_cast<std::size_t>(n_trees_), RegressionTree{});
  parallel_for(exec_, trees_.size(), [&](std::size_t t) {
    trees_[t] = build_random_tree(x, y, max_depth_, 2, mix_seed(seed_, t));
  });
}

std::vector<double> ExtraTreesRegressor::do_predict(const Matrix& x) const {
  std::vector<double> out(x.rows());
  parallel_for(exec_, x.rows(), [&](std::size_t i) {
    double s = 0.0;
    for (const auto& t : trees_) s += t.predict_row(x.row(i));
    out[i] = s / static_cast<double>(trees_.size());
  });
  return out;
}

void ExtraTreesRegressor::write_body(BinaryWriter& out) const {
  out.u64(static_cast<std::uint64_t>(n_trees_));
  out.u64(static_cast<std::uint64_t>(max_depth_));
  out.u64(seed_);
  out.u64(trees_.size());
  for (const auto& t : trees_) t.write(out);
}

void ExtraTreesRegressor::read_body(BinaryReader& in) {
  n_trees_ = static_cast<int>(in.u64());
  max_depth_ = static_cast<int>(in.u64());
  seed_ = in.u64();
  const auto count = in.u64();
  trees_.clear();
  for (std::uint64_t i = 0; i < count; ++i) trees_.push_back(RegressionTree::read(in));
  if (trees_.empty()) throw ParseError("model file: extra_trees has no members", 0, 0);
}

// ---------------------------------------------------------------------------

KnnRegressor::KnnRegressor(int k, Exec exec) : k_(k), exec_(exec) {
  if (k_ < 1) throw ArgumentError("knn: k must be >= 1");
}

void KnnRegressor::do_fit(const Matrix& x, std::span<const double> y) {
  if (static_cast<std::size_t>(k_) > x.rows())
    throw ArgumentError("knn: k = " + std::to_string(k_) + " exceeds training rows (" +
                        std::to_string(x.rows()) + ")");
  train_x_ = x;
  train_y_.assign(y.begin(), y.end());
}

std::vector<double> KnnRegressor::do_predict(const Matrix& x) const {
  const std::size_t n = train_x_.rows();
  const auto k = static_cast<std::size_t>(k_);
  std::vector<double> out(x.rows());
  parallel_for(exec_, x.rows(), [&](std::size_t q) {
    std::vector<std::pair<double, std::size_t>> dist(n);
    const auto query = x.row(q);
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = train_x_.row(i);
      double s = 0.0;
      for (std::size_t c = 0; c < r.size(); ++c) {
        const double d = r[c] - query[c];
        s += d * d;
      }
      dist[i] = {s, i};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) s += train_y_[dist[j].second];
    out[q] = s / static_cast<double>(k);
  });
  return out;
}

void KnnRegressor::write_body(BinaryWriter& out) const {
  out.u64(static_cast<std::uint64_t>(k_));
  out.u64(train_x_.rows());
  out.u64(train_x_.cols());
  out.f64s(train_x_.data());
  out.f64s(train_y_);
}

void KnnRegressor::read_body(BinaryReader& in) {
  k_ = static_cast<int>(in.u64());
  const auto rows = in.u64();
  const auto cols = in.u64();
  train_x_ = Matrix(rows, cols, in.f64s());
  train_y_ = in.f64s();
  if (train_y_.size() != rows || k_ < 1 || static_cast<std::uint64_t>(k_) > rows)
    throw ParseError("model file: inconsistent knn payload", 0, 0);
}

// ---------------------------------------------------------------------------

RegressorPtr make_baseline(const BaselineConfig& cfg, Exec exec) {
  cfg.validate();
  switch (cfg.kind) {
    case BaselineKind::decision_tree:
      return std::make_unique<DecisionTreeRegressor>(cfg.max_depth, cfg.min_samples_leaf, exec);
    case BaselineKind::adaboost_r2:
      return std::make_unique<AdaBoostR2Regressor>(cfg.n_estimators, cfg.max_depth, exec);
    case BaselineKind::gbdt: {
      GbtConfig g;
      g.learning_rate = cfg.learning_rate;
      g.max_depth = cfg.max_depth;
      g.leaf_l2 = 0.0;
      g.split_gain_floor = 0.0;
      g.n_rounds = cfg.n_estimators;
      g.min_leaf_samples = 1;
      g.seed = cfg.seed;
      return std::make_unique<GbtRegressor>(g, exec);
    }
    case BaselineKind::extra_trees:
      return std::make_unique<ExtraTreesRegressor>(cfg.n_estimators, cfg.max_depth, cfg.seed, exec);
    case BaselineKind::knn:
      return std::make_unique<KnnRegressor>(cfg.k, exec);
  }
  throw ArgumentError("unknown baseline kind");
}

RegressorPtr baseline_fit(const Matrix& x, std::span<const double> y, const BaselineConfig& cfg, Exec exec) {
  auto model = make_baseline(cfg, exec);
  model->fit(x, y);
  return model;
}

}  // namespace ragq
