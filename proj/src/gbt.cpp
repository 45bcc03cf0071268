#include "ragq/gbt.hpp"

#include <cmath>

#include "ragq/errors.hpp"

namespace ragq {

void GbtConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw ArgumentError("gbt: learning_rate must be > 0");
  if (max_depth < 0) throw ArgumentError("gbt: max_depth must be >= 0");
  if (!(leaf_l2 >= 0.0)) throw ArgumentError("gbt: leaf_l2 must be >= 0");
  if (!(split_gain_floor >= 0.0)) throw ArgumentError("gbt: split_gain_floor must be >= 0");
  if (n_rounds < 0) throw ArgumentError("gbt: n_rounds must be >= 0");
  if (min_leaf_samples < 1) throw ArgumentError("gbt: min_leaf_samples must be >= 1");
}

GbtConfig GbtConfig::from_position(std::span<const double> position, const GbtConfig& base) {
  if (position.size() != 3) throw ArgumentError("gbt: expected a 3-dimensional position");
  GbtConfig cfg = base;
  cfg.learning_rate = position[0];
  cfg.max_depth = static_cast<int>(std::lround(position[1]));
  cfg.leaf_l2 = position[2];
  return cfg;
}

GbtRegressor::GbtRegressor(GbtConfig cfg, Exec exec) : cfg_(cfg), exec_(exec) { cfg_.validate(); }

namespace {

double mse(std::span<const double> pred, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = pred[i] - y[i];
    s += d * d;
  }
  return s / static_cast<double>(y.size());
}

}  // namespace

void GbtRegressor::do_fit(const Matrix& x, std::span<const double> y) {
  const std::size_t n = x.rows();
  double sum = 0.0;
  for (double v : y) sum += v;
  base_ = sum / static_cast<double>(n);
  trees_.clear();
  loss_.clear();

  std::vector<double> pred(n, base_);
  loss_.push_back(mse(pred, y));
  if (cfg_.n_rounds == 0) return;

  const SortedColumns sorted(x);
  const TreeParams params{cfg_.max_depth, cfg_.leaf_l2, cfg_.split_gain_floor, cfg_.min_leaf_samples};
  std::vector<double> grad(n);
  const std::vector<double> hess(n, 1.0);
  for (int round = 0; round < cfg_.n_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) grad[i] = pred[i] - y[i];
    auto tree = build_exact_tree(x, sorted, grad, hess, params, exec_);
    for (std::size_t i = 0; i < n; ++i) pred[i] += cfg_.learning_rate * tree.predict_row(x.row(i));
    trees_.push_back(std::move(tree));
    loss_.push_back(mse(pred, y));
  }
}

std::vector<double> GbtRegressor::do_predict(const Matrix& x) const {
  std::vector<double> out(x.rows(), base_);
  parallel_for(exec_, x.rows(), [&](std::size_t i) {
    double p = base_;
    for (const auto& t : trees_) p += cfg_.learning_rate * t.predict_row(x.row(i));
    out[i] = p;
  });
  return out;
}

void GbtRegressor::write_body(BinaryWriter& out) const {
  out.f64(cfg_.learning_rate);
  out.u64(static_cast<std::uint64_t>(cfg_.max_depth));
  out.f64(cfg_.leaf_l2);
  out.f64(cfg_.split_gain_floor);
  out.u64(static_cast<std::uint64_t>(cfg_.n_rounds));
  out.u64(static_cast<std::uint64_t>(cfg_.min_leaf_samples));
  out.u64(cfg_.seed);
  out.f64(base_);
  out.u64(trees_.size());
  for (const auto& t : trees_) t.write(out);
}

void GbtRegressor::read_body(BinaryReader& in) {
  cfg_.learning_rate = in.f64();
  cfg_.max_depth = static_cast<int>(in.u64());
  cfg_.leaf_l2 = in.f64();
  cfg_.split_gain_floor = in.f64();
  cfg_.n_rounds = static_cast<int>(in.u64());
  cfg_.min_leaf_samples = static_cast<int>(in.u64());
  cfg_.seed = in.u64();
  base_ = in.f64();
  const auto count = in.u64();
  trees_.clear();
  for (std::uint64_t i = 0; i < count; ++i) trees_.push_back(RegressionTree::read(in));
  loss_.clear();
}

RegressorPtr gbt_fit(const Matrix& x, std::span<const double> y, const GbtConfig& cfg, Exec exec) {
  auto model = std::make_unique<GbtRegressor>(cfg, exec);
  model->fit(x, y);
  return model;
}

}  // namespace ragq
