#include "ragq/bilstm.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>

#include "ragq/data_model.hpp"
#include "ragq/errors.hpp"
#include "ragq/rng.hpp"

namespace ragq {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

SequenceShape sequence_shape(SeqLayout layout, std::size_t feature_count) {
  if (feature_count == 0) throw ArgumentError("bilstm: no input features");
  if (layout == SeqLayout::flat_steps) return {feature_count, 1};
  constexpr std::size_t steps = FeatureSchema::kFeatureCount;
  if (feature_count % steps != 0)
    throw ArgumentError("bilstm: per_feature_steps needs a multiple of 7 columns, got " +
                        std::to_string(feature_count));
  return {steps, feature_count / steps};
}

void BilstmConfig::validate() const {
  if (hidden_units < 1) throw ArgumentError("bilstm: hidden_units must be >= 1");
  if (!(initial_lr > 0.0) || !std::isfinite(initial_lr)) throw ArgumentError("bilstm: initial_lr must be > 0");
  if (!(l2_coefficient >= 0.0)) throw ArgumentError("bilstm: l2_coefficient must be >= 0");
  if (max_epochs < 1) throw ArgumentError("bilstm: max_epochs must be >= 1");
  if (!(grad_clip_norm > 0.0)) throw ArgumentError("bilstm: grad_clip_norm must be > 0");
  if (lr_drop_epoch > max_epochs) throw ArgumentError("bilstm: lr_drop_epoch exceeds max_epochs");
  if (!(lr_drop_factor > 0.0)) throw ArgumentError("bilstm: lr_drop_factor must be > 0");
}

BilstmConfig BilstmConfig::from_position(std::span<const double> position, const BilstmConfig& base) {
  if (position.size() != 3) throw ArgumentError("bilstm: expected a 3-dimensional position");
  BilstmConfig cfg = base;
  cfg.l2_coefficient = position[0];
  cfg.initial_lr = position[1];
  cfg.hidden_units = static_cast<int>(std::lround(position[2]));
  return cfg;
}

// ---------------------------------------------------------------------------
// Parameters

namespace {

MatrixXd orthogonal(Index n, Rng& rng) {
  MatrixXd a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = rng.normal();
  Eigen::HouseholderQR<MatrixXd> qr(a);
  MatrixXd q = qr.householderQ() * MatrixXd::Identity(n, n);
  const MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

LstmCellParams init_cell(Index channels, Index hidden, Rng& rng) {
  LstmCellParams p = LstmCellParams::zeros(channels, hidden);
  const double bound = 1.0 / std::sqrt(static_cast<double>(channels));
  for (Index i = 0; i < p.w_input.rows(); ++i)
    for (Index j = 0; j < p.w_input.cols(); ++j) p.w_input(i, j) = rng.uniform(-bound, bound);
  for (Index gate = 0; gate < 4; ++gate) p.w_hidden.block(gate * hidden, 0, hidden, hidden) = orthogonal(hidden, rng);
  p.bias.segment(hidden, hidden).setOnes();
  return p;
}

void append(VectorXd& flat, Index& pos, const MatrixXd& m) {
  flat.segment(pos, m.size()) = Eigen::Map<const VectorXd>(m.data(), m.size());
  pos += m.size();
}

void extract(const VectorXd& flat, Index& pos, MatrixXd& m) {
  m = Eigen::Map<const MatrixXd>(flat.data() + pos, m.rows(), m.cols());
  pos += m.size();
}

void extract(const VectorXd& flat, Index& pos, VectorXd& v) {
  v = flat.segment(pos, v.size());
  pos += v.size();
}

Index packed_size(const BilstmParams& p) {
  const auto cell = [](const LstmCellParams& c) { return c.w_input.size() + c.w_hidden.size() + c.bias.size(); };
  return cell(p.forward) + cell(p.reverse) + p.w_out.size() + 1;
}

}  // namespace

BilstmParams BilstmParams::initialize(Index channels, Index hidden, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "bilstm.init"));
  BilstmParams p;
  p.forward = init_cell(channels, hidden, rng);
  p.reverse = init_cell(channels, hidden, rng);
  p.w_out.resize(2 * hidden);
  const double bound = 1.0 / std::sqrt(static_cast<double>(2 * hidden));
  for (Index i = 0; i < p.w_out.size(); ++i) p.w_out(i) = rng.uniform(-bound, bound);
  p.b_out = 0.0;
  return p;
}

VectorXd BilstmParams::flatten() const {
  VectorXd flat(packed_size(*this));
  Index pos = 0;
  for (const auto* c : {&forward, &reverse}) {
    append(flat, pos, c->w_input);
    append(flat, pos, c->w_hidden);
    append(flat, pos, c->bias);
  }
  append(flat, pos, w_out);
  flat(pos) = b_out;
  return flat;
}

void BilstmParams::unflatten(const VectorXd& flat) {
  if (flat.size() != packed_size(*this)) throw ArgumentError("bilstm: packed parameter size mismatch");
  Index pos = 0;
  for (auto* c : {&forward, &reverse}) {
    extract(flat, pos, c->w_input);
    extract(flat, pos, c->w_hidden);
    extract(flat, pos, c->bias);
  }
  extract(flat, pos, w_out);
  b_out = flat(pos);
}

VectorXd BilstmParams::weight_mask() const {
  VectorXd mask = VectorXd::Zero(packed_size(*this));
  Index pos = 0;
  for (const auto* c : {&forward, &reverse}) {
    mask.segment(pos, c->w_input.size() + c->w_hidden.size()).setOnes();
    pos += c->w_input.size() + c->w_hidden.size() + c->bias.size();
  }
  mask.segment(pos, w_out.size()).setOnes();
  return mask;
}

// ---------------------------------------------------------------------------
// Batched forward / backward

namespace {

// Per-step input matrices (channels x N).
std::vector<MatrixXd> step_inputs(const Matrix& x, SequenceShape shape) {
  if (x.cols() != shape.steps * shape.channels) throw ArgumentError("bilstm: feature width does not match layout");
  const auto n = static_cast<Index>(x.rows());
  std::vector<MatrixXd> xs(shape.steps, MatrixXd(static_cast<Index>(shape.channels), n));
  for (Index s = 0; s < n; ++s) {
    const auto row = x.row(static_cast<std::size_t>(s));
    for (std::size_t t = 0; t < shape.steps; ++t)
      for (std::size_t ch = 0; ch < shape.channels; ++ch)
        xs[t](static_cast<Index>(ch), s) = row[t * shape.channels + ch];
  }
  return xs;
}

struct DirectionCache {
  // Index s in [1, T] holds the state after the s-th processed step; index 0
  // is the zero initial state.
  std::vector<MatrixXd> h, c, tanh_c;
  std::vector<MatrixXd> gi, gf, go, gg;
  std::vector<std::size_t> order;  // input step consumed at processed step s
};

MatrixXd sigmoid(const MatrixXd& z) { return (1.0 / (1.0 + (-z.array()).exp())).matrix(); }

void run_direction(const LstmCellParams& p, const std::vector<MatrixXd>& xs, bool reverse,
                   DirectionCache& cache) {
  const std::size_t steps = xs.size();
  const Index hs = p.hidden_size();
  const Index n = xs.front().cols();
  cache.order.resize(steps);
  for (std::size_t s = 0; s < steps; ++s) cache.order[s] = reverse ? steps - 1 - s : s;
  cache.h.assign(steps + 1, MatrixXd::Zero(hs, n));
  cache.c.assign(steps + 1, MatrixXd::Zero(hs, n));
  cache.tanh_c.assign(steps + 1, MatrixXd());
  cache.gi.assign(steps + 1, MatrixXd());
  cache.gf.assign(steps + 1, MatrixXd());
  cache.go.assign(steps + 1, MatrixXd());
  cache.gg.assign(steps + 1, MatrixXd());
  for (std::size_t s = 1; s <= steps; ++s) {
    MatrixXd z = p.w_input * xs[cache.order[s - 1]] + p.w_hidden * cache.h[s - 1];
    z.colwise() += p.bias;
    cache.gi[s] = sigmoid(z.middleRows(0, hs));
    cache.gf[s] = sigmoid(z.middleRows(hs, hs));
    cache.go[s] = sigmoid(z.middleRows(2 * hs, hs));
    cache.gg[s] = z.middleRows(3 * hs, hs).array().tanh().matrix();
    cache.c[s] = (cache.gf[s].array() * cache.c[s - 1].array() + cache.gi[s].array() * cache.gg[s].array()).matrix();
    cache.tanh_c[s] = cache.c[s].array().tanh().matrix();
    cache.h[s] = (cache.go[s].array() * cache.tanh_c[s].array()).matrix();
  }
}

void backprop_direction(const LstmCellParams& p, const std::vector<MatrixXd>& xs, const DirectionCache& cache,
                        MatrixXd dh, LstmCellParams& grad) {
  const Index hs = p.hidden_size();
  const Index n = dh.cols();
  MatrixXd dc = MatrixXd::Zero(hs, n);
  MatrixXd dz(4 * hs, n);
  for (std::size_t s = cache.order.size(); s >= 1; --s) {
    const auto& tc = cache.tanh_c[s];
    const auto& gi = cache.gi[s];
    const auto& gf = cache.gf[s];
    const auto& go = cache.go[s];
    const auto& gg = cache.gg[s];
    dc.array() += dh.array() * go.array() * (1.0 - tc.array().square());
    dz.middleRows(0, hs) = (dc.array() * gg.array() * gi.array() * (1.0 - gi.array())).matrix();
    dz.middleRows(hs, hs) = (dc.array() * cache.c[s - 1].array() * gf.array() * (1.0 - gf.array())).matrix();
    dz.middleRows(2 * hs, hs) = (dh.array() * tc.array() * go.array() * (1.0 - go.array())).matrix();
    dz.middleRows(3 * hs, hs) = (dc.array() * gi.array() * (1.0 - gg.array().square())).matrix();
    grad.w_input.noalias() += dz * xs[cache.order[s - 1]].transpose();
    grad.w_hidden.noalias() += dz * cache.h[s - 1].transpose();
    grad.bias += dz.rowwise().sum();
    dh.noalias() = p.w_hidden.transpose() * dz;
    dc = (dc.array() * gf.array()).matrix();
  }
}

}  // namespace

VectorXd bilstm_forward(const BilstmParams& p, const Matrix& x, SequenceShape shape) {
  const auto xs = step_inputs(x, shape);
  DirectionCache fwd, rev;
  run_direction(p.forward, xs, false, fwd);
  run_direction(p.reverse, xs, true, rev);
  const Index hs = p.hidden_size();
  VectorXd out = fwd.h.back().transpose() * p.w_out.head(hs) + rev.h.back().transpose() * p.w_out.tail(hs);
  out.array() += p.b_out;
  return out;
}

double bilstm_loss(const BilstmParams& p, const Matrix& x, std::span<const double> y, SequenceShape shape,
                   double l2, VectorXd* grad) {
  const auto xs = step_inputs(x, shape);
  const auto n = static_cast<Index>(x.rows());
  if (y.size() != x.rows()) throw ArgumentError("bilstm: target length mismatch");
  DirectionCache fwd, rev;
  run_direction(p.forward, xs, false, fwd);
  run_direction(p.reverse, xs, true, rev);
  const Index hs = p.hidden_size();

  VectorXd pred = fwd.h.back().transpose() * p.w_out.head(hs) + rev.h.back().transpose() * p.w_out.tail(hs);
  pred.array() += p.b_out;
  const VectorXd resid = pred - Eigen::Map<const VectorXd>(y.data(), n);
  const VectorXd flat = p.flatten();
  const VectorXd mask = p.weight_mask();
  const double penalty = (flat.array().square() * mask.array()).sum();
  const double loss = resid.squaredNorm() / static_cast<double>(n) + l2 * penalty;
  if (grad == nullptr) return loss;

  const VectorXd dpred = (2.0 / static_cast<double>(n)) * resid;  // N
  BilstmParams g;
  g.forward = LstmCellParams::zeros(p.channels(), hs);
  g.reverse = LstmCellParams::zeros(p.channels(), hs);
  g.w_out.resize(2 * hs);
  g.w_out.head(hs) = fwd.h.back() * dpred;
  g.w_out.tail(hs) = rev.h.back() * dpred;
  g.b_out = dpred.sum();
  backprop_direction(p.forward, xs, fwd, p.w_out.head(hs) * dpred.transpose(), g.forward);
  backprop_direction(p.reverse, xs, rev, p.w_out.tail(hs) * dpred.transpose(), g.reverse);

  *grad = g.flatten();
  grad->array() += 2.0 * l2 * flat.array() * mask.array();
  return loss;
}

// ---------------------------------------------------------------------------
// Regressor

BilstmRegressor::BilstmRegressor(BilstmConfig cfg) : cfg_(cfg) { cfg_.validate(); }

void BilstmRegressor::do_fit(const Matrix& x, std::span<const double> y) {
  shape_ = sequence_shape(cfg_.seq_layout, x.cols());
  const std::size_t n = x.rows();

  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  if (*hi > *lo) {
    y_offset_ = *lo;
    y_scale_ = *hi - *lo;
  } else {
    y_offset_ = *lo - 0.5;
    y_scale_ = 1.0;
  }
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = (y[i] - y_offset_) / y_scale_;

  params_ = BilstmParams::initialize(static_cast<Index>(shape_.channels), cfg_.hidden_units, cfg_.seed);
  VectorXd theta = params_.flatten();
  VectorXd m = VectorXd::Zero(theta.size());
  VectorXd v = VectorXd::Zero(theta.size());
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  trace_.clear();
  trace_.reserve(static_cast<std::size_t>(cfg_.max_epochs));

  VectorXd grad;
  for (int epoch = 1; epoch <= cfg_.max_epochs; ++epoch) {
    params_.unflatten(theta);
    const double loss = bilstm_loss(params_, x, ys, shape_, cfg_.l2_coefficient, &grad);
    const double norm = grad.norm();
    if (!std::isfinite(loss) || !std::isfinite(norm))
      throw TrainingFailedError("bilstm: non-finite loss at epoch " + std::to_string(epoch), epoch);
    if (norm > cfg_.grad_clip_norm) grad *= cfg_.grad_clip_norm / norm;
    const double lr = epoch > cfg_.lr_drop_epoch ? cfg_.initial_lr * cfg_.lr_drop_factor : cfg_.initial_lr;

    m = beta1 * m + (1.0 - beta1) * grad;
    v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(beta1, epoch);
    const double c2 = 1.0 - std::pow(beta2, epoch);
    theta.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
    trace_.push_back({loss, norm, grad.norm(), lr});
  }
  params_.unflatten(theta);
  if (!theta.allFinite()) throw TrainingFailedError("bilstm: parameters diverged", cfg_.max_epochs);
}

std::vector<double> BilstmRegressor::do_predict(const Matrix& x) const {
  const VectorXd out = bilstm_forward(params_, x, shape_);
  std::vector<double> pred(x.rows());
  for (std::size_t i = 0; i < pred.size(); ++i) pred[i] = out(static_cast<Index>(i)) * y_scale_ + y_offset_;
  return pred;
}

void BilstmRegressor::write_body(BinaryWriter& out) const {
  out.u64(static_cast<std::uint64_t>(cfg_.hidden_units));
  out.f64(cfg_.initial_lr);
  out.f64(cfg_.l2_coefficient);
  out.u64(static_cast<std::uint64_t>(cfg_.max_epochs));
  out.f64(cfg_.grad_clip_norm);
  out.u64(static_cast<std::uint64_t>(cfg_.lr_drop_epoch));
  out.f64(cfg_.lr_drop_factor);
  out.u64(cfg_.seq_layout == SeqLayout::per_feature_steps ? 0 : 1);
  out.u64(cfg_.seed);
  out.u64(shape_.steps);
  out.u64(shape_.channels);
  out.f64(y_offset_);
  out.f64(y_scale_);
  const VectorXd flat = params_.flatten();
  out.f64s(std::span<const double>(flat.data(), static_cast<std::size_t>(flat.size())));
}

void BilstmRegressor::read_body(BinaryReader& in) {
  cfg_.hidden_units = static_cast<int>(in.u64());
  cfg_.initial_lr = in.f64();
  cfg_.l2_coefficient = in.f64();
  cfg_.max_epochs = static_cast<int>(in.u64());
  cfg_.grad_clip_norm = in.f64();
  cfg_.lr_drop_epoch = static_cast<int>(in.u64());
  cfg_.lr_drop_factor = in.f64();
  cfg_.seq_layout = in.u64() == 0 ? SeqLayout::per_feature_steps : SeqLayout::flat_steps;
  cfg_.seed = in.u64();
  shape_.steps = in.u64();
  shape_.channels = in.u64();
  y_offset_ = in.f64();
  y_scale_ = in.f64();
  const auto flat = in.f64s();
  if (cfg_.hidden_units < 1 || shape_.channels == 0) throw ParseError("model file: corrupt bilstm header", 0, 0);
  params_.forward = LstmCellParams::zeros(static_cast<Index>(shape_.channels), cfg_.hidden_units);
  params_.reverse = LstmCellParams::zeros(static_cast<Index>(shape_.channels), cfg_.hidden_units);
  params_.w_out = VectorXd::Zero(2 * cfg_.hidden_units);
  params_.unflatten(Eigen::Map<const VectorXd>(flat.data(), static_cast<Index>(flat.size())));
}

RegressorPtr bilstm_fit(const Matrix& x, std::span<const double> y, const BilstmConfig& cfg) {
  auto model = std::make_unique<BilstmRegressor>(cfg);
  model->fit(x, y);
  return model;
}

}  // namespace ragq
