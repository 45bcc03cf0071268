#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "ragq/lstm.hpp"
#include "ragq/matrix.hpp"
#include "ragq/regressor.hpp"

namespace ragq {

// How a feature row becomes a sequence.
//   per_feature_steps: one step per original feature (7), holding that
//                      feature's mode values as channels (D / 7 of them).
//   flat_steps:        one step per column, one channel.
enum class SeqLayout { per_feature_steps, flat_steps };

struct SequenceShape {
  std::size_t steps = 0;
  std::size_t channels = 0;
};

SequenceShape sequence_shape(SeqLayout layout, std::size_t feature_count);

struct BilstmConfig {
  int hidden_units = 16;
  double initial_lr = 0.01;
  double l2_coefficient = 1e-4;
  int max_epochs = 500;
  double grad_clip_norm = 1.0;
  int lr_drop_epoch = 350;
  double lr_drop_factor = 0.2;
  SeqLayout seq_layout = SeqLayout::per_feature_steps;
  std::uint64_t seed = 0;

  void validate() const;
  // PSO position (L2 coefficient, initial learning rate, hidden units).
  static BilstmConfig from_position(std::span<const double> position, const BilstmConfig& base);
};

// Forward and reverse cells plus one affine output unit on [h_fwd_T ; h_rev_1].
struct BilstmParams {
  LstmCellParams forward;
  LstmCellParams reverse;
  Eigen::VectorXd w_out;  // 2H
  double b_out = 0.0;

  // Orthogonal recurrent blocks, uniform(-1/sqrt(I), 1/sqrt(I)) input
  // weights, forget-gate bias 1, other biases 0.
  static BilstmParams initialize(Eigen::Index channels, Eigen::Index hidden, std::uint64_t seed);

  Eigen::Index hidden_size() const { return forward.hidden_size(); }
  Eigen::Index channels() const { return forward.input_size(); }

  // Packing order: forward (W_in, W_h, b), reverse (W_in, W_h, b), w_out, b_out.
  Eigen::VectorXd flatten() const;
  void unflatten(const Eigen::VectorXd& flat);
  // 1 where the packed entry is a weight (L2-penalized), 0 for biases.
  Eigen::VectorXd weight_mask() const;
};

// Network outputs (in the scaled target space) for every row of x.
Eigen::VectorXd bilstm_forward(const BilstmParams& p, const Matrix& x, SequenceShape shape);

// Training objective mean((yhat - y)^2) + l2 * sum(weights^2). When `grad` is
// non-null it receives the gradient in packed order.
double bilstm_loss(const BilstmParams& p, const Matrix& x, std::span<const double> y,
                   SequenceShape shape, double l2, Eigen::VectorXd* grad);

struct EpochStats {
  double loss = 0.0;
  double grad_norm = 0.0;          // before clipping
  double clipped_grad_norm = 0.0;  // after clipping
  double learning_rate = 0.0;
};

// Full-batch Adam (0.9 / 0.999 / 1e-8) with global-norm clipping and a
// one-time learning-rate drop. Targets are min-max scaled to [0, 1] using the
// training data and mapped back at prediction.
class BilstmRegressor : public Regressor {
 public:
  explicit BilstmRegressor(BilstmConfig cfg = {});

  std::string kind() const override { return "bilstm"; }
  const BilstmConfig& config() const noexcept { return cfg_; }
  const BilstmParams& params() const noexcept { return params_; }
  const std::vector<EpochStats>& trace() const noexcept { return trace_; }

 protected:
  void do_fit(const Matrix& x, std::span<const double> y) override;
  std::vector<double> do_predict(const Matrix& x) const override;
  void write_body(BinaryWriter& out) const override;
  void read_body(BinaryReader& in) override;
  std::size_t min_rows() const override { return 4; }

 private:
  BilstmConfig cfg_;
  BilstmParams params_;
  SequenceShape shape_;
  double y_offset_ = 0.0;
  double y_scale_ = 1.0;
  std::vector<EpochStats> trace_;
};

RegressorPtr bilstm_fit(const Matrix& x, std::span<const double> y, const BilstmConfig& cfg);

}  // namespace ragq
